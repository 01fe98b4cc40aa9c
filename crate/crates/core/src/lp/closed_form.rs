//! Closed-form optima of the programs, for cross-checking the solver.

use num_rational::Ratio;
use serde::Serialize;

use super::families::lambda_positions;
use super::model::ratio_to_f64;
use super::LpError;

/// `λ` must exceed `1 - (√68 - 8) ≈ 0.7538` for the closed form to be the optimum.
pub fn lambda_threshold() -> f64 {
    9.0 - 68f64.sqrt()
}

/// The `n → ∞` limit of the general-valuation bound, `1/24 + 89/192`.
pub const GENERAL_LIMIT: f64 = 97.0 / 192.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaLambdaValue {
    /// The exact optimum of `LP^{β,λ}` at this `n`.
    pub exact: f64,
    /// `1/2 - (1-λ)^2/2 + (1-λ)/4 - β`.
    pub asymptotic: f64,
}

fn check_threshold(lambda: f64) -> Result<(), LpError> {
    if lambda <= lambda_threshold() {
        return Err(LpError::BelowThreshold {
            lambda,
            threshold: lambda_threshold(),
        });
    }
    Ok(())
}

/// `1/2 - (1-λ)^2/2 + (1-λ)/4 - β`, the bound that holds for every `n`.
pub fn asymptotic_beta_lambda(lambda: f64, beta: f64) -> Result<f64, LpError> {
    check_threshold(lambda)?;
    let t = 1.0 - lambda;
    Ok(0.5 - t * t / 2.0 + t / 4.0 - beta)
}

/// Optimum of `LP^{β,λ}`: the head `Σ_{i<=λn} (n-i)/((n-1)n)` plus the tail
/// `(1-λ)n (n/2+1) / (2(n-1)n)` reduced by `β`, the tail clamped at zero.
pub fn closed_form_beta_lambda(
    n: usize,
    lambda: f64,
    beta: f64,
) -> Result<BetaLambdaValue, LpError> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(LpError::InvalidN {
            n,
            reason: "must be a positive multiple of 4",
        });
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(LpError::InvalidBeta(beta));
    }
    let k = lambda_positions(n, lambda)?;
    check_threshold(lambda)?;
    let denom = ((n - 1) * n) as i64;
    let head: Ratio<i64> = (1..=k).map(|i| Ratio::new((n - i) as i64, denom)).sum();
    let tail = Ratio::new(((n - k) * (n / 2 + 1)) as i64, 2 * denom);
    let exact = ratio_to_f64(head) + (ratio_to_f64(tail) - beta).max(0.0);
    Ok(BetaLambdaValue {
        exact,
        asymptotic: asymptotic_beta_lambda(lambda, beta)?,
    })
}

/// `1/24 + (89n²/32 - 15n/8) / (6(n-1)n)`, the optimum of the general program.
pub fn closed_form_general(n: usize) -> Result<f64, LpError> {
    if n < 8 || !n.is_multiple_of(4) {
        return Err(LpError::InvalidN {
            n,
            reason: "must be a multiple of 4 and at least 8",
        });
    }
    let n = n as i64;
    let inner = Ratio::new(89 * n * n, 32) - Ratio::new(15 * n, 8);
    Ok(ratio_to_f64(Ratio::new(1, 24) + inner / (6 * (n - 1) * n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedBound {
    /// Where `1/2 + β/2` meets `0.5312 - β`.
    pub beta: f64,
    pub value: f64,
}

/// `max_β min(1/2 + β/2, 0.5312 - β)`, attained where the two lines cross.
pub fn combined_secondorder_bound() -> CombinedBound {
    let lp_bound = Ratio::new(5312i64, 10_000);
    let half = Ratio::new(1i64, 2);
    let beta = (lp_bound - half) * Ratio::new(2, 3);
    CombinedBound {
        beta: ratio_to_f64(beta),
        value: ratio_to_f64(half + beta / 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_value_at_0_754() {
        let v = asymptotic_beta_lambda(0.754, 0.0).unwrap();
        assert!((v - 0.531242).abs() < 1e-12);
        assert!(asymptotic_beta_lambda(0.75, 0.0).is_err());
    }

    #[test]
    fn finite_n_example() {
        let v = closed_form_beta_lambda(16, 13.0 / 16.0, 0.0).unwrap();
        assert!((v.exact - 0.54375).abs() < 1e-15);
        assert!(v.exact >= v.asymptotic - 1e-12);
        assert!(matches!(
            closed_form_beta_lambda(16, 0.75, 0.0),
            Err(LpError::BelowThreshold { .. })
        ));
    }

    #[test]
    fn general_values() {
        assert!((closed_form_general(8).unwrap() - 177.0 / 336.0).abs() < 1e-15);
        assert!((closed_form_general(400).unwrap() - 9683.0 / 19152.0).abs() < 1e-15);
        assert!(closed_form_general(4).is_err());
    }

    #[test]
    fn combined() {
        let c = combined_secondorder_bound();
        assert!((c.value - 0.5104).abs() < 1e-12);
        assert!((c.beta - 0.0208).abs() < 1e-12);
        let min_curve = |b: f64| (0.5 + b / 2.0).min(0.5312 - b);
        assert_eq!(min_curve(0.0), 0.5);
    }
}
