//! The factor-revealing programs. Positions are 1-based in names, as in
//! `w1..wn`; all boundaries (`n/2`, `3n/4`, `λn`) must be integers.

use num_rational::Ratio;

use super::model::{Coef, Constraint, LpFamily, LpMeta, LpModel};
use super::LpError;

fn r(numer: usize, denom: usize) -> Ratio<i64> {
    Ratio::new(numer as i64, denom as i64)
}

fn check_n(n: usize) -> Result<(), LpError> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(LpError::InvalidN {
            n,
            reason: "must be a positive multiple of 4",
        });
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<(), LpError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(LpError::InvalidBeta(beta));
    }
    Ok(())
}

/// `λn` as an integer in `n/2..=n`, or an error.
pub fn lambda_positions(n: usize, lambda: f64) -> Result<usize, LpError> {
    if !(0.5..=1.0).contains(&lambda) {
        return Err(LpError::InvalidLambda {
            lambda,
            n,
            reason: "must lie in [1/2, 1]",
        });
    }
    let scaled = lambda * n as f64;
    let k = scaled.round();
    if (scaled - k).abs() > 1e-9 {
        return Err(LpError::InvalidLambda {
            lambda,
            n,
            reason: "lambda * n must be an integer",
        });
    }
    Ok(k as usize)
}

/// Column layout of the `β` programs.
struct BetaVars {
    n: usize,
}

impl BetaVars {
    fn w(&self, i: usize) -> usize {
        i - 1
    }
    fn a(&self, i: usize) -> usize {
        self.n + i - 1
    }
    fn b(&self, i: usize) -> usize {
        2 * self.n + i - 1
    }
    fn g(&self, i: usize) -> usize {
        3 * self.n + i - self.n / 2 - 1
    }
    fn names(&self) -> Vec<String> {
        let n = self.n;
        let mut names = Vec::with_capacity(3 * n + n / 2);
        for prefix in ["w", "a", "b"] {
            names.extend((1..=n).map(|i| format!("{prefix}{i}")));
        }
        names.extend((n / 2 + 1..=n).map(|i| format!("g{i}")));
        names
    }
}

/// `(2)` rows for `i <= c2_upto`, `(3)` rows for `i > c3_after`.
fn beta_model(n: usize, c2_upto: usize, c3_after: usize, beta: f64, family: LpFamily) -> LpModel {
    let v = BetaVars { n };
    let half = n / 2;
    let mut constraints = Vec::new();
    for i in 1..=n {
        constraints.push(Constraint {
            name: format!("c1_{i}"),
            coefs: vec![
                (v.w(i), Coef::int(1)),
                (v.a(i), Coef::int(-1)),
                (v.b(i), Coef::int(-1)),
            ],
            rhs: Coef::int(0),
        });
    }
    for i in 1..=c2_upto {
        let mut coefs = vec![(v.w(i), Coef::int(1))];
        coefs.extend((1..i).map(|j| (v.a(j), Coef::from(r(1, n - j)))));
        constraints.push(Constraint {
            name: format!("c2_{i}"),
            coefs,
            rhs: r(1, n).into(),
        });
    }
    for i in (c3_after.max(half) + 1)..=n {
        // w_i + g_i - (2/n) Σ_{j <= n/2} (a_j j/(n-j) - b_j) >= 0
        let mut coefs = vec![(v.w(i), Coef::int(1))];
        coefs.extend((1..=half).map(|j| (v.a(j), Coef::from(-r(2 * j, n * (n - j))))));
        coefs.extend((1..=half).map(|j| (v.b(j), Coef::from(r(2, n)))));
        coefs.push((v.g(i), Coef::int(1)));
        constraints.push(Constraint {
            name: format!("c3_{i}"),
            coefs,
            rhs: Coef::int(0),
        });
    }
    let mut coefs: Vec<(usize, Coef)> = (1..=half).map(|i| (v.b(i), Coef::int(-1))).collect();
    coefs.extend((half + 1..=n).map(|i| (v.g(i), Coef::int(-1))));
    let beta_coef = Coef::real(beta);
    constraints.push(Constraint {
        name: "c4".into(),
        coefs,
        rhs: Coef {
            value: -beta_coef.value,
            exact: beta_coef.exact.map(|x| -x),
        },
    });

    let names = v.names();
    let mut objective = vec![Coef::int(0); names.len()];
    for i in 1..=n {
        objective[v.w(i)] = Coef::int(1);
    }
    LpModel {
        meta: LpMeta {
            family,
            n,
            lambda: (family == LpFamily::BetaLambda).then(|| c2_upto as f64 / n as f64),
            beta: Some(beta),
        },
        var_names: names,
        objective,
        objective_offset: Coef::int(0),
        constraints,
    }
}

/// `LP^β`: minimize `Σ w_i` over `w, a, b ∈ R^n` and `g_{n/2+1..n}`.
pub fn build_lp_beta(n: usize, beta: f64) -> Result<LpModel, LpError> {
    check_n(n)?;
    check_beta(beta)?;
    Ok(beta_model(n, n, n / 2, beta, LpFamily::Beta))
}

/// `LP^{β,λ}`: `LP^β` with the `(2)` rows kept only for `i <= λn` and the
/// `(3)` rows only for `i > λn`.
pub fn build_lp_beta_lambda(n: usize, lambda: f64, beta: f64) -> Result<LpModel, LpError> {
    check_n(n)?;
    check_beta(beta)?;
    let k = lambda_positions(n, lambda)?;
    Ok(beta_model(n, k, k, beta, LpFamily::BetaLambda))
}

/// The lower-bound program for general submodular valuations over
/// `a_i, b_i` for `i <= 3n/4`, with the constant `1/24` as objective offset.
pub fn build_lp_general(n: usize) -> Result<LpModel, LpError> {
    check_n(n)?;
    let (half, tq) = (n / 2, 3 * n / 4);
    let a = |i: usize| i - 1;
    let b = |i: usize| tq + i - 1;
    let mut names: Vec<String> = (1..=tq).map(|i| format!("a{i}")).collect();
    names.extend((1..=tq).map(|i| format!("b{i}")));

    let mut objective = vec![Coef::int(0); 2 * tq];
    for i in 1..=tq {
        let coef = if i <= half {
            // 1 + (i - n/4) / (6(n - i)) = 1 + (4i - n) / (24(n - i))
            Ratio::from_integer(1) + Ratio::new(4 * i as i64 - n as i64, 24 * (n - i) as i64)
        } else {
            r(5, 6) + r(n, 24 * (n - i))
        };
        objective[a(i)] = coef.into();
        objective[b(i)] = r(5, 6).into();
    }
    let constraints = (1..=tq)
        .map(|i| {
            let mut coefs = vec![(a(i), Coef::int(1)), (b(i), Coef::int(1))];
            coefs.extend((1..i).map(|j| (a(j), Coef::from(r(1, n - j)))));
            Constraint {
                name: format!("c_{i}"),
                coefs,
                rhs: r(1, n).into(),
            }
        })
        .collect();
    Ok(LpModel {
        meta: LpMeta {
            family: LpFamily::GeneralLb,
            n,
            lambda: None,
            beta: None,
        },
        var_names: names,
        objective,
        objective_offset: r(1, 24).into(),
        constraints,
    })
}

/// The optimal point of `LP^{β,λ}` described by its tightness argument:
/// `b = 0`, `w = a`, `(2)` tight for `i <= λn`, `(3)` tight for `i > λn`,
/// and the `β` budget spent on the `g_i` of the tail, front to back.
pub fn tight_point_beta_lambda(n: usize, lambda: f64, beta: f64) -> Result<Vec<f64>, LpError> {
    check_n(n)?;
    check_beta(beta)?;
    let k = lambda_positions(n, lambda)?;
    let v = BetaVars { n };
    let nf = n as f64;
    let mut x = vec![0.0; 3 * n + n / 2];
    let head = |i: usize| (nf - i as f64) / ((nf - 1.0) * nf);
    let tail_share = (nf / 2.0 + 1.0) / (2.0 * (nf - 1.0) * nf);
    let mut budget = beta;
    for i in 1..=n {
        let w = if i <= k {
            head(i)
        } else {
            let g = budget.min(tail_share);
            budget -= g;
            x[v.g(i)] = g;
            tail_share - g
        };
        x[v.w(i)] = w;
        x[v.a(i)] = w;
    }
    Ok(x)
}

/// The optimal point of the general program: `a_i = (n-i)/((n-1)n)`, `b = 0`.
pub fn tight_point_general(n: usize) -> Result<Vec<f64>, LpError> {
    check_n(n)?;
    let tq = 3 * n / 4;
    let nf = n as f64;
    let mut x = vec![0.0; 2 * tq];
    for i in 1..=tq {
        x[i - 1] = (nf - i as f64) / ((nf - 1.0) * nf);
    }
    Ok(x)
}
