use serde::Serialize;

use super::{GainContext, GainError, Trace};
use crate::sweep::{sweep, Moments, SweepMode};

/// Largest `n` for which `expected_trace` enumerates all `n!` orders.
pub const EXACT_MAX_ITEMS: usize = 8;

/// Expected per-position quantities over a random arrival order. The
/// unsuffixed vectors are normalized by the reference optimum; `raw_*`
/// keep the original units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainTrace {
    pub mode: SweepMode,
    pub n: usize,
    pub m: usize,
    /// Number of orders averaged over.
    pub orders: u64,
    pub opt_value: f64,
    pub expected_welfare: f64,
    pub ratio: f64,
    pub beta: f64,
    /// `1/2 + beta/2`.
    pub ratio_bound: f64,
    pub w: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Expected `Gain` of the arriving item before it is assigned.
    pub arrival_gain: Vec<f64>,
    pub raw_w: Vec<f64>,
    pub raw_a: Vec<f64>,
    pub raw_b: Vec<f64>,
    /// Standard errors of the normalized estimates; Monte-Carlo mode only.
    pub stderr: Option<McError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McError {
    pub w: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub ratio: f64,
}

impl GainTrace {
    /// `(i, w_i, a_i, b_i)` rows, 1-based, normalized.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        (0..self.n).map(|i| (i + 1, self.w[i], self.a[i], self.b[i]))
    }
}

/// Flattens a trace as `[w.., a.., b.., arrival_gain.., welfare]`.
pub(crate) fn sample_vector(t: &Trace) -> Vec<f64> {
    let mut v = Vec::with_capacity(4 * t.w.len() + 1);
    v.extend(&t.w);
    v.extend(&t.a);
    v.extend(&t.b);
    v.extend(&t.arrival_gain);
    v.push(t.w.iter().sum());
    v
}

pub(crate) fn check_mode(
    ctx: &GainContext,
    mode: SweepMode,
    what: &'static str,
    limit: usize,
) -> Result<(), GainError> {
    match mode {
        SweepMode::Exact if ctx.n() > limit => Err(GainError::ExactTooLarge {
            what,
            n: ctx.n(),
            limit,
        }),
        SweepMode::MonteCarlo { samples, .. } if samples < 2 => Err(GainError::TooFewSamples),
        _ if ctx.opt_value() <= 0.0 => Err(GainError::ZeroOptimum),
        _ => Ok(()),
    }
}

impl GainContext {
    /// Averages `trace_one` over all orders (exact, `n <= 8`) or over seeded
    /// uniform samples.
    pub fn expected_trace(&self, mode: SweepMode) -> Result<GainTrace, GainError> {
        check_mode(self, mode, "exact expected trace", EXACT_MAX_ITEMS)?;
        let n = self.n();
        let moments = sweep(
            n,
            mode,
            || Moments::new(4 * n + 1),
            |order, acc| acc.push(&sample_vector(&self.trace_raw(order))),
        );
        Ok(self.summarize(mode, &moments))
    }

    pub(crate) fn summarize(&self, mode: SweepMode, moments: &Moments) -> GainTrace {
        let n = self.n();
        let opt = self.opt_value();
        let mean = moments.mean();
        let slice = |k: usize| mean[k * n..(k + 1) * n].to_vec();
        let norm = |v: &[f64]| v.iter().map(|x| x / opt).collect::<Vec<_>>();
        let (raw_w, raw_a, raw_b, raw_arrival) = (slice(0), slice(1), slice(2), slice(3));
        let expected_welfare = mean[4 * n];
        let b = norm(&raw_b);
        let beta: f64 = b.iter().sum();
        let stderr = match mode {
            SweepMode::Exact => None,
            SweepMode::MonteCarlo { .. } => {
                let se = moments.stderr();
                let part = |k: usize| norm(&se[k * n..(k + 1) * n]);
                Some(McError {
                    w: part(0),
                    a: part(1),
                    b: part(2),
                    ratio: se[4 * n] / opt,
                })
            }
        };
        GainTrace {
            mode,
            n,
            m: self.m(),
            orders: moments.count,
            opt_value: opt,
            expected_welfare,
            ratio: expected_welfare / opt,
            beta,
            ratio_bound: 0.5 + beta / 2.0,
            w: norm(&raw_w),
            a: norm(&raw_a),
            arrival_gain: norm(&raw_arrival),
            b,
            raw_w,
            raw_a,
            raw_b,
            stderr,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain::tests::or_indicator;
    use crate::instance::Instance;
    use crate::valuations::ValuationOracle;

    #[test]
    fn or_indicator_ratio() {
        let ctx = GainContext::new(&or_indicator()).unwrap();
        let t = ctx.expected_trace(SweepMode::Exact).unwrap();
        assert_eq!(t.orders, 2);
        assert_eq!(t.ratio, 0.75);
        assert!(t.ratio >= t.ratio_bound - 1e-12);
        assert_eq!(t.rows().count(), 2);
    }

    #[test]
    fn single_agent_ratio_is_one() {
        let inst = Instance::new(
            4,
            vec![ValuationOracle::budgeted_additive(6.0, vec![1.0, 2.0, 3.0, 4.0]).unwrap()],
        )
        .unwrap();
        let ctx = GainContext::new(&inst).unwrap();
        let t = ctx.expected_trace(SweepMode::Exact).unwrap();
        assert_eq!(t.ratio, 1.0);
    }

    #[test]
    fn guards() {
        let big = Instance::new(9, vec![ValuationOracle::additive(vec![1.0; 9]).unwrap()]).unwrap();
        let ctx = GainContext::new(&big).unwrap();
        assert!(matches!(
            ctx.expected_trace(SweepMode::Exact),
            Err(GainError::ExactTooLarge { n: 9, limit: 8, .. })
        ));
        let t = ctx
            .expected_trace(SweepMode::MonteCarlo {
                samples: 10,
                seed: 1,
            })
            .unwrap();
        assert_eq!(t.orders, 10);
        assert!(t.stderr.is_some());

        let zero =
            Instance::new(2, vec![ValuationOracle::additive(vec![0.0; 2]).unwrap()]).unwrap();
        let ctx = GainContext::new(&zero).unwrap();
        assert_eq!(
            ctx.expected_trace(SweepMode::Exact),
            Err(GainError::ZeroOptimum)
        );
    }
}
