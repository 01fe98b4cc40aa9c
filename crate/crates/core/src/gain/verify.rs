//! Exhaustive checks of the inequalities that drive the analysis of Greedy.
//! Per-order checks compare raw values; expectation checks compare values
//! normalized by the reference optimum.

use std::collections::BTreeMap;

use serde::Serialize;

use super::trace::{check_mode, sample_vector, GainTrace};
use super::{is_permutation, GainContext, GainError, Trace};
use crate::allocation::{welfare_unchecked, Allocation};
use crate::greedy::greedy_unchecked;
use crate::itemset::ItemSet;
use crate::optimal::best_assignment;
use crate::sweep::{sweep, Moments, SweepMode, Tally};
use crate::valuations::classify_second_order;

pub const LEMMAS_MAX_ITEMS: usize = 7;
pub const CONCAT_MAX_ITEMS: usize = 8;
pub const SECOND_HALF_MAX_ITEMS: usize = 6;
pub const SECOND_HALF_MAX_AGENTS: usize = 3;

/// Tolerance of per-order checks, scaled by `max(1, OPT)`.
pub const PER_ORDER_TOL: f64 = 1e-12;
/// Tolerance of checks on normalized expectations.
pub const EXPECTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// The arrival order, for per-order checks.
    pub order: Option<Vec<usize>>,
    /// 1-based position or index the violation refers to.
    pub position: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Why the check did not run; skipped checks count as passed.
    pub skipped: Option<String>,
    pub tolerance: f64,
    /// Largest amount by which the checked side fell short; negative means slack.
    pub max_violation: f64,
    pub witness: Option<Witness>,
}

impl CheckResult {
    fn skipped(name: &'static str, reason: impl Into<String>) -> Self {
        CheckResult {
            name,
            passed: true,
            skipped: Some(reason.into()),
            tolerance: 0.0,
            max_violation: 0.0,
            witness: None,
        }
    }

    fn from_worst(name: &'static str, tolerance: f64, worst: Worst) -> Self {
        CheckResult {
            name,
            passed: worst.first.is_none(),
            skipped: None,
            tolerance,
            max_violation: finite(worst.max),
            witness: worst.first,
        }
    }

    /// `lhs >= rhs` for every `(position, lhs, rhs)`.
    fn at_least(
        name: &'static str,
        tolerance: f64,
        rows: impl IntoIterator<Item = (usize, f64, f64)>,
    ) -> Self {
        Self::compare(name, tolerance, rows, |lhs, rhs| rhs - lhs)
    }

    /// `|lhs - rhs| <= tolerance` for every row.
    fn identity(
        name: &'static str,
        tolerance: f64,
        rows: impl IntoIterator<Item = (usize, f64, f64)>,
    ) -> Self {
        Self::compare(name, tolerance, rows, |lhs, rhs| (lhs - rhs).abs())
    }

    fn compare(
        name: &'static str,
        tolerance: f64,
        rows: impl IntoIterator<Item = (usize, f64, f64)>,
        violation: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut worst = Worst::new();
        let mut worst_row = None;
        for (position, lhs, rhs) in rows {
            let v = violation(lhs, rhs);
            if v > worst.max {
                worst.max = v;
                worst_row = Some((position, lhs, rhs));
            }
        }
        let passed = worst.max <= tolerance;
        CheckResult {
            name,
            passed,
            skipped: None,
            tolerance,
            max_violation: finite(worst.max),
            witness: worst_row
                .filter(|_| !passed)
                .map(|(position, lhs, rhs)| Witness {
                    order: None,
                    position: Some(position),
                    lhs,
                    rhs,
                }),
        }
    }
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    /// Named expectations behind the checks, normalized by the optimum.
    pub quantities: BTreeMap<String, f64>,
    pub trace: GainTrace,
}

impl VerificationReport {
    fn new(checks: Vec<CheckResult>, quantities: BTreeMap<String, f64>, trace: GainTrace) -> Self {
        VerificationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
            quantities,
            trace,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest violation seen, and the first violating order in sweep order.
#[derive(Debug, Clone)]
struct Worst {
    max: f64,
    first: Option<Witness>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            max: f64::NEG_INFINITY,
            first: None,
        }
    }

    fn record(
        &mut self,
        violation: f64,
        tol: f64,
        order: &[usize],
        position: usize,
        lhs: f64,
        rhs: f64,
    ) {
        self.max = self.max.max(violation);
        if violation > tol && self.first.is_none() {
            self.first = Some(Witness {
                order: Some(order.to_vec()),
                position: Some(position),
                lhs,
                rhs,
            });
        }
    }

    fn merge(&mut self, later: Worst) {
        self.max = self.max.max(later.max);
        if self.first.is_none() {
            self.first = later.first;
        }
    }
}

struct LemmaTally {
    moments: Moments,
    arrival_check: Worst,
    reduction_check: Worst,
}

impl Tally for LemmaTally {
    fn merge(&mut self, later: Self) {
        self.moments.merge(later.moments);
        self.arrival_check.merge(later.arrival_check);
        self.reduction_check.merge(later.reduction_check);
    }
}

/// Greedy's bundles after each prefix, `0..=n`.
fn prefix_bundles(m: usize, trace: &Trace) -> Vec<Vec<ItemSet>> {
    let mut out = Vec::with_capacity(trace.order.len() + 1);
    let mut bundles = vec![ItemSet::EMPTY; m];
    out.push(bundles.clone());
    for (&item, &agent) in trace.order.iter().zip(&trace.agents) {
        bundles[agent].insert(item);
        out.push(bundles.clone());
    }
    out
}

fn item_set(items: &[usize]) -> ItemSet {
    items.iter().collect()
}

/// `1/n - Σ_{j<i} a_j/(n-j)` for each 1-based position `i`.
fn w_lower_bounds(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let nf = n as f64;
    let mut acc = 0.0;
    (0..n)
        .map(|i| {
            let bound = 1.0 / nf - acc;
            acc += a[i] / (nf - (i + 1) as f64);
            bound
        })
        .collect()
}

impl GainContext {
    /// Exhaustively checks the per-order and expected inequalities of the
    /// first half of the analysis. Needs `n <= 7`.
    pub fn verify_lemmas(&self) -> Result<VerificationReport, GainError> {
        check_mode(
            self,
            SweepMode::Exact,
            "lemma verification",
            LEMMAS_MAX_ITEMS,
        )?;
        let n = self.n();
        let m = self.m();
        let half = n / 2;
        let even = n.is_multiple_of(2);
        let tol = PER_ORDER_TOL * self.opt_value().max(1.0);
        let empty = vec![ItemSet::EMPTY; m];

        let tally = sweep(
            n,
            SweepMode::Exact,
            || LemmaTally {
                moments: Moments::new(4 * n + 3),
                arrival_check: Worst::new(),
                reduction_check: Worst::new(),
            },
            |order, acc| {
                let t = self.trace_raw(order);
                for i in 0..n {
                    let g = t.arrival_gain[i];
                    acc.arrival_check
                        .record(g - t.w[i], tol, order, i + 1, t.w[i], g);
                    let drop = t.a[i] + t.b[i];
                    acc.reduction_check
                        .record(drop - t.w[i], tol, order, i + 1, t.w[i], drop);
                }
                let mut sample = sample_vector(&t);
                let (c1, c2) = if even {
                    let s1 = item_set(&order[..half]);
                    let rest = item_set(&order[half..]);
                    let after = &prefix_bundles(m, &t)[half];
                    (
                        self.gain_set_raw(rest, &empty) - self.gain_set_raw(rest, after),
                        self.gain_set_raw(s1, &empty) - self.gain_set_raw(s1, after),
                    )
                } else {
                    (0.0, 0.0)
                };
                sample.extend([c1, c2]);
                acc.moments.push(&sample);
            },
        );

        let trace = self.summarize(SweepMode::Exact, &tally.moments);
        let opt = self.opt_value();
        let mean = tally.moments.mean();
        let nf = n as f64;
        let bounds = w_lower_bounds(&trace.a);

        let mut checks = vec![
            CheckResult::from_worst("marginal_at_least_arrival_gain", tol, tally.arrival_check),
            CheckResult::from_worst(
                "marginal_at_least_gain_reduction",
                tol,
                tally.reduction_check,
            ),
            CheckResult::at_least(
                "ratio_at_least_half",
                EXPECTATION_TOL,
                [(0, trace.ratio, 0.5)],
            ),
            CheckResult::at_least(
                "ratio_at_least_half_plus_beta_half",
                EXPECTATION_TOL,
                [(0, trace.ratio, trace.ratio_bound)],
            ),
            CheckResult::at_least(
                "w_lower_bound",
                EXPECTATION_TOL,
                (0..n).map(|i| (i + 1, trace.w[i], bounds[i])),
            ),
            CheckResult::identity(
                "arrival_gain_identity",
                EXPECTATION_TOL,
                (0..n).map(|i| (i + 1, trace.arrival_gain[i], bounds[i])),
            ),
        ];
        let mut quantities = BTreeMap::new();
        if even {
            let late_lhs = mean[4 * n + 1] / opt;
            let early_lhs = mean[4 * n + 2] / opt;
            let hf = half as f64;
            let late_rhs: f64 = (0..half)
                .map(|j| trace.a[j] * hf / (nf - (j + 1) as f64))
                .sum();
            let early_rhs: f64 = (0..half)
                .map(|j| trace.a[j] * (hf - (j + 1) as f64) / (nf - (j + 1) as f64) + trace.b[j])
                .sum();
            checks.push(CheckResult::identity(
                "second_half_gain_reduction",
                EXPECTATION_TOL,
                [(0, late_lhs, late_rhs)],
            ));
            checks.push(CheckResult::identity(
                "first_half_gain_reduction",
                EXPECTATION_TOL,
                [(0, early_lhs, early_rhs)],
            ));
            quantities.insert("late_lhs".into(), late_lhs);
            quantities.insert("late_rhs".into(), late_rhs);
            quantities.insert("early_lhs".into(), early_lhs);
            quantities.insert("early_rhs".into(), early_rhs);
        } else {
            for name in ["second_half_gain_reduction", "first_half_gain_reduction"] {
                checks.push(CheckResult::skipped(name, format!("n = {n} is odd")));
            }
        }
        Ok(VerificationReport::new(checks, quantities, trace))
    }

    /// `A′ = A^G(⟨S1,S2,S3⟩) ∪ A^G(⟨S2,S3⟩) ∪ A*(S2)` for the split of `order`
    /// into halves and quarters, with `V(A′) − V(A^G(S1))` in raw units.
    pub fn build_a_prime(&self, order: &[usize]) -> Result<APrime, GainError> {
        let n = self.n();
        if !n.is_multiple_of(4) {
            return Err(GainError::Divisibility {
                what: "the concatenated allocation",
                n,
                divisor: 4,
            });
        }
        if !is_permutation(order, n) {
            return Err(GainError::NotPermutation { what: "order", n });
        }
        Ok(self.a_prime_raw(order))
    }

    fn a_prime_raw(&self, order: &[usize]) -> APrime {
        let n = order.len();
        let (half, three_quarters) = (n / 2, 3 * n / 4);
        let full = greedy_unchecked(&self.values, order);
        let first_half = full.prefix_allocation(half);
        let tail = greedy_unchecked(&self.values, &order[half..]).allocation;
        let s2 = item_set(&order[half..three_quarters]);
        let opt_s2 = Allocation::from_parts(
            self.reference
                .allocation
                .bundles()
                .iter()
                .map(|b| b.intersection(s2))
                .collect(),
            false,
        );
        let allocation = full
            .allocation
            .union(&tail)
            .and_then(|u| u.union(&opt_s2))
            .expect("allocations share the agent count");
        let value_after_s1 = welfare_unchecked(&self.values, allocation.bundles())
            - welfare_unchecked(&self.values, first_half.bundles());
        APrime {
            allocation,
            value_after_s1,
        }
    }

    /// Checks `E[V(A′) − V(A^G(S1))] / OPT` against its lower bound in terms
    /// of the expected trace. Needs `n` divisible by 4 and `n <= 8`.
    pub fn verify_concatenated(&self) -> Result<VerificationReport, GainError> {
        let n = self.n();
        if !n.is_multiple_of(4) {
            return Err(GainError::Divisibility {
                what: "the concatenated-allocation bound",
                n,
                divisor: 4,
            });
        }
        check_mode(
            self,
            SweepMode::Exact,
            "the concatenated-allocation bound",
            CONCAT_MAX_ITEMS,
        )?;
        let moments = sweep(
            n,
            SweepMode::Exact,
            || Moments::new(4 * n + 2),
            |order, acc| {
                let mut sample = sample_vector(&self.trace_raw(order));
                sample.push(self.a_prime_raw(order).value_after_s1);
                acc.push(&sample);
            },
        );
        let trace = self.summarize(SweepMode::Exact, &moments);
        let lhs = moments.mean()[4 * n + 1] / self.opt_value();
        let rhs = concat_rhs(&trace.a, &trace.b);
        let checks = vec![CheckResult::at_least(
            "concatenated_allocation_bound",
            EXPECTATION_TOL,
            [(0, lhs, rhs)],
        )];
        let quantities = BTreeMap::from([
            ("concat_lhs".to_string(), lhs),
            ("concat_rhs".to_string(), rhs),
        ]);
        Ok(VerificationReport::new(checks, quantities, trace))
    }

    /// Exhaustive second-half checks: the lower bound on `E[X]` for every
    /// instance, and the `Y` recursion and `g`/`b` inequality when every
    /// agent is second-order supermodular. Needs even `n <= 6` and `m <= 3`.
    pub fn verify_second_half(&self) -> Result<VerificationReport, GainError> {
        let n = self.n();
        let m = self.m();
        if !n.is_multiple_of(2) {
            return Err(GainError::Divisibility {
                what: "second-half verification",
                n,
                divisor: 2,
            });
        }
        check_mode(
            self,
            SweepMode::Exact,
            "second-half verification",
            SECOND_HALF_MAX_ITEMS,
        )?;
        if m > SECOND_HALF_MAX_AGENTS {
            return Err(GainError::TooManyAgents {
                what: "second-half verification",
                m,
                limit: SECOND_HALF_MAX_AGENTS,
            });
        }
        let half = n / 2;
        let width = 4 * n + 1;
        let moments = sweep(
            n,
            SweepMode::Exact,
            || Moments::new(width + 1 + half),
            |order, acc| {
                let t = self.trace_raw(order);
                let prefixes = prefix_bundles(m, &t);
                let s1 = item_set(&order[..half]);
                let mut rest = order[half..].to_vec();
                rest.sort_unstable();
                let base = &prefixes[half];
                let before = self.gain_set_raw(s1, base);
                let (assignment, x) = best_assignment(&self.values, &rest, base, |bundles| {
                    before - self.gain_set_raw(s1, bundles)
                });
                let mut owner = vec![0; n];
                for (&item, &agent) in rest.iter().zip(&assignment) {
                    owner[item] = agent;
                }
                let mut sample = sample_vector(&t);
                sample.push(x);
                // Y_i for 1-based i in half+1..=n, position p = i - 1
                for p in half..n {
                    let prefix = &prefixes[p];
                    let mut with_hat = prefix.clone();
                    for &item in &order[p..] {
                        with_hat[owner[item]].insert(item);
                    }
                    sample.push(self.gain_set_raw(s1, prefix) - self.gain_set_raw(s1, &with_hat));
                }
                acc.push(&sample);
            },
        );
        let trace = self.summarize(SweepMode::Exact, &moments);
        let opt = self.opt_value();
        let mean = moments.mean();
        let nf = n as f64;
        let hf = half as f64;
        let ex = mean[width] / opt;
        // ey[k] is E[Y_{half+1+k}]; E[Y_{n+1}] = 0
        let mut ey: Vec<f64> = mean[width + 1..].iter().map(|y| y / opt).collect();
        ey.push(0.0);
        let expected_x_rhs: f64 = (0..half)
            .map(|j| {
                let jf = (j + 1) as f64;
                trace.a[j] * jf / (nf - jf) - trace.b[j]
            })
            .sum();
        let mut quantities = BTreeMap::from([
            ("expected_x".to_string(), ex),
            ("expected_x_rhs".to_string(), expected_x_rhs),
        ]);
        for (k, &y) in ey.iter().enumerate().take(half) {
            quantities.insert(format!("expected_y_{}", half + 1 + k), y);
        }
        let mut checks = vec![
            CheckResult::at_least(
                "expected_x_lower_bound",
                EXPECTATION_TOL,
                [(0, ex, expected_x_rhs)],
            ),
            CheckResult::at_least(
                "w_at_least_expected_y_share",
                EXPECTATION_TOL,
                (0..half).map(|k| {
                    let i = half + 1 + k;
                    (i, trace.w[i - 1], ey[k] / (nf - i as f64 + 1.0))
                }),
            ),
        ];

        let mut not_supermodular = None;
        for (agent, oracle) in self.instance.oracles().iter().enumerate() {
            let class = classify_second_order(oracle)
                .map_err(crate::instance::CoreError::from)?
                .class;
            if !class.is_supermodular() {
                not_supermodular = Some(format!(
                    "agent {agent} is classified second-order {class}, not supermodular"
                ));
                break;
            }
        }
        match not_supermodular {
            Some(reason) => {
                checks.push(CheckResult::skipped("y_recursion", reason.clone()));
                checks.push(CheckResult::skipped("g_at_most_b", reason));
            }
            None => {
                checks.push(CheckResult::at_least(
                    "y_recursion",
                    EXPECTATION_TOL,
                    (0..half).map(|k| {
                        let i = half + 1 + k;
                        let f = (nf - i as f64) / (nf - i as f64 + 1.0);
                        (i, ey[k + 1], f * ey[k] - trace.b[i - 1])
                    }),
                ));
                let g_sum: f64 = (0..half)
                    .map(|k| {
                        let i = half + 1 + k;
                        ex / hf - ey[k] / (nf - i as f64 + 1.0)
                    })
                    .sum();
                let b_sum: f64 = trace.b[half..].iter().sum();
                quantities.insert("g_sum".into(), g_sum);
                quantities.insert("b_sum".into(), b_sum);
                checks.push(CheckResult::at_least(
                    "g_at_most_b",
                    EXPECTATION_TOL,
                    [(0, b_sum, g_sum)],
                ));
            }
        }
        Ok(VerificationReport::new(checks, quantities, trace))
    }
}

/// Right-hand side of the concatenated-allocation bound, normalized.
pub(crate) fn concat_rhs(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let nf = n as f64;
    let q = nf / 4.0;
    let first: f64 = (0..n / 2)
        .map(|j| {
            let i = (j + 1) as f64;
            (i - q) / (nf - i) * a[j] - b[j]
        })
        .sum();
    let second: f64 = (n / 2..3 * n / 4)
        .map(|j| q / (nf - (j + 1) as f64) * a[j])
        .sum();
    0.25 + first + second
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct APrime {
    pub allocation: Allocation,
    /// `V(A′) − V(A^G(S1))`, raw.
    pub value_after_s1: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain::tests::or_indicator;
    use crate::instance::Instance;
    use crate::valuations::ValuationOracle;

    #[test]
    fn or_indicator_passes_lemma_checks() {
        let ctx = GainContext::new(&or_indicator()).unwrap();
        let report = ctx.verify_lemmas().unwrap();
        assert!(report.passed, "{report:#?}");
        assert!(report
            .check("second_half_gain_reduction")
            .unwrap()
            .skipped
            .is_none());
    }

    #[test]
    fn odd_n_skips_half_checks() {
        let inst = Instance::new(
            3,
            vec![ValuationOracle::additive(vec![1.0, 2.0, 3.0]).unwrap()],
        )
        .unwrap();
        let report = GainContext::new(&inst).unwrap().verify_lemmas().unwrap();
        assert!(report.passed);
        assert!(report
            .check("first_half_gain_reduction")
            .unwrap()
            .skipped
            .is_some());
    }

    #[test]
    fn a_prime_single_agent() {
        let inst = Instance::new(
            4,
            vec![ValuationOracle::budgeted_additive(5.0, vec![1.0, 2.0, 3.0, 4.0]).unwrap()],
        )
        .unwrap();
        let ctx = GainContext::new(&inst).unwrap();
        let order = [3, 1, 0, 2];
        let ap = ctx.build_a_prime(&order).unwrap();
        assert_eq!(ap.allocation.bundle(0), ItemSet::full(4));
        // v(N) - v({3, 1}) = 5 - 5
        assert_eq!(ap.value_after_s1, 0.0);
        assert!(ctx.build_a_prime(&[0, 1, 2]).is_err());
    }

    #[test]
    fn a_prime_contains_greedy_allocation() {
        let inst = Instance::new(
            4,
            vec![
                ValuationOracle::additive(vec![3.0, 1.0, 2.0, 1.0]).unwrap(),
                ValuationOracle::additive(vec![1.0, 3.0, 1.0, 2.0]).unwrap(),
            ],
        )
        .unwrap();
        let ctx = GainContext::new(&inst).unwrap();
        let order = [2, 0, 3, 1];
        let ap = ctx.build_a_prime(&order).unwrap();
        let g = greedy_unchecked(ctx.values(), &order);
        assert!(ap.allocation.contains(&g.allocation));
        let direct = welfare_unchecked(&inst, ap.allocation.bundles())
            - welfare_unchecked(&inst, g.prefix_allocation(2).bundles());
        assert_eq!(ap.value_after_s1, direct);
    }

    #[test]
    fn second_half_guards() {
        let odd = Instance::new(3, vec![ValuationOracle::additive(vec![1.0; 3]).unwrap()]).unwrap();
        assert!(matches!(
            GainContext::new(&odd).unwrap().verify_second_half(),
            Err(GainError::Divisibility { divisor: 2, .. })
        ));
        let many = Instance::new(
            2,
            (0..4)
                .map(|_| ValuationOracle::additive(vec![1.0; 2]).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            GainContext::new(&many).unwrap().verify_second_half(),
            Err(GainError::TooManyAgents { .. })
        ));
    }

    #[test]
    fn single_agent_second_half_is_trivial() {
        let inst = Instance::new(
            4,
            vec![ValuationOracle::additive(vec![1.0, 2.0, 3.0, 4.0]).unwrap()],
        )
        .unwrap();
        let report = GainContext::new(&inst)
            .unwrap()
            .verify_second_half()
            .unwrap();
        assert!(report.passed, "{report:#?}");
        assert_eq!(report.quantities["expected_x"], 0.0);
        assert_eq!(report.quantities["expected_y_3"], 0.0);
    }
}
