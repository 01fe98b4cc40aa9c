//! Exhaustive and sampled checks of normalization, monotonicity and submodularity.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ValuationError, ValuationOracle, AXIOM_TOLERANCE, EXHAUSTIVE_CHECK_ITEMS};
use crate::itemset::ItemSet;

pub const DEFAULT_SPOT_CHECK_SAMPLES: usize = 100_000;

/// `MG(set, item) < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityWitness {
    pub set: ItemSet,
    pub item: usize,
    pub marginal: f64,
}

impl fmt::Display for MonotonicityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MG({}, {}) = {} is negative",
            self.set, self.item, self.marginal
        )
    }
}

/// `MG(smaller, item) < MG(larger, item)` with `smaller ⊆ larger`, `item ∉ larger`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubmodularityWitness {
    pub smaller: ItemSet,
    pub larger: ItemSet,
    pub item: usize,
    pub marginal_smaller: f64,
    pub marginal_larger: f64,
}

impl fmt::Display for SubmodularityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MG({}, {}) = {} < MG({}, {}) = {}",
            self.smaller,
            self.item,
            self.marginal_smaller,
            self.larger,
            self.item,
            self.marginal_larger
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub ground_size: usize,
    pub normalized: bool,
    pub monotone: bool,
    pub submodular: bool,
    /// `v(∅)` when it is not zero.
    pub empty_value: Option<f64>,
    pub monotonicity_witness: Option<MonotonicityWitness>,
    pub submodularity_witness: Option<SubmodularityWitness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.normalized && self.monotone && self.submodular
    }

    pub fn first_violation(&self) -> Option<String> {
        if let Some(v) = self.empty_value {
            return Some(format!("value of the empty set is {v}, expected 0"));
        }
        if let Some(w) = &self.monotonicity_witness {
            return Some(format!("not monotone: {w}"));
        }
        self.submodularity_witness
            .as_ref()
            .map(|w| format!("not submodular: {w}"))
    }
}

/// Exhaustive check over a dense value vector indexed by bitmask.
///
/// Submodularity pairs are visited with the larger set `B` in ascending
/// bitmask order, then `e ∉ B` ascending, then `A ⊆ B` ascending; the first
/// violation found is reported.
pub(crate) fn check_dense(n: usize, f: &[f64]) -> AxiomReport {
    debug_assert_eq!(f.len(), 1usize << n);
    let tol = AXIOM_TOLERANCE;
    let full = ItemSet::full(n);
    let mg = |a: ItemSet, e: usize| f[a.with(e).bits() as usize] - f[a.bits() as usize];

    let empty_value = (f[0].abs() > tol).then_some(f[0]);

    let mut monotonicity_witness = None;
    'mono: for a in full.subsets() {
        for e in full.difference(a) {
            let m = mg(a, e);
            if m < -tol {
                monotonicity_witness = Some(MonotonicityWitness {
                    set: a,
                    item: e,
                    marginal: m,
                });
                break 'mono;
            }
        }
    }

    let mut submodularity_witness = None;
    'sub: for b in full.subsets() {
        for e in full.difference(b) {
            let larger = mg(b, e);
            for a in b.subsets() {
                let smaller = mg(a, e);
                if smaller < larger - tol {
                    submodularity_witness = Some(SubmodularityWitness {
                        smaller: a,
                        larger: b,
                        item: e,
                        marginal_smaller: smaller,
                        marginal_larger: larger,
                    });
                    break 'sub;
                }
            }
        }
    }

    AxiomReport {
        ground_size: n,
        normalized: empty_value.is_none(),
        monotone: monotonicity_witness.is_none(),
        submodular: submodularity_witness.is_none(),
        empty_value,
        monotonicity_witness,
        submodularity_witness,
    }
}

/// Exhaustive axiom check; refuses ground sets above 12 items.
pub fn check_axioms(oracle: &ValuationOracle) -> Result<AxiomReport, ValuationError> {
    let n = oracle.ground_size();
    if n > EXHAUSTIVE_CHECK_ITEMS {
        return Err(ValuationError::TooLarge {
            what: "axiom check",
            ground_size: n,
            limit: EXHAUSTIVE_CHECK_ITEMS,
            hint: "use spot_check_axioms for a randomized check",
        });
    }
    Ok(check_dense(n, &oracle.tabulate()?))
}

/// Outcome of a randomized axiom check. A clean run means "no violation
/// found", never that the oracle satisfies the axioms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheckReport {
    pub samples: usize,
    pub seed: u64,
    pub empty_value: Option<f64>,
    pub monotonicity_witness: Option<MonotonicityWitness>,
    pub submodularity_witness: Option<SubmodularityWitness>,
}

impl SpotCheckReport {
    pub fn violation_found(&self) -> bool {
        self.empty_value.is_some()
            || self.monotonicity_witness.is_some()
            || self.submodularity_witness.is_some()
    }

    pub fn verdict(&self) -> &'static str {
        if self.violation_found() {
            "violation found"
        } else {
            "no violation found"
        }
    }
}

/// Samples `samples` triples `(A ⊆ B, e ∉ B)` with a ChaCha8 generator seeded by `seed`.
pub fn spot_check_axioms(oracle: &ValuationOracle, samples: usize, seed: u64) -> SpotCheckReport {
    let n = oracle.ground_size();
    let tol = AXIOM_TOLERANCE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let empty = oracle.eval(ItemSet::EMPTY);
    let mut report = SpotCheckReport {
        samples,
        seed,
        empty_value: (empty.abs() > tol).then_some(empty),
        monotonicity_witness: None,
        submodularity_witness: None,
    };
    if n == 0 {
        return report;
    }
    let full = ItemSet::full(n);
    for _ in 0..samples {
        let e = rng.gen_range(0..n);
        let b = ItemSet::from_bits(rng.gen::<u64>())
            .intersection(full)
            .without(e);
        let a = ItemSet::from_bits(rng.gen::<u64>()).intersection(b);
        let mg = |s: ItemSet| oracle.eval(s.with(e)) - oracle.eval(s);
        let (small, large) = (mg(a), mg(b));
        if report.monotonicity_witness.is_none() && small < -tol {
            report.monotonicity_witness = Some(MonotonicityWitness {
                set: a,
                item: e,
                marginal: small,
            });
        }
        if report.submodularity_witness.is_none() && small < large - tol {
            report.submodularity_witness = Some(SubmodularityWitness {
                smaller: a,
                larger: b,
                item: e,
                marginal_smaller: small,
                marginal_larger: large,
            });
        }
        if report.monotonicity_witness.is_some() && report.submodularity_witness.is_some() {
            break;
        }
    }
    report
}
