//! Second-order classification of set functions.
//!
//! For `A ⊆ B`, `S ∩ B = ∅` and `e ∉ B ∪ S`, a function is second-order
//! supermodular when `GR(A, S, e) ≥ GR(B, S, e)`, second-order submodular when
//! `GR(A, S, e) ≤ GR(B, S, e)`, and second-order modular when both hold.
//! Elements inside `B ∪ S` are excluded: there the marginal gain is zero by
//! convention and every non-additive function would fail modularity.

use std::fmt;

use serde::Serialize;

use super::{ValuationError, ValuationOracle, AXIOM_TOLERANCE};
use crate::itemset::ItemSet;

/// Largest ground set on which classification and `R` checks enumerate.
pub const MAX_SECOND_ORDER_ITEMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondOrderClass {
    /// Both inequalities hold everywhere (within tolerance).
    Modular,
    Supermodular,
    Submodular,
    /// Violates both directions.
    None,
}

impl SecondOrderClass {
    pub fn is_supermodular(self) -> bool {
        matches!(self, Self::Modular | Self::Supermodular)
    }

    pub fn is_submodular(self) -> bool {
        matches!(self, Self::Modular | Self::Submodular)
    }
}

impl fmt::Display for SecondOrderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Modular => "modular",
            Self::Supermodular => "supermodular",
            Self::Submodular => "submodular",
            Self::None => "none",
        };
        f.write_str(s)
    }
}

/// A tuple `(A, B, S, e)` with the two gain reductions it produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderWitness {
    pub a: ItemSet,
    pub b: ItemSet,
    pub s: ItemSet,
    pub item: usize,
    pub gr_a: f64,
    pub gr_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderReport {
    pub class: SecondOrderClass,
    /// Violation of `GR(A,S,e) ≥ GR(B,S,e)`, if any.
    pub supermodular_violation: Option<SecondOrderWitness>,
    /// Violation of `GR(A,S,e) ≤ GR(B,S,e)`, if any.
    pub submodular_violation: Option<SecondOrderWitness>,
}

fn guard(oracle: &ValuationOracle, what: &'static str) -> Result<Vec<f64>, ValuationError> {
    let n = oracle.ground_size();
    if n > MAX_SECOND_ORDER_ITEMS {
        return Err(ValuationError::TooLarge {
            what,
            ground_size: n,
            limit: MAX_SECOND_ORDER_ITEMS,
            hint: "classification enumerates all (A, B, S, e) tuples",
        });
    }
    oracle.tabulate()
}

/// Exhaustively classifies `oracle`; refuses ground sets above 10 items.
pub fn classify_second_order(
    oracle: &ValuationOracle,
) -> Result<SecondOrderReport, ValuationError> {
    let f = guard(oracle, "second-order classification")?;
    let n = oracle.ground_size();
    let tol = AXIOM_TOLERANCE;
    let full = ItemSet::full(n);
    let mg = |a: ItemSet, e: usize| f[a.with(e).bits() as usize] - f[a.bits() as usize];

    let mut super_violation = None;
    let mut sub_violation = None;
    'outer: for b in full.subsets() {
        for e in full.difference(b) {
            let free = full.difference(b).without(e);
            let mg_b = mg(b, e);
            for s in free.subsets().skip(1) {
                let gr_b = mg_b - mg(b.union(s), e);
                for a in b.subsets().filter(|&a| a != b) {
                    let gr_a = mg(a, e) - mg(a.union(s), e);
                    let witness = || SecondOrderWitness {
                        a,
                        b,
                        s,
                        item: e,
                        gr_a,
                        gr_b,
                    };
                    if super_violation.is_none() && gr_a < gr_b - tol {
                        super_violation = Some(witness());
                    }
                    if sub_violation.is_none() && gr_a > gr_b + tol {
                        sub_violation = Some(witness());
                    }
                    if super_violation.is_some() && sub_violation.is_some() {
                        break 'outer;
                    }
                }
            }
        }
    }

    let class = match (super_violation.is_some(), sub_violation.is_some()) {
        (false, false) => SecondOrderClass::Modular,
        (false, true) => SecondOrderClass::Supermodular,
        (true, false) => SecondOrderClass::Submodular,
        (true, true) => SecondOrderClass::None,
    };
    Ok(SecondOrderReport {
        class,
        supermodular_violation: super_violation,
        submodular_violation: sub_violation,
    })
}

/// Violation of `Δ_R(e, A) ≥ Δ_R(e, B)` for `A ⊆ B`, `e ∉ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RWitness {
    pub a: ItemSet,
    pub b: ItemSet,
    pub item: usize,
    pub delta_a: f64,
    pub delta_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RSubmodularReport {
    pub s: ItemSet,
    pub z: ItemSet,
    pub passed: bool,
    pub witness: Option<RWitness>,
}

/// Checks that `R(A) = (f(S∪Z) - f(Z)) - (f(S∪Z∪A) - f(Z∪A))`, defined on
/// `A ⊆ U \ (S ∪ Z)`, is submodular. Holds whenever `f` is second-order
/// supermodular.
pub fn check_r_submodular(
    oracle: &ValuationOracle,
    s: ItemSet,
    z: ItemSet,
) -> Result<RSubmodularReport, ValuationError> {
    let f = guard(oracle, "R submodularity check")?;
    let n = oracle.ground_size();
    for set in [s, z] {
        if set.span() > n {
            return Err(ValuationError::InvalidQuery {
                item: set.span() - 1,
                ground_size: n,
            });
        }
    }
    if !s.is_disjoint(z) {
        return Err(ValuationError::Overlap { s, z });
    }
    let val = |x: ItemSet| f[x.bits() as usize];
    let sz = s.union(z);
    let r = |a: ItemSet| (val(sz) - val(z)) - (val(sz.union(a)) - val(z.union(a)));
    let delta = |a: ItemSet, e: usize| r(a.with(e)) - r(a);

    let rest = ItemSet::full(n).difference(sz);
    for b in rest.subsets() {
        for e in rest.difference(b) {
            let delta_b = delta(b, e);
            for a in b.subsets() {
                let delta_a = delta(a, e);
                if delta_a < delta_b - AXIOM_TOLERANCE {
                    return Ok(RSubmodularReport {
                        s,
                        z,
                        passed: false,
                        witness: Some(RWitness {
                            a,
                            b,
                            item: e,
                            delta_a,
                            delta_b,
                        }),
                    });
                }
            }
        }
    }
    Ok(RSubmodularReport {
        s,
        z,
        passed: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuations::CutEdge;

    #[test]
    fn additive_is_modular() {
        let o = ValuationOracle::additive(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(
            classify_second_order(&o).unwrap().class,
            SecondOrderClass::Modular
        );
    }

    #[test]
    fn cut_is_modular() {
        let o = ValuationOracle::cut(
            3,
            vec![
                CutEdge {
                    u: 0,
                    v: Some(1),
                    weight: 1.0,
                },
                CutEdge {
                    u: 1,
                    v: Some(2),
                    weight: 2.0,
                },
                CutEdge {
                    u: 0,
                    v: None,
                    weight: 1.0,
                },
                CutEdge {
                    u: 1,
                    v: None,
                    weight: 3.0,
                },
                CutEdge {
                    u: 2,
                    v: None,
                    weight: 2.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(
            classify_second_order(&o).unwrap().class,
            SecondOrderClass::Modular
        );
    }

    #[test]
    fn coverage_is_supermodular_with_replayable_witness() {
        let o = ValuationOracle::coverage(
            vec![1.0, 1.0, 1.0],
            vec![vec![0, 1], vec![0], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let report = classify_second_order(&o).unwrap();
        assert_eq!(report.class, SecondOrderClass::Supermodular);
        let w = report.submodular_violation.unwrap();
        assert_eq!(o.gain_reduction(w.a, w.s, w.item).unwrap(), w.gr_a);
        assert_eq!(o.gain_reduction(w.b, w.s, w.item).unwrap(), w.gr_b);
        assert!(w.gr_a > w.gr_b);
    }

    #[test]
    fn classification_refuses_large_ground_sets() {
        let o = ValuationOracle::additive(vec![1.0; 11]).unwrap();
        assert!(matches!(
            classify_second_order(&o),
            Err(ValuationError::TooLarge { .. })
        ));
    }

    #[test]
    fn r_is_zero_for_empty_s_and_additive() {
        let cov =
            ValuationOracle::coverage(vec![1.0, 2.0], vec![vec![0], vec![0, 1], vec![1]]).unwrap();
        let z: ItemSet = [1usize].into_iter().collect();
        assert!(check_r_submodular(&cov, ItemSet::EMPTY, z).unwrap().passed);
        let add = ValuationOracle::additive(vec![1.0, 2.0, 3.0]).unwrap();
        let s: ItemSet = [0usize].into_iter().collect();
        assert!(check_r_submodular(&add, s, z).unwrap().passed);
    }

    #[test]
    fn r_check_rejects_overlap() {
        let add = ValuationOracle::additive(vec![1.0, 2.0]).unwrap();
        let s: ItemSet = [0usize].into_iter().collect();
        assert!(matches!(
            check_r_submodular(&add, s, s),
            Err(ValuationError::Overlap { .. })
        ));
    }
}
