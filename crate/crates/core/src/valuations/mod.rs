//! Value-query oracles for monotone submodular valuations.
//!
//! An oracle answers `value(S)` for bundles `S ⊆ {0, .., n-1}`. Every oracle in
//! the system is normalized (`value(∅) = 0`), monotone and submodular; the
//! constructors reject inputs that would break this.
//!
//! Derived queries:
//!
//! ```text
//! MG(A, e)    = f(A ∪ {e}) - f(A)
//! GR(A, S, e) = MG(A, e) - MG(A ∪ S, e)
//! ```

mod axioms;
mod families;
mod second_order;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use axioms::{
    check_axioms, spot_check_axioms, AxiomReport, MonotonicityWitness, SpotCheckReport,
    SubmodularityWitness, DEFAULT_SPOT_CHECK_SAMPLES,
};
pub use families::{
    BMatching, BudgetedAdditive, Coverage, Cut, CutEdge, Table, EXHAUSTIVE_CHECK_ITEMS,
    MAX_TABLE_ITEMS,
};
pub use second_order::{
    check_r_submodular, classify_second_order, RSubmodularReport, RWitness, SecondOrderClass,
    SecondOrderReport, SecondOrderWitness, MAX_SECOND_ORDER_ITEMS,
};

use crate::itemset::ItemSet;

/// Absolute tolerance for axiom and class checks on desk-scale values.
pub const AXIOM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValuationError {
    #[error("invalid query: item {item} is outside the ground set of {ground_size} items")]
    InvalidQuery { item: usize, ground_size: usize },
    #[error("invalid oracle parameter: {0}")]
    InvalidParameter(String),
    #[error("table is missing subset {{{0}}}")]
    MissingSubset(String),
    #[error("axiom violation: {0}")]
    AxiomViolation(String),
    #[error(
        "cut function is not monotone: item {item} has sink weight {sink_weight} \
         below its item-edge weight {item_weight}"
    )]
    NonMonotoneCut {
        item: usize,
        sink_weight: f64,
        item_weight: f64,
    },
    #[error("ground set of {ground_size} items is too large for exhaustive {what} (limit {limit}); {hint}")]
    TooLarge {
        what: &'static str,
        ground_size: usize,
        limit: usize,
        hint: &'static str,
    },
    #[error("sets {s} and {z} overlap")]
    Overlap { s: ItemSet, z: ItemSet },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Coverage,
    BudgetedAdditive,
    BMatching,
    Cut,
    Table,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OracleKind::Coverage => "coverage",
            OracleKind::BudgetedAdditive => "budgeted_additive",
            OracleKind::BMatching => "b_matching",
            OracleKind::Cut => "cut",
            OracleKind::Table => "table",
        };
        f.write_str(name)
    }
}

/// A valuation function accessed by value queries. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValuationOracle {
    Coverage(Coverage),
    BudgetedAdditive(BudgetedAdditive),
    BMatching(BMatching),
    Cut(Cut),
    Table(Table),
}

impl ValuationOracle {
    pub fn coverage(
        universe_weights: Vec<f64>,
        item_sets: Vec<Vec<usize>>,
    ) -> Result<Self, ValuationError> {
        Coverage::new(universe_weights, item_sets).map(Self::Coverage)
    }

    pub fn budgeted_additive(budget: f64, weights: Vec<f64>) -> Result<Self, ValuationError> {
        BudgetedAdditive::new(Some(budget), weights).map(Self::BudgetedAdditive)
    }

    /// Uncapped additive valuation.
    pub fn additive(weights: Vec<f64>) -> Result<Self, ValuationError> {
        BudgetedAdditive::new(None, weights).map(Self::BudgetedAdditive)
    }

    pub fn b_matching(capacity: usize, weights: Vec<f64>) -> Result<Self, ValuationError> {
        BMatching::new(capacity, weights).map(Self::BMatching)
    }

    pub fn cut(ground_size: usize, edges: Vec<CutEdge>) -> Result<Self, ValuationError> {
        Cut::new(ground_size, edges).map(Self::Cut)
    }

    pub fn table<I>(ground_size: usize, entries: I) -> Result<Self, ValuationError>
    where
        I: IntoIterator<Item = (ItemSet, f64)>,
    {
        Table::from_entries(ground_size, entries).map(Self::Table)
    }

    pub fn table_from_dense(ground_size: usize, values: Vec<f64>) -> Result<Self, ValuationError> {
        Table::from_dense(ground_size, values).map(Self::Table)
    }

    pub fn kind(&self) -> OracleKind {
        match self {
            Self::Coverage(_) => OracleKind::Coverage,
            Self::BudgetedAdditive(_) => OracleKind::BudgetedAdditive,
            Self::BMatching(_) => OracleKind::BMatching,
            Self::Cut(_) => OracleKind::Cut,
            Self::Table(_) => OracleKind::Table,
        }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Self::Coverage(c) => c.ground_size(),
            Self::BudgetedAdditive(b) => b.ground_size(),
            Self::BMatching(b) => b.ground_size(),
            Self::Cut(c) => c.ground_size(),
            Self::Table(t) => t.ground_size(),
        }
    }

    fn check_set(&self, s: ItemSet) -> Result<(), ValuationError> {
        let n = self.ground_size();
        if s.span() > n {
            return Err(ValuationError::InvalidQuery {
                item: s.span() - 1,
                ground_size: n,
            });
        }
        Ok(())
    }

    fn check_item(&self, e: usize) -> Result<(), ValuationError> {
        if e >= self.ground_size() {
            return Err(ValuationError::InvalidQuery {
                item: e,
                ground_size: self.ground_size(),
            });
        }
        Ok(())
    }

    /// `v(S)`.
    pub fn value(&self, s: ItemSet) -> Result<f64, ValuationError> {
        self.check_set(s)?;
        Ok(self.eval(s))
    }

    /// `MG(A, e)`; zero when `e ∈ A`.
    pub fn marginal_gain(&self, a: ItemSet, e: usize) -> Result<f64, ValuationError> {
        self.check_set(a)?;
        self.check_item(e)?;
        Ok(self.mg(a, e))
    }

    /// `GR(A, S, e) = MG(A, e) - MG(A ∪ S, e)`.
    pub fn gain_reduction(&self, a: ItemSet, s: ItemSet, e: usize) -> Result<f64, ValuationError> {
        self.check_set(a)?;
        self.check_set(s)?;
        self.check_item(e)?;
        Ok(self.mg(a, e) - self.mg(a.union(s), e))
    }

    /// Unchecked evaluation; callers guarantee `s ⊆ {0, .., n-1}`.
    pub fn eval(&self, s: ItemSet) -> f64 {
        debug_assert!(s.span() <= self.ground_size());
        match self {
            Self::Coverage(c) => c.eval(s),
            Self::BudgetedAdditive(b) => b.eval(s),
            Self::BMatching(b) => b.eval(s),
            Self::Cut(c) => c.eval(s),
            Self::Table(t) => t.eval(s),
        }
    }

    fn mg(&self, a: ItemSet, e: usize) -> f64 {
        if a.contains(e) {
            0.0
        } else {
            self.eval(a.with(e)) - self.eval(a)
        }
    }

    /// Values of every subset, indexed by bitmask. Refuses ground sets above 20 items.
    pub fn tabulate(&self) -> Result<Vec<f64>, ValuationError> {
        let n = self.ground_size();
        if n > MAX_TABLE_ITEMS {
            return Err(ValuationError::TooLarge {
                what: "tabulation",
                ground_size: n,
                limit: MAX_TABLE_ITEMS,
                hint: "evaluate queries directly instead",
            });
        }
        Ok(ItemSet::full(n).subsets().map(|s| self.eval(s)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> ItemSet {
        items.iter().collect()
    }

    #[test]
    fn duplicate_coverage_value() {
        let o = ValuationOracle::coverage(vec![1.0], vec![vec![0], vec![0]]).unwrap();
        assert_eq!(o.value(set(&[0, 1])).unwrap(), 1.0);
        assert_eq!(o.value(ItemSet::EMPTY).unwrap(), 0.0);
    }

    #[test]
    fn budgeted_value_matches_direct_min() {
        let weights = vec![3.0, 4.0];
        let o = ValuationOracle::budgeted_additive(5.0, weights.clone()).unwrap();
        for s in ItemSet::full(2).subsets() {
            let direct = f64::min(5.0, s.iter().map(|i| weights[i]).sum());
            assert_eq!(o.value(s).unwrap(), direct);
        }
        assert_eq!(o.value(set(&[0, 1])).unwrap(), 5.0);
    }

    #[test]
    fn invalid_query_is_reported() {
        let o = ValuationOracle::additive(vec![1.0, 2.0]).unwrap();
        assert_eq!(
            o.value(set(&[2])),
            Err(ValuationError::InvalidQuery {
                item: 2,
                ground_size: 2
            })
        );
        assert!(o.marginal_gain(ItemSet::EMPTY, 5).is_err());
    }

    #[test]
    fn marginal_gain_examples() {
        let add = ValuationOracle::additive(vec![3.0, 4.0]).unwrap();
        assert_eq!(add.marginal_gain(set(&[0]), 1).unwrap(), 4.0);
        assert_eq!(add.marginal_gain(ItemSet::EMPTY, 0).unwrap(), 3.0);
        assert_eq!(add.marginal_gain(set(&[0]), 0).unwrap(), 0.0);

        // exhaustive max-weight single selection: max(5, 2) - 5 = 0
        let bm = ValuationOracle::b_matching(1, vec![5.0, 2.0]).unwrap();
        let best = |s: ItemSet| s.iter().map(|i| [5.0, 2.0][i]).fold(0.0, f64::max);
        assert_eq!(
            bm.marginal_gain(set(&[0]), 1).unwrap(),
            best(set(&[0, 1])) - best(set(&[0]))
        );
        assert_eq!(bm.marginal_gain(set(&[0]), 1).unwrap(), 0.0);
    }

    #[test]
    fn gain_reduction_examples() {
        let add = ValuationOracle::additive(vec![1.0, 2.0, 3.0]).unwrap();
        for a in ItemSet::full(3).subsets() {
            for s in ItemSet::full(3).subsets() {
                for e in (0..3).filter(|&e| !s.contains(e)) {
                    assert_eq!(add.gain_reduction(a, s, e).unwrap(), 0.0);
                }
                // an item already in S loses its whole marginal
                for e in s.iter() {
                    assert_eq!(
                        add.gain_reduction(a, s, e).unwrap(),
                        add.marginal_gain(a, e).unwrap()
                    );
                }
            }
        }
        // items {a}, {a}, {a, b}; GR(∅, {0}, 2) = (f{2} - f∅) - (f{0,2} - f{0}) = 2 - 1
        let cov =
            ValuationOracle::coverage(vec![1.0, 1.0], vec![vec![0], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(
            cov.gain_reduction(ItemSet::EMPTY, set(&[0]), 2).unwrap(),
            1.0
        );
        assert_eq!(
            cov.gain_reduction(set(&[1]), ItemSet::EMPTY, 2).unwrap(),
            0.0
        );
    }

    #[test]
    fn full_coverage_value() {
        let cov =
            ValuationOracle::coverage(vec![1.0, 2.0, 4.0], vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(cov.value(ItemSet::full(2)).unwrap(), 7.0);
    }
}
