//! Per-item `Gain` bookkeeping against a reference optimum, and the
//! instrumentation built on it.
//!
//! For an item `j` with optimal agent `ℓ = opt_j`, let `P_j` be the items
//! that `ℓ` receives in the optimum and that precede `j` in the fixed order
//! `σ`. Then `Gain(j, A) = v_ℓ(A_ℓ ∪ P_j ∪ {j}) − v_ℓ(A_ℓ ∪ P_j)`.
//! Summed over the items of one agent this telescopes, so
//! `Σ_{opt_j = ℓ} Gain(j, A) = v_ℓ(A*_ℓ ∪ A_ℓ) − v_ℓ(A_ℓ)` for every `σ`.

mod conjecture;
mod trace;
mod verify;

pub use conjecture::{
    conjecture_check, conjecture_scan, ConjectureReport, ConjectureScan, Counterexample, ScanEntry,
    CONJECTURE_MAX_ITEMS, CONJECTURE_TOL, CROSSCHECK_TOL,
};
pub use trace::{GainTrace, McError, EXACT_MAX_ITEMS};
pub use verify::{
    APrime, CheckResult, VerificationReport, Witness, CONCAT_MAX_ITEMS, EXPECTATION_TOL,
    LEMMAS_MAX_ITEMS, PER_ORDER_TOL, SECOND_HALF_MAX_AGENTS, SECOND_HALF_MAX_ITEMS,
};

use thiserror::Error;

use crate::allocation::{welfare_unchecked, Allocation};
use crate::greedy::GreedyState;
use crate::instance::{CoreError, Evaluator, Instance, Valuations};
use crate::itemset::ItemSet;
use crate::optimal::{optimal, OptimalAllocation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{what} is not a permutation of 0..{n}")]
    NotPermutation { what: &'static str, n: usize },
    #[error("reference allocation must assign every item to exactly one agent; item {item} is unassigned")]
    PartialReference { item: usize },
    #[error("{what} enumerates all orders and is limited to n <= {limit} items (got {n}); use Monte-Carlo mode or a smaller instance")]
    ExactTooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("{what} is limited to {limit} agents (got {m})")]
    TooManyAgents {
        what: &'static str,
        m: usize,
        limit: usize,
    },
    #[error("{what} needs n divisible by {divisor} (got {n})")]
    Divisibility {
        what: &'static str,
        n: usize,
        divisor: usize,
    },
    #[error("the reference allocation has zero welfare, so normalized quantities are undefined")]
    ZeroOptimum,
    #[error("Monte-Carlo mode needs at least 2 samples")]
    TooFewSamples,
}

/// An instance with a fixed reference optimum `A*` and indexing order `σ`.
#[derive(Debug, Clone)]
pub struct GainContext {
    instance: Instance,
    values: Evaluator,
    reference: OptimalAllocation,
    sigma: Vec<usize>,
    /// `P_j` from the module docs.
    preceding: Vec<ItemSet>,
}

impl GainContext {
    /// Uses the brute-force optimum and `σ = identity`.
    pub fn new(instance: &Instance) -> Result<Self, GainError> {
        let reference = optimal(instance)?;
        Ok(Self::assemble(
            instance,
            reference,
            (0..instance.n()).collect(),
        ))
    }

    /// Uses a caller-supplied full assignment as `A*` (no optimality check).
    pub fn with_reference(instance: &Instance, reference: Allocation) -> Result<Self, GainError> {
        let n = instance.n();
        reference.validate(n, instance.m())?;
        let mut opt_map = vec![usize::MAX; n];
        for (agent, bundle) in reference.bundles().iter().enumerate() {
            for item in bundle.iter() {
                if opt_map[item] != usize::MAX {
                    return Err(CoreError::NotDisjoint { item }.into());
                }
                opt_map[item] = agent;
            }
        }
        if let Some(item) = opt_map.iter().position(|&a| a == usize::MAX) {
            return Err(GainError::PartialReference { item });
        }
        let value = welfare_unchecked(instance, reference.bundles());
        let reference = OptimalAllocation {
            allocation: reference,
            value,
            opt_map,
        };
        Ok(Self::assemble(instance, reference, (0..n).collect()))
    }

    /// Replaces the indexing order `σ`.
    pub fn with_sigma(self, sigma: Vec<usize>) -> Result<Self, GainError> {
        let n = self.instance.n();
        if !is_permutation(&sigma, n) {
            return Err(GainError::NotPermutation { what: "sigma", n });
        }
        Ok(Self::assemble(&self.instance, self.reference, sigma))
    }

    fn assemble(instance: &Instance, reference: OptimalAllocation, sigma: Vec<usize>) -> Self {
        let mut preceding = vec![ItemSet::EMPTY; instance.n()];
        let mut seen = vec![ItemSet::EMPTY; instance.m()];
        for &j in &sigma {
            let owner = reference.opt_map[j];
            preceding[j] = seen[owner];
            seen[owner].insert(j);
        }
        GainContext {
            instance: instance.clone(),
            values: instance.evaluator(),
            reference,
            sigma,
            preceding,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn values(&self) -> &Evaluator {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn m(&self) -> usize {
        self.instance.m()
    }

    pub fn reference(&self) -> &OptimalAllocation {
        &self.reference
    }

    pub fn opt_value(&self) -> f64 {
        self.reference.value
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `Gain(j, A)`.
    pub fn gain(&self, j: usize, a: &Allocation) -> Result<f64, GainError> {
        self.check_allocation(a)?;
        if j >= self.n() {
            return Err(CoreError::InvalidItem {
                item: j,
                n: self.n(),
            }
            .into());
        }
        Ok(self.gain_raw(j, a.bundles()))
    }

    /// `Σ_{j ∈ s} Gain(j, A)`.
    pub fn gain_set(&self, s: ItemSet, a: &Allocation) -> Result<f64, GainError> {
        self.check_allocation(a)?;
        if s.span() > self.n() {
            return Err(CoreError::InvalidItem {
                item: s.span() - 1,
                n: self.n(),
            }
            .into());
        }
        Ok(self.gain_set_raw(s, a.bundles()))
    }

    fn check_allocation(&self, a: &Allocation) -> Result<(), GainError> {
        a.validate(self.n(), self.m())?;
        Ok(())
    }

    pub(crate) fn gain_raw(&self, j: usize, bundles: &[ItemSet]) -> f64 {
        let owner = self.reference.opt_map[j];
        let base = bundles[owner].union(self.preceding[j]);
        self.values.marginal(owner, base, j)
    }

    pub(crate) fn gain_set_raw(&self, s: ItemSet, bundles: &[ItemSet]) -> f64 {
        s.iter().map(|j| self.gain_raw(j, bundles)).sum()
    }

    /// Greedy along `order` with per-position `(w_i, a_i, b_i)` in raw units.
    pub fn trace_one(&self, order: &[usize]) -> Result<Trace, GainError> {
        if !is_permutation(order, self.n()) {
            return Err(GainError::NotPermutation {
                what: "order",
                n: self.n(),
            });
        }
        Ok(self.trace_raw(order))
    }

    pub(crate) fn trace_raw(&self, order: &[usize]) -> Trace {
        let n = order.len();
        let mut state = GreedyState::new(self.m());
        let mut trace = Trace {
            order: order.to_vec(),
            agents: Vec::with_capacity(n),
            w: Vec::with_capacity(n),
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
            arrival_gain: Vec::with_capacity(n),
        };
        let mut arrived = ItemSet::EMPTY;
        for &item in order {
            trace
                .arrival_gain
                .push(self.gain_raw(item, state.bundles()));
            let before = state.bundles().to_vec();
            let (agent, w) = state.step(&self.values, item);
            arrived.insert(item);
            // only items whose optimal agent is `agent` can lose Gain
            let (mut a, mut b) = (0.0, 0.0);
            for j in 0..n {
                if self.reference.opt_map[j] != agent {
                    continue;
                }
                let drop = self.gain_raw(j, &before) - self.gain_raw(j, state.bundles());
                if arrived.contains(j) {
                    b += drop;
                } else {
                    a += drop;
                }
            }
            trace.agents.push(agent);
            trace.w.push(w);
            trace.a.push(a);
            trace.b.push(b);
        }
        trace
    }
}

/// One greedy pass annotated with `Gain` reductions, in raw (unnormalized) units.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Trace {
    pub order: Vec<usize>,
    pub agents: Vec<usize>,
    /// Welfare increase at each position.
    pub w: Vec<f64>,
    /// Gain lost by items arriving later.
    pub a: Vec<f64>,
    /// Gain lost by items already arrived, the arriving item included.
    pub b: Vec<f64>,
    /// `Gain(π_i, A^{i-1})` of the arriving item.
    pub arrival_gain: Vec<f64>,
}

pub(crate) fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = ItemSet::EMPTY;
    for &x in p {
        if x >= n || seen.contains(x) {
            return false;
        }
        seen.insert(x);
    }
    true
}
