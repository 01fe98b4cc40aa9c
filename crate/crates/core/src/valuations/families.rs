//! Concrete monotone submodular families.

use serde::Serialize;

use super::axioms::check_dense;
use super::ValuationError;
use crate::itemset::ItemSet;

/// Largest ground set accepted by a lookup table.
pub const MAX_TABLE_ITEMS: usize = 20;
/// Largest ground set on which constructors run exhaustive axiom checks.
pub const EXHAUSTIVE_CHECK_ITEMS: usize = 12;

fn check_weight(what: &str, index: usize, w: f64) -> Result<(), ValuationError> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(ValuationError::InvalidParameter(format!(
            "{what}[{index}] = {w} must be a finite non-negative number"
        )))
    }
}

fn check_ground(n: usize) -> Result<(), ValuationError> {
    if n > ItemSet::CAPACITY {
        return Err(ValuationError::InvalidParameter(format!(
            "ground set of {n} items exceeds the supported maximum of {}",
            ItemSet::CAPACITY
        )));
    }
    Ok(())
}

/// Weighted coverage: each item covers a set of weighted universe elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    universe_weights: Vec<f64>,
    item_sets: Vec<Vec<usize>>,
    #[serde(skip)]
    masks: Vec<Vec<u64>>,
}

impl Coverage {
    pub fn new(
        universe_weights: Vec<f64>,
        item_sets: Vec<Vec<usize>>,
    ) -> Result<Self, ValuationError> {
        check_ground(item_sets.len())?;
        for (i, &w) in universe_weights.iter().enumerate() {
            check_weight("universe_weights", i, w)?;
        }
        let words = universe_weights.len().div_ceil(64);
        let mut masks = Vec::with_capacity(item_sets.len());
        for (item, elements) in item_sets.iter().enumerate() {
            let mut mask = vec![0u64; words];
            for &e in elements {
                if e >= universe_weights.len() {
                    return Err(ValuationError::InvalidParameter(format!(
                        "item_sets[{item}] references element {e} but the universe has {} elements",
                        universe_weights.len()
                    )));
                }
                mask[e / 64] |= 1u64 << (e % 64);
            }
            masks.push(mask);
        }
        Ok(Coverage {
            universe_weights,
            item_sets,
            masks,
        })
    }

    pub fn universe_weights(&self) -> &[f64] {
        &self.universe_weights
    }

    pub fn item_sets(&self) -> &[Vec<usize>] {
        &self.item_sets
    }

    pub fn ground_size(&self) -> usize {
        self.item_sets.len()
    }

    pub fn eval(&self, s: ItemSet) -> f64 {
        let words = self.universe_weights.len().div_ceil(64);
        if words == 1 {
            let covered = s.iter().fold(0u64, |acc, i| acc | self.masks[i][0]);
            return sum_bits(covered, 0, &self.universe_weights);
        }
        let mut covered = vec![0u64; words];
        for i in s {
            for (c, m) in covered.iter_mut().zip(&self.masks[i]) {
                *c |= m;
            }
        }
        covered
            .iter()
            .enumerate()
            .map(|(word, &bits)| sum_bits(bits, word * 64, &self.universe_weights))
            .sum()
    }
}

fn sum_bits(mut bits: u64, offset: usize, weights: &[f64]) -> f64 {
    let mut total = 0.0;
    while bits != 0 {
        total += weights[offset + bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    total
}

/// `min(budget, sum of weights)`; an absent budget gives a plain additive function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetedAdditive {
    budget: Option<f64>,
    weights: Vec<f64>,
}

impl BudgetedAdditive {
    pub fn new(budget: Option<f64>, weights: Vec<f64>) -> Result<Self, ValuationError> {
        check_ground(weights.len())?;
        if let Some(b) = budget {
            check_weight("budget", 0, b)?;
        }
        for (i, &w) in weights.iter().enumerate() {
            check_weight("weights", i, w)?;
        }
        Ok(BudgetedAdditive { budget, weights })
    }

    pub fn budget(&self) -> Option<f64> {
        self.budget
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ground_size(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, s: ItemSet) -> f64 {
        let total: f64 = s.iter().map(|i| self.weights[i]).sum();
        match self.budget {
            Some(b) => total.min(b),
            None => total,
        }
    }
}

/// Free-disposal b-matching: the sum of the `capacity` largest weights in the bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BMatching {
    capacity: usize,
    weights: Vec<f64>,
}

impl BMatching {
    pub fn new(capacity: usize, weights: Vec<f64>) -> Result<Self, ValuationError> {
        check_ground(weights.len())?;
        if capacity == 0 {
            return Err(ValuationError::InvalidParameter(
                "b_matching capacity must be positive".into(),
            ));
        }
        for (i, &w) in weights.iter().enumerate() {
            check_weight("weights", i, w)?;
        }
        Ok(BMatching { capacity, weights })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ground_size(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, s: ItemSet) -> f64 {
        if s.len() <= self.capacity {
            return s.iter().map(|i| self.weights[i]).sum();
        }
        let mut chosen: Vec<f64> = s.iter().map(|i| self.weights[i]).collect();
        chosen.sort_by(|a, b| b.total_cmp(a));
        chosen[..self.capacity].iter().sum()
    }
}

/// An edge of a cut graph. `v = None` attaches the item to the sink, which
/// never belongs to an evaluated set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutEdge {
    pub u: usize,
    pub v: Option<usize>,
    pub weight: f64,
}

/// Undirected cut function of a graph whose vertices are the items plus one
/// sink. `value(S)` is the weight of edges with exactly one endpoint in `S`.
///
/// Such a function is monotone iff every item's sink weight is at least the
/// total weight of its item-item edges; the constructor rejects anything else.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    ground_size: usize,
    edges: Vec<CutEdge>,
    #[serde(skip)]
    sink_weight: Vec<f64>,
}

impl Cut {
    pub fn new(ground_size: usize, edges: Vec<CutEdge>) -> Result<Self, ValuationError> {
        check_ground(ground_size)?;
        let mut sink_weight = vec![0.0; ground_size];
        let mut item_weight = vec![0.0; ground_size];
        for (k, edge) in edges.iter().enumerate() {
            check_weight("edges.weight", k, edge.weight)?;
            let in_range = |x: usize| x < ground_size;
            if !in_range(edge.u) || edge.v.is_some_and(|v| !in_range(v)) {
                return Err(ValuationError::InvalidParameter(format!(
                    "edges[{k}] references an item outside 0..{ground_size}"
                )));
            }
            match edge.v {
                None => sink_weight[edge.u] += edge.weight,
                Some(v) if v == edge.u => {
                    return Err(ValuationError::InvalidParameter(format!(
                        "edges[{k}] is a self-loop on item {v}"
                    )))
                }
                Some(v) => {
                    item_weight[edge.u] += edge.weight;
                    item_weight[v] += edge.weight;
                }
            }
        }
        for item in 0..ground_size {
            if sink_weight[item] < item_weight[item] {
                return Err(ValuationError::NonMonotoneCut {
                    item,
                    sink_weight: sink_weight[item],
                    item_weight: item_weight[item],
                });
            }
        }
        let cut = Cut {
            ground_size,
            edges,
            sink_weight,
        };
        if ground_size <= EXHAUSTIVE_CHECK_ITEMS {
            let values: Vec<f64> = ItemSet::full(ground_size)
                .subsets()
                .map(|s| cut.eval(s))
                .collect();
            if let Some(w) = check_dense(ground_size, &values).monotonicity_witness {
                return Err(ValuationError::AxiomViolation(format!(
                    "cut function is not monotone: {w}"
                )));
            }
        }
        Ok(cut)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn edges(&self) -> &[CutEdge] {
        &self.edges
    }

    pub fn eval(&self, s: ItemSet) -> f64 {
        let mut total: f64 = s.iter().map(|i| self.sink_weight[i]).sum();
        for edge in &self.edges {
            if let Some(v) = edge.v {
                if s.contains(edge.u) != s.contains(v) {
                    total += edge.weight;
                }
            }
        }
        total
    }
}

/// Explicit value table over all `2^n` subsets, indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    ground_size: usize,
    values: Vec<f64>,
}

impl Table {
    /// Builds a table from a dense vector indexed by subset bitmask.
    pub fn from_dense(ground_size: usize, values: Vec<f64>) -> Result<Self, ValuationError> {
        if ground_size > MAX_TABLE_ITEMS {
            return Err(ValuationError::InvalidParameter(format!(
                "table oracles support at most {MAX_TABLE_ITEMS} items, got {ground_size}"
            )));
        }
        if values.len() != 1usize << ground_size {
            return Err(ValuationError::InvalidParameter(format!(
                "table over {ground_size} items needs {} values, got {}",
                1usize << ground_size,
                values.len()
            )));
        }
        for (mask, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(ValuationError::InvalidParameter(format!(
                    "table value for {} is {v}; values must be finite and non-negative",
                    ItemSet::from_bits(mask as u64)
                )));
            }
        }
        if ground_size <= EXHAUSTIVE_CHECK_ITEMS {
            let report = check_dense(ground_size, &values);
            if let Some(msg) = report.first_violation() {
                return Err(ValuationError::AxiomViolation(msg));
            }
        }
        Ok(Table {
            ground_size,
            values,
        })
    }

    /// Builds a table from `(subset, value)` pairs; every subset must appear exactly once.
    pub fn from_entries<I>(ground_size: usize, entries: I) -> Result<Self, ValuationError>
    where
        I: IntoIterator<Item = (ItemSet, f64)>,
    {
        if ground_size > MAX_TABLE_ITEMS {
            return Err(ValuationError::InvalidParameter(format!(
                "table oracles support at most {MAX_TABLE_ITEMS} items, got {ground_size}"
            )));
        }
        let mut values = vec![None; 1usize << ground_size];
        for (set, value) in entries {
            if set.span() > ground_size {
                return Err(ValuationError::InvalidParameter(format!(
                    "table key {set} references items outside 0..{ground_size}"
                )));
            }
            let slot = &mut values[set.bits() as usize];
            if slot.is_some() {
                return Err(ValuationError::InvalidParameter(format!(
                    "table key {set} appears more than once"
                )));
            }
            *slot = Some(value);
        }
        let dense = values
            .into_iter()
            .enumerate()
            .map(|(mask, v)| {
                v.ok_or_else(|| {
                    ValuationError::MissingSubset(ItemSet::from_bits(mask as u64).to_key())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_dense(ground_size, dense)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, s: ItemSet) -> f64 {
        self.values[s.bits() as usize]
    }
}
