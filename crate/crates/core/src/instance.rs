use serde::Serialize;
use thiserror::Error;

use crate::itemset::ItemSet;
use crate::valuations::{ValuationError, ValuationOracle};

/// Ground sets at or below this size are tabulated before sweeps.
pub const TABULATE_ITEMS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("instance needs at least one {0}")]
    Empty(&'static str),
    #[error("agent {agent} has a valuation over {got} items, expected {expected}")]
    GroundMismatch {
        agent: usize,
        expected: usize,
        got: usize,
    },
    #[error("allocation has {got} agents, instance has {expected}")]
    AgentMismatch { expected: usize, got: usize },
    #[error("item {item} is outside 0..{n}")]
    InvalidItem { item: usize, n: usize },
    #[error("item {item} is assigned to more than one agent")]
    NotDisjoint { item: usize },
    #[error("brute-force optimum needs {agents}^{items} assignments, above the limit of {limit}")]
    TooLarge {
        agents: usize,
        items: usize,
        limit: u64,
    },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// Read access to the agents' valuations.
pub trait Valuations: Sync {
    fn num_items(&self) -> usize;
    fn num_agents(&self) -> usize;
    /// `v_agent(bundle)`; the bundle is assumed to lie in `0..num_items()`.
    fn value(&self, agent: usize, bundle: ItemSet) -> f64;

    fn marginal(&self, agent: usize, bundle: ItemSet, item: usize) -> f64 {
        if bundle.contains(item) {
            0.0
        } else {
            self.value(agent, bundle.with(item)) - self.value(agent, bundle)
        }
    }
}

/// `n` items, `m ≥ 1` agents, one oracle per agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    n: usize,
    oracles: Vec<ValuationOracle>,
    pub name: Option<String>,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn new(n: usize, oracles: Vec<ValuationOracle>) -> Result<Self, CoreError> {
        if n == 0 {
            return Err(CoreError::Empty("item"));
        }
        if oracles.is_empty() {
            return Err(CoreError::Empty("agent"));
        }
        if n > ItemSet::CAPACITY {
            return Err(CoreError::InvalidItem {
                item: n - 1,
                n: ItemSet::CAPACITY,
            });
        }
        for (agent, oracle) in oracles.iter().enumerate() {
            if oracle.ground_size() != n {
                return Err(CoreError::GroundMismatch {
                    agent,
                    expected: n,
                    got: oracle.ground_size(),
                });
            }
        }
        Ok(Instance {
            n,
            oracles,
            name: None,
            seed: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.oracles.len()
    }

    pub fn oracles(&self) -> &[ValuationOracle] {
        &self.oracles
    }

    pub fn items(&self) -> ItemSet {
        ItemSet::full(self.n)
    }

    /// Every agent's values precomputed over all `2^n` bundles.
    pub fn tabulate(&self) -> Result<Tabulated, CoreError> {
        let tables = self
            .oracles
            .iter()
            .map(|o| o.tabulate())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tabulated { n: self.n, tables })
    }

    /// A tabulated evaluator for small ground sets, direct queries otherwise.
    pub fn evaluator(&self) -> Evaluator {
        if self.n <= TABULATE_ITEMS {
            if let Ok(t) = self.tabulate() {
                return Evaluator::Tabulated(t);
            }
        }
        Evaluator::Direct(self.clone())
    }
}

impl Valuations for Instance {
    fn num_items(&self) -> usize {
        self.n
    }

    fn num_agents(&self) -> usize {
        self.oracles.len()
    }

    fn value(&self, agent: usize, bundle: ItemSet) -> f64 {
        self.oracles[agent].eval(bundle)
    }
}

/// Dense per-agent value tables indexed by bundle bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    n: usize,
    tables: Vec<Vec<f64>>,
}

impl Valuations for Tabulated {
    fn num_items(&self) -> usize {
        self.n
    }

    fn num_agents(&self) -> usize {
        self.tables.len()
    }

    #[inline]
    fn value(&self, agent: usize, bundle: ItemSet) -> f64 {
        self.tables[agent][bundle.bits() as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluator {
    Tabulated(Tabulated),
    Direct(Instance),
}

impl Valuations for Evaluator {
    fn num_items(&self) -> usize {
        match self {
            Self::Tabulated(t) => t.num_items(),
            Self::Direct(i) => i.num_items(),
        }
    }

    fn num_agents(&self) -> usize {
        match self {
            Self::Tabulated(t) => t.num_agents(),
            Self::Direct(i) => i.num_agents(),
        }
    }

    #[inline]
    fn value(&self, agent: usize, bundle: ItemSet) -> f64 {
        match self {
            Self::Tabulated(t) => t.value(agent, bundle),
            Self::Direct(i) => i.value(agent, bundle),
        }
    }
}
