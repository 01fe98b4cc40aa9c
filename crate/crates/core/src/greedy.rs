//! The online Greedy allocator: each arriving item goes to the agent with the
//! largest marginal gain, ties broken towards the lowest agent index.

use serde::Serialize;

use crate::allocation::Allocation;
use crate::instance::{CoreError, Valuations};
use crate::itemset::ItemSet;

/// Incremental greedy allocation, one item at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyState {
    bundles: Vec<ItemSet>,
    multiset: bool,
}

impl GreedyState {
    pub fn new(m: usize) -> Self {
        GreedyState {
            bundles: vec![ItemSet::EMPTY; m],
            multiset: false,
        }
    }

    pub fn from_bundles(bundles: Vec<ItemSet>) -> Self {
        GreedyState {
            bundles,
            multiset: false,
        }
    }

    /// Assigns `item`, returning the chosen agent and its marginal gain.
    /// Every item is assigned, even at zero gain.
    pub fn step<V: Valuations + ?Sized>(&mut self, values: &V, item: usize) -> (usize, f64) {
        let mut best_agent = 0;
        let mut best_gain = f64::NEG_INFINITY;
        for (agent, &bundle) in self.bundles.iter().enumerate() {
            let gain = values.marginal(agent, bundle, item);
            if gain > best_gain {
                best_gain = gain;
                best_agent = agent;
            }
        }
        if !self.bundles[best_agent].contains(item) && self.bundles.iter().any(|b| b.contains(item))
        {
            self.multiset = true;
        }
        self.bundles[best_agent].insert(item);
        (best_agent, best_gain)
    }

    pub fn bundles(&self) -> &[ItemSet] {
        &self.bundles
    }

    pub fn into_allocation(self) -> Allocation {
        Allocation::from_parts(self.bundles, self.multiset)
    }
}

/// A full greedy pass over an arrival sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyRun {
    pub order: Vec<usize>,
    /// Agent chosen at each position.
    pub agents: Vec<usize>,
    /// Welfare increase at each position.
    pub marginals: Vec<f64>,
    pub allocation: Allocation,
}

impl GreedyRun {
    pub fn welfare(&self) -> f64 {
        self.marginals.iter().sum()
    }

    /// Greedy's allocation after the first `i` arrivals.
    pub fn prefix_allocation(&self, i: usize) -> Allocation {
        let m = self.allocation.num_agents();
        let mut state = GreedyState::new(m);
        for (&item, &agent) in self.order[..i].iter().zip(&self.agents) {
            if !state.bundles[agent].contains(item)
                && state.bundles.iter().any(|b| b.contains(item))
            {
                state.multiset = true;
            }
            state.bundles[agent].insert(item);
        }
        state.into_allocation()
    }
}

/// Runs Greedy over `order`. Repeated items are allowed: a copy adds nothing
/// to an agent that already holds the item but may go to a different agent.
pub fn greedy<V: Valuations + ?Sized>(values: &V, order: &[usize]) -> Result<GreedyRun, CoreError> {
    let n = values.num_items();
    if let Some(&item) = order.iter().find(|&&i| i >= n) {
        return Err(CoreError::InvalidItem { item, n });
    }
    Ok(greedy_unchecked(values, order))
}

pub(crate) fn greedy_unchecked<V: Valuations + ?Sized>(values: &V, order: &[usize]) -> GreedyRun {
    let mut state = GreedyState::new(values.num_agents());
    let mut agents = Vec::with_capacity(order.len());
    let mut marginals = Vec::with_capacity(order.len());
    for &item in order {
        let (agent, gain) = state.step(values, item);
        agents.push(agent);
        marginals.push(gain);
    }
    GreedyRun {
        order: order.to_vec(),
        agents,
        marginals,
        allocation: state.into_allocation(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::welfare;
    use crate::instance::Instance;
    use crate::valuations::ValuationOracle;

    fn set(items: &[usize]) -> ItemSet {
        items.iter().collect()
    }

    /// Agent 0: OR over {0, 1}. Agent 1: indicator of item 0.
    fn or_indicator() -> Instance {
        let or = ValuationOracle::table(
            2,
            [
                (ItemSet::EMPTY, 0.0),
                (set(&[0]), 1.0),
                (set(&[1]), 1.0),
                (set(&[0, 1]), 1.0),
            ],
        )
        .unwrap();
        let indicator = ValuationOracle::table(
            2,
            [
                (ItemSet::EMPTY, 0.0),
                (set(&[0]), 1.0),
                (set(&[1]), 0.0),
                (set(&[0, 1]), 1.0),
            ],
        )
        .unwrap();
        Instance::new(2, vec![or, indicator]).unwrap()
    }

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::new(
            3,
            vec![ValuationOracle::budgeted_additive(4.0, vec![1.0, 2.0, 3.0]).unwrap()],
        )
        .unwrap();
        let run = greedy(&inst, &[2, 0, 1]).unwrap();
        assert_eq!(run.agents, vec![0, 0, 0]);
        assert_eq!(run.welfare(), 4.0);
        assert_eq!(run.allocation.bundle(0), set(&[0, 1, 2]));
    }

    #[test]
    fn or_indicator_traces() {
        let inst = or_indicator();
        let forward = greedy(&inst, &[0, 1]).unwrap();
        assert_eq!(forward.agents, vec![0, 0]);
        assert_eq!(forward.marginals, vec![1.0, 0.0]);
        assert_eq!(forward.welfare(), 1.0);

        let backward = greedy(&inst, &[1, 0]).unwrap();
        assert_eq!(backward.agents, vec![0, 1]);
        assert_eq!(backward.marginals, vec![1.0, 1.0]);
        assert_eq!(backward.welfare(), 2.0);
    }

    #[test]
    fn prefix_allocations_reproduce_cumulative_marginals() {
        let inst = or_indicator();
        let run = greedy(&inst, &[1, 0]).unwrap();
        let mut cumulative = 0.0;
        for i in 0..=2 {
            let w = welfare(&inst, &run.prefix_allocation(i)).unwrap();
            assert_eq!(w, cumulative);
            if i < 2 {
                cumulative += run.marginals[i];
            }
        }
    }

    #[test]
    fn repeated_items_follow_union_semantics() {
        let inst = Instance::new(
            1,
            vec![
                ValuationOracle::additive(vec![2.0]).unwrap(),
                ValuationOracle::additive(vec![1.0]).unwrap(),
            ],
        )
        .unwrap();
        let run = greedy(&inst, &[0, 0, 0]).unwrap();
        assert_eq!(run.agents, vec![0, 1, 0]);
        assert_eq!(run.marginals, vec![2.0, 1.0, 0.0]);
        assert!(run.allocation.is_multiset());
        assert!(run.prefix_allocation(2).is_multiset());
        assert!(!run.prefix_allocation(1).is_multiset());
    }

    #[test]
    fn invalid_sequence_element() {
        let inst = or_indicator();
        assert_eq!(
            greedy(&inst, &[0, 2]).unwrap_err(),
            CoreError::InvalidItem { item: 2, n: 2 }
        );
    }
}
