use serde::Serialize;

use crate::instance::{CoreError, Valuations};
use crate::itemset::ItemSet;

/// Per-agent bundles. A plain allocation gives every item to at most one
/// agent; unions of allocations may hand the same item to several agents and
/// are flagged as `multiset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Allocation {
    bundles: Vec<ItemSet>,
    multiset: bool,
}

impl Allocation {
    pub fn empty(m: usize) -> Self {
        Allocation {
            bundles: vec![ItemSet::EMPTY; m],
            multiset: false,
        }
    }

    /// Disjoint bundles; errors if an item appears twice.
    pub fn from_bundles(bundles: Vec<ItemSet>) -> Result<Self, CoreError> {
        let mut seen = ItemSet::EMPTY;
        for b in &bundles {
            if let Some(item) = seen.intersection(*b).iter().next() {
                return Err(CoreError::NotDisjoint { item });
            }
            seen = seen.union(*b);
        }
        Ok(Allocation {
            bundles,
            multiset: false,
        })
    }

    /// `assignment[item] = agent` for every item.
    pub fn from_assignment(m: usize, assignment: &[usize]) -> Result<Self, CoreError> {
        let mut bundles = vec![ItemSet::EMPTY; m];
        for (item, &agent) in assignment.iter().enumerate() {
            if agent >= m {
                return Err(CoreError::AgentMismatch {
                    expected: m,
                    got: agent + 1,
                });
            }
            bundles[agent].insert(item);
        }
        Ok(Allocation {
            bundles,
            multiset: false,
        })
    }

    pub(crate) fn from_parts(bundles: Vec<ItemSet>, multiset: bool) -> Self {
        Allocation { bundles, multiset }
    }

    pub fn bundles(&self) -> &[ItemSet] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> ItemSet {
        self.bundles[agent]
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_multiset(&self) -> bool {
        self.multiset
    }

    /// Items held by at least one agent.
    pub fn allocated(&self) -> ItemSet {
        self.bundles
            .iter()
            .fold(ItemSet::EMPTY, |acc, b| acc.union(*b))
    }

    /// Agent-wise union. A second copy of an item adds nothing to an agent that
    /// already holds it; an item held by two different agents sets `multiset`.
    pub fn union(&self, other: &Allocation) -> Result<Allocation, CoreError> {
        if self.num_agents() != other.num_agents() {
            return Err(CoreError::AgentMismatch {
                expected: self.num_agents(),
                got: other.num_agents(),
            });
        }
        let bundles: Vec<ItemSet> = self
            .bundles
            .iter()
            .zip(&other.bundles)
            .map(|(a, b)| a.union(*b))
            .collect();
        let overlapping = Allocation::from_bundles(bundles.clone()).is_err();
        Ok(Allocation {
            bundles,
            multiset: self.multiset || other.multiset || overlapping,
        })
    }

    /// Per-agent superset test.
    pub fn contains(&self, other: &Allocation) -> bool {
        self.num_agents() == other.num_agents()
            && self
                .bundles
                .iter()
                .zip(&other.bundles)
                .all(|(a, b)| b.is_subset(*a))
    }

    /// Checks agent count and item range against `n` items and `m` agents.
    pub fn validate(&self, n: usize, m: usize) -> Result<(), CoreError> {
        if self.num_agents() != m {
            return Err(CoreError::AgentMismatch {
                expected: m,
                got: self.num_agents(),
            });
        }
        let all = self.allocated();
        if all.span() > n {
            return Err(CoreError::InvalidItem {
                item: all.span() - 1,
                n,
            });
        }
        Ok(())
    }
}

/// `V(A) = Σ_ℓ v_ℓ(A_ℓ)`.
pub fn welfare<V: Valuations + ?Sized>(
    values: &V,
    allocation: &Allocation,
) -> Result<f64, CoreError> {
    allocation.validate(values.num_items(), values.num_agents())?;
    Ok(welfare_unchecked(values, allocation.bundles()))
}

pub(crate) fn welfare_unchecked<V: Valuations + ?Sized>(values: &V, bundles: &[ItemSet]) -> f64 {
    bundles
        .iter()
        .enumerate()
        .map(|(agent, &b)| values.value(agent, b))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::valuations::ValuationOracle;

    fn set(items: &[usize]) -> ItemSet {
        items.iter().collect()
    }

    fn additive_pair() -> Instance {
        Instance::new(
            2,
            vec![
                ValuationOracle::additive(vec![3.0, 2.0]).unwrap(),
                ValuationOracle::additive(vec![2.0, 3.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn welfare_examples() {
        let inst = additive_pair();
        assert_eq!(welfare(&inst, &Allocation::empty(2)).unwrap(), 0.0);
        let split = Allocation::from_bundles(vec![set(&[0]), set(&[1])]).unwrap();
        assert_eq!(welfare(&inst, &split).unwrap(), 6.0);
        let all = Allocation::from_bundles(vec![set(&[0, 1]), ItemSet::EMPTY]).unwrap();
        assert_eq!(welfare(&inst, &all).unwrap(), 5.0);
        assert!(matches!(
            welfare(&inst, &Allocation::empty(3)),
            Err(CoreError::AgentMismatch { .. })
        ));
        let out_of_range = Allocation::from_bundles(vec![set(&[2]), ItemSet::EMPTY]).unwrap();
        assert!(matches!(
            welfare(&inst, &out_of_range),
            Err(CoreError::InvalidItem { item: 2, .. })
        ));
    }

    #[test]
    fn union_semantics() {
        let a = Allocation::from_bundles(vec![set(&[0]), set(&[1])]).unwrap();
        assert_eq!(a.union(&Allocation::empty(2)).unwrap(), a);
        assert_eq!(a.union(&a).unwrap(), a);

        let left = Allocation::from_bundles(vec![set(&[0]), ItemSet::EMPTY]).unwrap();
        let right = Allocation::from_bundles(vec![ItemSet::EMPTY, set(&[0])]).unwrap();
        let u = left.union(&right).unwrap();
        assert_eq!(u.bundles(), &[set(&[0]), set(&[0])]);
        assert!(u.is_multiset());
        assert!(u.contains(&left) && u.contains(&right));
        assert!(left.union(&Allocation::empty(3)).is_err());
    }

    #[test]
    fn disjointness_enforced() {
        assert_eq!(
            Allocation::from_bundles(vec![set(&[0, 1]), set(&[1])]),
            Err(CoreError::NotDisjoint { item: 1 })
        );
    }
}
