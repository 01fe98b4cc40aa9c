//! Brute-force welfare maximization for small instances.

use serde::Serialize;

use crate::allocation::Allocation;
use crate::instance::{CoreError, Valuations};
use crate::itemset::ItemSet;

/// Largest number of full assignments `optimal` will enumerate.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalAllocation {
    pub allocation: Allocation,
    pub value: f64,
    /// `opt_map[j]` is the agent receiving item `j`.
    pub opt_map: Vec<usize>,
}

/// Number of full assignments of `items` items to `agents` agents, if it fits in a `u64`.
pub fn assignment_count(agents: usize, items: usize) -> Option<u64> {
    (agents as u64).checked_pow(u32::try_from(items).ok()?)
}

/// Enumerates all `m^n` full assignments, item 0 least significant, and
/// returns the first one of maximum welfare.
pub fn optimal<V: Valuations + ?Sized>(values: &V) -> Result<OptimalAllocation, CoreError> {
    let n = values.num_items();
    let m = values.num_agents();
    match assignment_count(m, n) {
        Some(count) if count <= MAX_ASSIGNMENTS => {}
        _ => {
            return Err(CoreError::TooLarge {
                agents: m,
                items: n,
                limit: MAX_ASSIGNMENTS,
            })
        }
    }
    let items: Vec<usize> = (0..n).collect();
    let (assignment, value) =
        best_assignment(values, &items, &vec![ItemSet::EMPTY; m], |bundles| {
            bundles
                .iter()
                .enumerate()
                .map(|(agent, &b)| values.value(agent, b))
                .sum()
        });
    let allocation = Allocation::from_assignment(m, &assignment)?;
    Ok(OptimalAllocation {
        allocation,
        value,
        opt_map: assignment,
    })
}

/// Odometer search over assignments of `items` (first entry least
/// significant) added on top of `base`. Returns the first maximizer of
/// `score`, as an agent per entry of `items`, with its score.
pub(crate) fn best_assignment<F>(
    values: &(impl Valuations + ?Sized),
    items: &[usize],
    base: &[ItemSet],
    mut score: F,
) -> (Vec<usize>, f64)
where
    F: FnMut(&[ItemSet]) -> f64,
{
    let m = values.num_agents();
    let mut digits = vec![0usize; items.len()];
    let mut bundles = base.to_vec();
    for &item in items {
        bundles[0].insert(item);
    }
    let mut best = digits.clone();
    let mut best_score = score(&bundles);
    loop {
        // increment the odometer, moving items between bundles as digits change
        let mut pos = 0;
        while pos < items.len() {
            let item = items[pos];
            let from = digits[pos];
            bundles[from] = bundles[from].without(item);
            if from + 1 < m {
                digits[pos] = from + 1;
                bundles[from + 1].insert(item);
                break;
            }
            digits[pos] = 0;
            bundles[0].insert(item);
            pos += 1;
        }
        if pos == items.len() {
            break;
        }
        let s = score(&bundles);
        if s > best_score {
            best_score = s;
            best.clone_from(&digits);
        }
    }
    (best, best_score)
}
