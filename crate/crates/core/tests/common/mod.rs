#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swm_core::generate::{random_instance, Family};
use swm_core::{Instance, ItemSet, Valuations};

pub const FAMILIES: [Family; 7] = [
    Family::Coverage,
    Family::Budgeted,
    Family::BMatching,
    Family::Cut,
    Family::Additive,
    Family::Table,
    Family::Mixed,
];

pub fn instance(seed: u64, n: usize, m: usize, family: Family) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(n, m, family, &mut rng)
}

/// A seeded random instance with `n` and `m` drawn from the given ranges.
pub fn arb_instance(
    n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Instance> {
    (any::<u64>(), n, m, 0..FAMILIES.len())
        .prop_map(|(seed, n, m, f)| instance(seed, n, m, FAMILIES[f]))
}

/// Brute-force optimum by recursion over items, independent of the odometer search.
pub fn brute_force_opt(inst: &Instance) -> f64 {
    fn go(inst: &Instance, item: usize, bundles: &mut Vec<ItemSet>) -> f64 {
        if item == inst.n() {
            return (0..inst.m()).map(|l| inst.value(l, bundles[l])).sum();
        }
        let mut best = f64::NEG_INFINITY;
        for l in 0..inst.m() {
            bundles[l].insert(item);
            best = best.max(go(inst, item + 1, bundles));
            bundles[l] = bundles[l].without(item);
        }
        best
    }
    go(inst, 0, &mut vec![ItemSet::EMPTY; inst.m()])
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
