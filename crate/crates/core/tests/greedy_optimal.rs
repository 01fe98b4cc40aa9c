mod common;

use common::{arb_instance, brute_force_opt, close, permutations};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swm_core::{greedy, optimal, welfare, Allocation, ItemSet, Valuations};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_is_half_competitive_on_every_order(inst in arb_instance(1..=5, 1..=3)) {
        let opt = optimal(&inst).unwrap().value;
        for order in permutations(inst.n()) {
            let run = greedy(&inst, &order).unwrap();
            prop_assert!(run.welfare() >= 0.5 * opt - 1e-12, "order {:?}: {} < {}/2", order, run.welfare(), opt);
        }
    }

    #[test]
    fn marginals_are_prefix_welfare_deltas(inst in arb_instance(1..=8, 1..=4), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..inst.n()).collect();
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let run = greedy(&inst, &order).unwrap();
        let mut cumulative = 0.0;
        for i in 0..=inst.n() {
            let prefix = welfare(&inst, &run.prefix_allocation(i)).unwrap();
            prop_assert!(close(prefix, cumulative, 1e-12), "prefix {}: {} vs {}", i, prefix, cumulative);
            if i < inst.n() {
                prop_assert!(run.marginals[i] >= 0.0);
                cumulative += run.marginals[i];
            }
        }
        // every item is assigned
        prop_assert_eq!(run.allocation.allocated(), inst.items());
        prop_assert!(close(run.welfare(), welfare(&inst, &run.allocation).unwrap(), 1e-12));
    }

    #[test]
    fn optimum_matches_recursive_search(inst in arb_instance(1..=6, 1..=3)) {
        let opt = optimal(&inst).unwrap();
        prop_assert_eq!(opt.value, brute_force_opt(&inst));
        prop_assert_eq!(welfare(&inst, &opt.allocation).unwrap(), opt.value);
        for (j, &agent) in opt.opt_map.iter().enumerate() {
            prop_assert!(opt.allocation.bundle(agent).contains(j));
        }
    }
}

#[test]
fn optimum_beats_random_assignments() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..20 {
        let inst = common::instance(seed, 6, 3, swm_core::generate::Family::Mixed);
        let opt = optimal(&inst).unwrap().value;
        for _ in 0..1000 {
            let assignment: Vec<usize> =
                (0..inst.n()).map(|_| rng.gen_range(0..inst.m())).collect();
            let alloc = Allocation::from_assignment(inst.m(), &assignment).unwrap();
            assert!(welfare(&inst, &alloc).unwrap() <= opt);
        }
    }
}

#[test]
fn repeated_items_use_union_semantics() {
    let inst = common::instance(3, 3, 2, swm_core::generate::Family::Additive);
    let run = greedy(&inst, &[0, 1, 0, 2]).unwrap();
    assert_eq!(run.marginals.len(), 4);
    // the copy goes to the agent with the larger marginal, which is the runner-up for item 0
    let holder = run.agents[0];
    assert_ne!(run.agents[2], holder);
    assert!(run.allocation.is_multiset());
    let other = 1 - holder;
    assert_eq!(
        run.marginals[2],
        inst.value(
            other,
            ItemSet::singleton(0).union(run.prefix_allocation(2).bundle(other))
        ) - inst.value(other, run.prefix_allocation(2).bundle(other))
    );
}
