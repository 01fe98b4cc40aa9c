use std::collections::BTreeMap;

use num_rational::Ratio;
use proptest::prelude::*;
use swm_core::lp::*;

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

/// Rows keyed by name; each row is `(variable name -> coefficient, rhs)`.
type Rows = BTreeMap<String, (BTreeMap<String, Q>, Q)>;

fn rows_of(model: &LpModel) -> Rows {
    model
        .constraints
        .iter()
        .map(|c| {
            let coefs = c
                .coefs
                .iter()
                .map(|(j, k)| {
                    (
                        model.var_names[*j].clone(),
                        k.exact.expect("exact coefficient"),
                    )
                })
                .collect();
            (c.name.clone(), (coefs, c.rhs.exact.expect("exact rhs")))
        })
        .collect()
}

/// Second, independent construction of the `β` program from its four row families.
fn regenerate_beta(n: i64, beta: Q) -> Rows {
    let mut rows = Rows::new();
    let v = |p: &str, i: i64| format!("{p}{i}");
    for i in 1..=n {
        let row = [
            (v("w", i), q(1, 1)),
            (v("a", i), q(-1, 1)),
            (v("b", i), q(-1, 1)),
        ];
        rows.insert(format!("c1_{i}"), (row.into_iter().collect(), q(0, 1)));
    }
    for i in 1..=n {
        let mut row: BTreeMap<String, Q> = (1..i).map(|j| (v("a", j), q(1, n - j))).collect();
        row.insert(v("w", i), q(1, 1));
        rows.insert(format!("c2_{i}"), (row, q(1, n)));
    }
    for i in n / 2 + 1..=n {
        let mut row = BTreeMap::new();
        row.insert(v("w", i), q(1, 1));
        row.insert(v("g", i), q(1, 1));
        for j in 1..=n / 2 {
            row.insert(v("a", j), -q(2 * j, n * (n - j)));
            row.insert(v("b", j), q(2, n));
        }
        rows.insert(format!("c3_{i}"), (row, q(0, 1)));
    }
    let mut row: BTreeMap<String, Q> = (1..=n / 2).map(|i| (v("b", i), q(-1, 1))).collect();
    row.extend((n / 2 + 1..=n).map(|i| (v("g", i), q(-1, 1))));
    rows.insert("c4".into(), (row, -beta));
    rows
}

#[test]
fn beta_program_matches_independent_regeneration() {
    for n in [4i64, 8, 12, 16] {
        for (beta, exact) in [(0.0, q(0, 1)), (0.25, q(1, 4)), (0.02, q(1, 50))] {
            let model = build_lp_beta(n as usize, beta).unwrap();
            assert_eq!(
                rows_of(&model),
                regenerate_beta(n, exact),
                "n = {n}, beta = {beta}"
            );
            assert_eq!(model.num_vars(), (3 * n + n / 2) as usize);
            let obj: Vec<&str> = model
                .objective
                .iter()
                .zip(&model.var_names)
                .filter(|(c, _)| !c.is_zero())
                .map(|(_, name)| name.as_str())
                .collect();
            assert_eq!(obj, (1..=n).map(|i| format!("w{i}")).collect::<Vec<_>>());
        }
    }
}

#[test]
fn beta_lambda_rows_are_a_subset_of_beta_rows() {
    for (n, lambda) in [(8, 0.75), (8, 1.0), (16, 13.0 / 16.0), (16, 0.5)] {
        let full = rows_of(&build_lp_beta(n, 0.01).unwrap());
        let relaxed = rows_of(&build_lp_beta_lambda(n, lambda, 0.01).unwrap());
        for (name, row) in &relaxed {
            assert_eq!(
                full.get(name),
                Some(row),
                "n = {n}, lambda = {lambda}, row {name}"
            );
        }
        let k = (lambda * n as f64) as usize;
        assert!(relaxed
            .keys()
            .all(|r| !r.starts_with("c2_") || r[3..].parse::<usize>().unwrap() <= k));
        assert!(relaxed
            .keys()
            .all(|r| !r.starts_with("c3_") || r[3..].parse::<usize>().unwrap() > k));
    }
}

#[test]
fn solver_matches_beta_lambda_closed_form() {
    for n in [8usize, 16, 32] {
        for lambda in [13.0 / 16.0, 7.0 / 8.0] {
            if lambda_positions(n, lambda).is_err() {
                continue;
            }
            for beta in [0.0, 0.01, 0.02, 0.05, 0.2] {
                let model = build_lp_beta_lambda(n, lambda, beta).unwrap();
                let sol = simplex_solve(&model);
                assert!(sol.is_optimal());
                assert!(sol.max_violation <= 1e-9);
                assert!(sol.primal.iter().all(|&x| x >= -1e-12));
                let cf = closed_form_beta_lambda(n, lambda, beta).unwrap();
                assert!(
                    (sol.objective - cf.exact).abs() <= 1e-8,
                    "n={n} l={lambda} b={beta}"
                );
                let tight = tight_point_beta_lambda(n, lambda, beta).unwrap();
                assert!(model.max_violation(&tight) <= 1e-12);
                assert!((model.evaluate(&tight) - sol.objective).abs() <= 1e-9);
            }
        }
    }
}

/// Head of the closed form from the recursion `w_i = 1/n - Σ_{j<i} w_j/(n-j)`.
fn recursion_head(n: i64, k: i64) -> Q {
    let mut w: Vec<Q> = Vec::new();
    for _ in 1..=k {
        let prior: Q = w
            .iter()
            .enumerate()
            .map(|(j, &x)| x / (n - (j as i64 + 1)))
            .sum();
        w.push(q(1, n) - prior);
    }
    w.into_iter().sum()
}

#[test]
fn closed_form_head_agrees_with_recursion() {
    assert_eq!(recursion_head(16, 13), q(117, 240));
    for (n, k) in [(16, 13), (16, 14), (32, 26), (32, 28), (8, 7)] {
        let head = recursion_head(n, k);
        let cf = closed_form_beta_lambda(n as usize, k as f64 / n as f64, 1.0).unwrap();
        // with β = 1 the tail is fully absorbed, leaving only the head
        assert!((cf.exact - *head.numer() as f64 / *head.denom() as f64).abs() < 1e-15);
    }
}

#[test]
fn optimum_is_non_increasing_in_beta_and_relaxation_is_lower() {
    for n in [8usize, 16] {
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let beta = k as f64 * 0.01;
            let full = simplex_solve(&build_lp_beta(n, beta).unwrap());
            assert!(full.is_optimal());
            assert!(full.objective <= last + 1e-12);
            last = full.objective;
            for lambda in [0.75, 7.0 / 8.0, 1.0] {
                let relaxed = simplex_solve(&build_lp_beta_lambda(n, lambda, beta).unwrap());
                assert!(relaxed.objective <= full.objective + 1e-9);
            }
        }
    }
}

#[test]
fn general_program_tight_point_and_solver_gap() {
    for n in [8usize, 16, 32] {
        let model = build_lp_general(n).unwrap();
        let tight = tight_point_general(n).unwrap();
        let cf = closed_form_general(n).unwrap();
        assert!(model.max_violation(&tight) <= 1e-12);
        assert!((model.evaluate(&tight) - cf).abs() <= 1e-12);
        let sol = simplex_solve(&model);
        assert!(sol.is_optimal() && sol.max_violation <= 1e-9);
        // moving the last a into its b stays feasible and is strictly cheaper
        let tq = 3 * n / 4;
        let mut moved = tight.clone();
        moved[2 * tq - 1] = moved[tq - 1];
        moved[tq - 1] = 0.0;
        assert!(model.max_violation(&moved) <= 1e-12);
        let saving = tight[tq - 1] / 6.0;
        assert!((model.evaluate(&moved) - (cf - saving)).abs() <= 1e-12);
        assert!(sol.objective <= model.evaluate(&moved) + 1e-12);
    }
    assert!((closed_form_general(400).unwrap() - GENERAL_LIMIT).abs() < 5e-4);
}

#[test]
fn combined_bound_and_threshold() {
    let c = combined_secondorder_bound();
    assert!((c.value - 0.5104).abs() <= 1e-12);
    assert!((c.beta - 2.0 * 0.0312 / 3.0).abs() <= 1e-12);
    assert!(((0.5 + c.beta / 2.0) - (0.5312 - c.beta)).abs() <= 1e-12);
    assert!((asymptotic_beta_lambda(0.754, 0.0).unwrap() - 0.53124).abs() <= 5e-5);
    assert!(matches!(
        closed_form_beta_lambda(8, 0.75, 0.0),
        Err(LpError::BelowThreshold { .. })
    ));
}

proptest! {
    #[test]
    fn exact_closed_form_dominates_asymptotic(e in 2usize..6, k in 0usize..64, beta in 0.0f64..0.1) {
        let n = 1usize << e;
        let k = n - k % (n / 4 + 1);
        let lambda = k as f64 / n as f64;
        prop_assume!(lambda > lambda_threshold());
        let cf = closed_form_beta_lambda(n, lambda, beta).unwrap();
        prop_assert!(cf.exact >= cf.asymptotic - 1e-12);
    }

    #[test]
    fn listings_round_trip_row_count(e in 2usize..5, beta in 0.0f64..1.0) {
        let n = 1usize << e;
        let model = build_lp_beta(n, beta).unwrap();
        let listing = model.to_listing();
        let rows = listing.lines().filter(|l| l.contains(">=") && !l.contains("all variables")).count();
        prop_assert_eq!(rows, model.num_constraints());
    }
}
