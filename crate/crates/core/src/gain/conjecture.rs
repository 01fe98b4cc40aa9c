//! Copy-versus-move comparison of Greedy's last marginal.
//!
//! For an order `π`, `MG(n+1, π^{Copy,i})` is Greedy's gain from a second
//! copy of `π_i` arriving after all of `π` (zero for the agent already
//! holding it), and `MG(n, π^{Move,i})` is its gain from `π_i` when that item
//! is moved to the end instead. The open question is whether the expected
//! copy total never exceeds the expected move total.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::GainError;
use crate::generate::{random_instance, Family};
use crate::greedy::{greedy_unchecked, GreedyState};
use crate::instance::{Instance, Valuations};
use crate::sweep::{sweep, Moments, SweepMode};

/// Largest `n` for which the exact comparison enumerates all orders.
pub const CONJECTURE_MAX_ITEMS: usize = 7;
/// Relative tolerance for `gap >= 0` and for the move-total cross-check.
pub const CONJECTURE_TOL: f64 = 1e-10;
pub const CROSSCHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub mode: SweepMode,
    pub n: usize,
    pub m: usize,
    pub orders: u64,
    /// `E[Σ_i MG(n+1, π^{Copy,i})]`.
    pub lhs: f64,
    /// `E[Σ_i MG(n, π^{Move,i})]`.
    pub rhs: f64,
    /// `n · E[MG(n, π)]`, which equals `rhs` by symmetry.
    pub rhs_crosscheck: f64,
    pub crosscheck_error: f64,
    /// `rhs - lhs`.
    pub gap: f64,
    /// Whether `gap >= -tol` held; a `false` is a counterexample.
    pub holds: bool,
    pub crosscheck_ok: bool,
}

/// Computes both sides of the comparison for one instance.
pub fn conjecture_check(
    instance: &Instance,
    mode: SweepMode,
) -> Result<ConjectureReport, GainError> {
    let n = instance.n();
    match mode {
        SweepMode::Exact if n > CONJECTURE_MAX_ITEMS => {
            return Err(GainError::ExactTooLarge {
                what: "exact conjecture check",
                n,
                limit: CONJECTURE_MAX_ITEMS,
            })
        }
        SweepMode::MonteCarlo { samples, .. } if samples < 2 => {
            return Err(GainError::TooFewSamples)
        }
        _ => {}
    }
    let values = instance.evaluator();
    let m = values.num_agents();
    let moments = sweep(
        n,
        mode,
        || Moments::new(3),
        |order, acc| {
            let run = greedy_unchecked(&values, order);
            let last = *run.marginals.last().expect("n >= 1");
            let held = run.allocation.bundles();
            let copies: f64 = order
                .iter()
                .map(|&item| {
                    (0..m)
                        .map(|agent| values.marginal(agent, held[agent], item))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum();
            let mut moved = Vec::with_capacity(n);
            let mut moves = 0.0;
            for i in 0..n {
                moved.clear();
                moved.extend_from_slice(&order[..i]);
                moved.extend_from_slice(&order[i + 1..]);
                let mut state = GreedyState::new(m);
                for &item in &moved {
                    state.step(&values, item);
                }
                moves += state.step(&values, order[i]).1;
            }
            acc.push(&[copies, moves, n as f64 * last]);
        },
    );
    let mean = moments.mean();
    let (lhs, rhs, rhs_crosscheck) = (mean[0], mean[1], mean[2]);
    let scale = rhs.abs().max(1.0);
    let gap = rhs - lhs;
    let crosscheck_error = (rhs - rhs_crosscheck).abs();
    Ok(ConjectureReport {
        mode,
        n,
        m,
        orders: moments.count,
        lhs,
        rhs,
        rhs_crosscheck,
        crosscheck_error,
        gap,
        holds: gap >= -CONJECTURE_TOL * scale,
        crosscheck_ok: crosscheck_error <= CROSSCHECK_TOL * scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub index: usize,
    pub report: ConjectureReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub gap: f64,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureScan {
    pub count: usize,
    pub nmax: usize,
    pub mmax: usize,
    pub seed: u64,
    pub min_gap: f64,
    pub min_gap_index: usize,
    pub max_crosscheck_error: f64,
    pub crosscheck_ok: bool,
    pub counterexamples: Vec<Counterexample>,
    pub entries: Vec<ScanEntry>,
}

/// Exact comparison on `count` seeded random instances with
/// `1 <= n <= nmax` items and `1 <= m <= mmax` agents of mixed families.
pub fn conjecture_scan(
    count: usize,
    nmax: usize,
    mmax: usize,
    seed: u64,
) -> Result<ConjectureScan, GainError> {
    if nmax > CONJECTURE_MAX_ITEMS {
        return Err(GainError::ExactTooLarge {
            what: "conjecture scan",
            n: nmax,
            limit: CONJECTURE_MAX_ITEMS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(count);
    let mut counterexamples = Vec::new();
    for index in 0..count {
        let n = rng.gen_range(1..=nmax.max(1));
        let m = rng.gen_range(1..=mmax.max(1));
        let instance =
            random_instance(n, m, Family::Mixed, &mut rng).with_name(format!("scan-{index}"));
        let report = conjecture_check(&instance, SweepMode::Exact)?;
        if !report.holds {
            counterexamples.push(Counterexample {
                index,
                gap: report.gap,
                instance,
            });
        }
        entries.push(ScanEntry { index, report });
    }
    let (min_gap_index, min_gap) =
        entries
            .iter()
            .map(|e| (e.index, e.report.gap))
            .fold(
                (0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            );
    Ok(ConjectureScan {
        count,
        nmax,
        mmax,
        seed,
        min_gap: if entries.is_empty() { 0.0 } else { min_gap },
        min_gap_index,
        max_crosscheck_error: entries
            .iter()
            .map(|e| e.report.crosscheck_error)
            .fold(0.0, f64::max),
        crosscheck_ok: entries.iter().all(|e| e.report.crosscheck_ok),
        counterexamples,
        entries,
    })
}
