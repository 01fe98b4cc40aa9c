//! Seeded random instances with small integer weights, so that welfare sums
//! are exact in floating point.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::itemset::ItemSet;
use crate::valuations::{CutEdge, ValuationOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Coverage,
    Budgeted,
    BMatching,
    Cut,
    Additive,
    /// Tabulated sum of a coverage and a budgeted-additive valuation.
    Table,
    /// Each agent draws one of the families above.
    Mixed,
}

impl Family {
    pub const CONCRETE: [Family; 6] = [
        Family::Coverage,
        Family::Budgeted,
        Family::BMatching,
        Family::Cut,
        Family::Additive,
        Family::Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Coverage => "coverage",
            Family::Budgeted => "budgeted",
            Family::BMatching => "b-matching",
            Family::Cut => "cut",
            Family::Additive => "additive",
            Family::Table => "table",
            Family::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::CONCRETE
            .into_iter()
            .chain([Family::Mixed])
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

/// A random monotone submodular valuation over `n` items with `v(N) > 0`.
pub fn random_oracle<R: Rng + ?Sized>(n: usize, family: Family, rng: &mut R) -> ValuationOracle {
    let oracle = match family {
        Family::Coverage => random_coverage(n, rng),
        Family::Budgeted => random_budgeted(n, rng),
        Family::BMatching => {
            let capacity = rng.gen_range(1..=n.div_ceil(2));
            ValuationOracle::b_matching(capacity, int_weights(n, 1..=10, rng))
        }
        Family::Cut => random_cut(n, rng),
        Family::Additive => ValuationOracle::additive(int_weights(n, 1..=10, rng)),
        Family::Table => {
            let cov = random_coverage(n, rng).expect("valid coverage");
            let bud = random_budgeted(n, rng).expect("valid budgeted");
            let dense = ItemSet::full(n)
                .subsets()
                .map(|s| cov.eval(s) + bud.eval(s))
                .collect();
            ValuationOracle::table_from_dense(n, dense)
        }
        Family::Mixed => {
            let pick = *Family::CONCRETE.choose(rng).expect("nonempty");
            return random_oracle(n, pick, rng);
        }
    };
    oracle.expect("generated valuations satisfy the axioms")
}

pub fn random_instance<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    family: Family,
    rng: &mut R,
) -> Instance {
    let oracles = (0..m).map(|_| random_oracle(n, family, rng)).collect();
    Instance::new(n, oracles).expect("generated oracles share the ground set")
}

fn int_weights<R: Rng + ?Sized>(
    n: usize,
    range: std::ops::RangeInclusive<u32>,
    rng: &mut R,
) -> Vec<f64> {
    (0..n)
        .map(|_| f64::from(rng.gen_range(range.clone())))
        .collect()
}

fn random_coverage<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<ValuationOracle, crate::valuations::ValuationError> {
    let universe = rng.gen_range(2..=n + 2);
    let weights = int_weights(universe, 1..=5, rng);
    let sets = (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..universe).filter(|_| rng.gen_bool(0.4)).collect();
            if s.is_empty() {
                s.push(rng.gen_range(0..universe));
            }
            s
        })
        .collect();
    ValuationOracle::coverage(weights, sets)
}

fn random_budgeted<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<ValuationOracle, crate::valuations::ValuationError> {
    let weights = int_weights(n, 1..=10, rng);
    let total = weights.iter().sum::<f64>() as u32;
    let top = weights.iter().cloned().fold(0.0, f64::max) as u32;
    let budget = f64::from(rng.gen_range(top..=total));
    ValuationOracle::budgeted_additive(budget, weights)
}

fn random_cut<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<ValuationOracle, crate::valuations::ValuationError> {
    let mut edges = Vec::new();
    let mut incident = vec![0u32; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.4) {
                let w = rng.gen_range(1..=3);
                incident[u] += w;
                incident[v] += w;
                edges.push(CutEdge {
                    u,
                    v: Some(v),
                    weight: f64::from(w),
                });
            }
        }
    }
    for (u, &inc) in incident.iter().enumerate() {
        edges.push(CutEdge {
            u,
            v: None,
            weight: f64::from(inc + rng.gen_range(1..=3)),
        });
    }
    ValuationOracle::cut(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuations::check_axioms;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_family_yields_valid_positive_valuations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in Family::CONCRETE.into_iter().chain([Family::Mixed]) {
            for n in 1..=6 {
                let oracle = random_oracle(n, family, &mut rng);
                assert!(check_axioms(&oracle).unwrap().passed(), "{family} n={n}");
                assert!(oracle.eval(ItemSet::full(n)) > 0.0);
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for family in Family::CONCRETE.into_iter().chain([Family::Mixed]) {
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_instance(5, 3, Family::Mixed, &mut ChaCha8Rng::seed_from_u64(11));
        let b = random_instance(5, 3, Family::Mixed, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }
}
