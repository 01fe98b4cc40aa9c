//! JSON instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "n": 2,
//!   "m": 2,
//!   "name": "example",
//!   "agents": [
//!     { "kind": "budgeted_additive", "budget": 1.0, "weights": [1.0, 1.0] },
//!     { "kind": "table", "table": { "": 0, "0": 1, "1": 0, "0,1": 1 } }
//!   ]
//! }
//! ```
//!
//! Every agent's oracle is checked against the axioms on load: exhaustively
//! for `n <= 12`, by random spot checks above that.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{CoreError, Instance};
use crate::itemset::ItemSet;
use crate::valuations::{
    check_axioms, spot_check_axioms, CutEdge, ValuationError, ValuationOracle,
    EXHAUSTIVE_CHECK_ITEMS,
};

pub const FORMAT_VERSION: u32 = 1;
/// Samples used by the load-time spot check on large ground sets.
pub const LOAD_SPOT_CHECK_SAMPLES: usize = 20_000;

#[derive(Debug, Error)]
pub enum InstanceFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed instance at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid instance at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> InstanceFileError {
    InstanceFileError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub agents: Vec<AgentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AgentSpec {
    Coverage {
        universe_weights: Vec<f64>,
        item_sets: Vec<Vec<usize>>,
    },
    /// A missing budget means plain additive.
    BudgetedAdditive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<f64>,
        weights: Vec<f64>,
    },
    BMatching {
        capacity: usize,
        weights: Vec<f64>,
    },
    /// `v = null` connects `u` to the sink.
    Cut {
        edges: Vec<EdgeSpec>,
    },
    Table {
        table: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: Option<usize>,
    pub weight: f64,
}

impl AgentSpec {
    fn field_len(&self) -> Option<(&'static str, usize)> {
        match self {
            AgentSpec::Coverage { item_sets, .. } => Some(("item_sets", item_sets.len())),
            AgentSpec::BudgetedAdditive { weights, .. } | AgentSpec::BMatching { weights, .. } => {
                Some(("weights", weights.len()))
            }
            AgentSpec::Cut { .. } | AgentSpec::Table { .. } => None,
        }
    }

    fn build(&self, n: usize, path: &str) -> Result<ValuationOracle, InstanceFileError> {
        if let Some((field, len)) = self.field_len() {
            if len != n {
                return Err(invalid(
                    format!("{path}.{field}"),
                    format!("has {len} entries but the instance has n = {n} items"),
                ));
            }
        }
        let built = match self {
            AgentSpec::Coverage {
                universe_weights,
                item_sets,
            } => ValuationOracle::coverage(universe_weights.clone(), item_sets.clone()),
            AgentSpec::BudgetedAdditive { budget, weights } => match budget {
                Some(b) => ValuationOracle::budgeted_additive(*b, weights.clone()),
                None => ValuationOracle::additive(weights.clone()),
            },
            AgentSpec::BMatching { capacity, weights } => {
                ValuationOracle::b_matching(*capacity, weights.clone())
            }
            AgentSpec::Cut { edges } => ValuationOracle::cut(
                n,
                edges
                    .iter()
                    .map(|e| CutEdge {
                        u: e.u,
                        v: e.v,
                        weight: e.weight,
                    })
                    .collect(),
            ),
            AgentSpec::Table { table } => {
                let mut entries = Vec::with_capacity(table.len());
                for (key, &value) in table {
                    let set = ItemSet::parse_key(key)
                        .map_err(|msg| invalid(format!("{path}.table[{key:?}]"), msg))?;
                    entries.push((set, value));
                }
                ValuationOracle::table(n, entries)
            }
        };
        built.map_err(|e| invalid(path, e.to_string()))
    }

    /// The file form of an oracle.
    pub fn from_oracle(oracle: &ValuationOracle) -> Self {
        match oracle {
            ValuationOracle::Coverage(c) => AgentSpec::Coverage {
                universe_weights: c.universe_weights().to_vec(),
                item_sets: c.item_sets().to_vec(),
            },
            ValuationOracle::BudgetedAdditive(b) => AgentSpec::BudgetedAdditive {
                budget: b.budget(),
                weights: b.weights().to_vec(),
            },
            ValuationOracle::BMatching(b) => AgentSpec::BMatching {
                capacity: b.capacity(),
                weights: b.weights().to_vec(),
            },
            ValuationOracle::Cut(c) => AgentSpec::Cut {
                edges: c
                    .edges()
                    .iter()
                    .map(|e| EdgeSpec {
                        u: e.u,
                        v: e.v,
                        weight: e.weight,
                    })
                    .collect(),
            },
            ValuationOracle::Table(t) => AgentSpec::Table {
                table: t
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(mask, &v)| (ItemSet::from_bits(mask as u64).to_key(), v))
                    .collect(),
            },
        }
    }
}

fn check_oracle(oracle: &ValuationOracle, path: &str) -> Result<(), InstanceFileError> {
    if oracle.ground_size() <= EXHAUSTIVE_CHECK_ITEMS {
        let report = check_axioms(oracle).map_err(|e| invalid(path, e.to_string()))?;
        if let Some(msg) = report.first_violation() {
            return Err(invalid(
                path,
                ValuationError::AxiomViolation(msg).to_string(),
            ));
        }
    } else {
        let report = spot_check_axioms(oracle, LOAD_SPOT_CHECK_SAMPLES, 0);
        if let Some(v) = report.empty_value {
            return Err(invalid(
                path,
                format!("value of the empty set is {v}, expected 0"),
            ));
        }
        if let Some(w) = &report.monotonicity_witness {
            return Err(invalid(path, format!("not monotone: {w}")));
        }
        if let Some(w) = &report.submodularity_witness {
            return Err(invalid(path, format!("not submodular: {w}")));
        }
    }
    Ok(())
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            n: instance.n(),
            m: instance.m(),
            name: instance.name.clone(),
            seed: instance.seed,
            agents: instance
                .oracles()
                .iter()
                .map(AgentSpec::from_oracle)
                .collect(),
        }
    }

    /// Validates the file and builds the instance.
    pub fn into_instance(self) -> Result<Instance, InstanceFileError> {
        if self.version != FORMAT_VERSION {
            return Err(invalid(
                "version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    self.version
                ),
            ));
        }
        if self.n == 0 || self.n > ItemSet::CAPACITY {
            return Err(invalid(
                "n",
                format!("must lie in 1..={}", ItemSet::CAPACITY),
            ));
        }
        if self.m != self.agents.len() {
            return Err(invalid(
                "m",
                format!("is {} but {} agents are listed", self.m, self.agents.len()),
            ));
        }
        let mut oracles = Vec::with_capacity(self.agents.len());
        for (k, spec) in self.agents.iter().enumerate() {
            let path = format!("agents[{k}]");
            let oracle = spec.build(self.n, &path)?;
            check_oracle(&oracle, &path)?;
            oracles.push(oracle);
        }
        let mut instance = Instance::new(self.n, oracles)
            .map_err(|e: CoreError| invalid("agents", e.to_string()))?;
        instance.name = self.name;
        instance.seed = self.seed;
        Ok(instance)
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceFileError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| InstanceFileError::Parse {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// Parses and validates an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceFileError> {
    InstanceFile::from_json(text)?.into_instance()
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| InstanceFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

pub fn instance_to_json(instance: &Instance) -> String {
    InstanceFile::from_instance(instance).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;

    const OR_INDICATOR: &str = r#"{
        "version": 1, "n": 2, "m": 2, "name": "or-indicator",
        "agents": [
            { "kind": "budgeted_additive", "budget": 1, "weights": [1, 1] },
            { "kind": "table", "table": { "": 0, "0": 1, "1": 0, "0,1": 1 } }
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let inst = parse_instance(OR_INDICATOR).unwrap();
        assert_eq!((inst.n(), inst.m()), (2, 2));
        assert_eq!(inst.name.as_deref(), Some("or-indicator"));
        assert_eq!(inst.oracles()[1].eval(ItemSet::singleton(1)), 0.0);
        let again = parse_instance(&instance_to_json(&inst)).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn errors_carry_paths() {
        let bad = OR_INDICATOR.replace("\"weights\": [1, 1]", "\"weights\": [1, \"x\"]");
        match parse_instance(&bad) {
            Err(InstanceFileError::Parse { path, .. }) => assert_eq!(path, "agents[0]"),
            other => panic!("{other:?}"),
        }
        let short = OR_INDICATOR.replace("[1, 1]", "[1]");
        match parse_instance(&short) {
            Err(InstanceFileError::Invalid { path, .. }) => assert_eq!(path, "agents[0].weights"),
            other => panic!("{other:?}"),
        }
        let missing = OR_INDICATOR.replace("\"1\": 0, ", "");
        match parse_instance(&missing) {
            Err(InstanceFileError::Invalid { path, message }) => {
                assert_eq!(path, "agents[1]");
                assert!(message.contains("missing subset"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_submodular_table() {
        let text = OR_INDICATOR.replace("\"0,1\": 1", "\"0,1\": 3");
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("agents[1]"), "{err}");
    }

    #[test]
    fn rejects_count_mismatch_and_version() {
        assert!(parse_instance(&OR_INDICATOR.replace("\"m\": 2", "\"m\": 3")).is_err());
        assert!(parse_instance(&OR_INDICATOR.replace("\"version\": 1", "\"version\": 2")).is_err());
    }
}
