//! Online submodular welfare maximization: valuation oracles, the Greedy
//! allocator under random arrival order, the per-item Gain bookkeeping used
//! to analyse it, and the factor-revealing linear programs.

pub mod allocation;
pub mod gain;
pub mod generate;
pub mod greedy;
pub mod instance;
pub mod instance_file;
pub mod itemset;
pub mod lp;
pub mod optimal;
pub mod sweep;
pub mod valuations;

pub use allocation::{welfare, Allocation};
pub use gain::{GainContext, GainError, GainTrace};
pub use greedy::{greedy, GreedyRun, GreedyState};
pub use instance::{CoreError, Evaluator, Instance, Tabulated, Valuations};
pub use instance_file::{load_instance, parse_instance, InstanceFile, InstanceFileError};
pub use itemset::ItemSet;
pub use optimal::{optimal, OptimalAllocation};
pub use sweep::SweepMode;
pub use valuations::{ValuationError, ValuationOracle};
