//! Factor-revealing linear programs, an embedded simplex solver, and the
//! closed-form optima the solver is checked against.

mod closed_form;
mod families;
mod model;
mod simplex;

pub use closed_form::{
    asymptotic_beta_lambda, closed_form_beta_lambda, closed_form_general,
    combined_secondorder_bound, lambda_threshold, BetaLambdaValue, CombinedBound, GENERAL_LIMIT,
};
pub use families::{
    build_lp_beta, build_lp_beta_lambda, build_lp_general, lambda_positions,
    tight_point_beta_lambda, tight_point_general,
};
pub use model::{Coef, Constraint, LpFamily, LpMeta, LpModel, LpSolution, LpStatus};
pub use simplex::{simplex_solve, PIVOT_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid n = {n}: {reason}")]
    InvalidN { n: usize, reason: &'static str },
    #[error("invalid beta = {0}: must lie in [0, 1]")]
    InvalidBeta(f64),
    #[error("invalid lambda = {lambda} for n = {n}: {reason}")]
    InvalidLambda {
        lambda: f64,
        n: usize,
        reason: &'static str,
    },
    #[error("lambda = {lambda} is at or below the threshold {threshold:.6}; the closed form is not the optimum there")]
    BelowThreshold { lambda: f64, threshold: f64 },
}
