//! Offline LP and dual-price solvers.
//!
//! * [`dual_objective`] / [`dual_subgradient`]: evaluators of the empirical
//!   dual, used directly as test oracles.
//! * [`solve_dual_breakpoint`]: exact smallest minimizer for one resource.
//! * [`IncrementalDual`]: the same minimizer over a shrinking order pool.
//! * [`solve_dual_simplex`]: any number of resources, via the bounded simplex.
//! * [`solve_offline_fractional`]: hindsight LP relaxation and its shadow price.

mod breakpoint;
mod objective;
mod offline;
pub mod simplex;

pub use breakpoint::{solve_dual_breakpoint, IncrementalDual};
pub use objective::{accept_decision, dual_objective, dual_subgradient};
pub use offline::{solve_dual_simplex, solve_offline_fractional};

pub(crate) use breakpoint::solve_dual_breakpoint_budget;
pub(crate) use offline::solve_dual_simplex_budget;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("price entry {index} is negative ({value})")]
    NegativePrice { index: usize, value: f64 },
    #[error("budget entry {index} is negative")]
    NegativeBudget { index: usize },
    #[error("average budget must be positive, got {0}")]
    NonPositiveBudget(f64),
    #[error("negative consumption entry")]
    NegativeConsumption,
    #[error("expected {expected} resources, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("no orders supplied")]
    Empty,
    #[error("basis became singular after {pivots} pivots")]
    Singular { pivots: usize },
    #[error("simplex did not terminate after {pivots} pivots")]
    IterationLimit { pivots: usize },
    #[error("primal unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualStatus {
    Optimal,
    /// The optimum is a flat interval; the left end was returned.
    DegenerateTie,
}

/// Dual price with its objective under both scalings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub p: Vec<f64>,
    /// `d·p + (1/N) Σ (u_k − a_kᵀp)⁺`.
    pub objective: f64,
    /// `b·p + Σ (u_k − a_kᵀp)⁺` with `b = N·d`.
    pub scaled_objective: f64,
    pub status: DualStatus,
    pub tie_note: Option<String>,
}

impl DualSolution {
    pub(crate) fn optimal(p: Vec<f64>, objective: f64, scaled_objective: f64) -> Self {
        Self { p, objective, scaled_objective, status: DualStatus::Optimal, tie_note: None }
    }
}

/// Offline fractional solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub dual_price: Vec<f64>,
    /// Number of strictly fractional entries of `x`.
    pub basis_note: usize,
}
