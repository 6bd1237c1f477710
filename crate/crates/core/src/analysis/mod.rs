//! Monte Carlo estimators: regret, pointwise dual convergence, state
//! tracking against the δ-path, scaling fits and the one-step drift probe.
//!
//! Replications run on the ambient rayon pool and are gathered in
//! replication order, so results never depend on the number of threads.

mod deviation;
mod dual;
mod fit;
mod probe;
mod regret;

pub use deviation::{exit_margin, state_deviation_paths, DeviationReport, DeviationRow, ExitStats};
pub use dual::{dual_convergence_curve, population_reference, DualConvergencePoint, PriceReference};
pub use fit::{fit_points, fit_scaling, FitModel, FitResult};
pub use probe::{z_field_probe, ProbePrice, ZEstimate};
pub use regret::{estimate_regret, estimate_regret_crn, RegretEstimate, ReplicationRecord};

use crate::algos::AlgoError;
use crate::gens::GenError;
use crate::lp::LpError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid analysis parameter: {0}")]
    Param(String),
    #[error("policy failed (n={n}, replication {replication}): {source}")]
    Policy { n: usize, replication: u64, source: AlgoError },
    #[error("offline solve failed (n={n}, replication {replication}): {source}")]
    Offline { n: usize, replication: u64, source: LpError },
    #[error(transparent)]
    Generator(#[from] GenError),
}

/// Mean and standard error (`sd/√k`, zero for a single value).
pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
