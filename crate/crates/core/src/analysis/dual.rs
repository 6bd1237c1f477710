use super::{mean_stderr, AnalysisError};
use crate::gens::{
    instance_key, population_price, population_price_exact, sample_path, GeneratorSpec, PopulationPrice, REAL_PATH,
};
use crate::lp::{solve_dual_breakpoint, solve_dual_simplex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which population price the empirical prices are compared against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriceReference {
    /// Expectations by closed form or quadrature.
    #[default]
    Exact,
    /// Sample-average approximation with `k` draws per index.
    Saa { k: usize },
}

pub fn population_reference(
    spec: &GeneratorSpec,
    n: usize,
    d0: &[f64],
    reference: PriceReference,
    seed: u64,
) -> Result<PopulationPrice, AnalysisError> {
    Ok(match reference {
        PriceReference::Exact => population_price_exact(spec, n, 0, d0)?,
        PriceReference::Saa { k } => population_price(spec, n, 0, d0, k, seed)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualConvergencePoint {
    pub n: usize,
    pub mse: f64,
    pub stderr: f64,
    pub p_star: Vec<f64>,
    /// `‖p_{0,n}(d0) − p*‖²` per replication.
    pub sq_dists: Vec<f64>,
}

/// Pointwise dual convergence at `j = 0`: the empirical dual price of each
/// replication's real path against the population price.
pub fn dual_convergence_curve(
    spec: &GeneratorSpec,
    n_grid: &[usize],
    d0: &[f64],
    reps: usize,
    seed: u64,
    reference: PriceReference,
) -> Result<Vec<DualConvergencePoint>, AnalysisError> {
    if reps == 0 {
        return Err(AnalysisError::Param("reps must be positive".into()));
    }
    n_grid
        .iter()
        .map(|&n| {
            let p_star = population_reference(spec, n, d0, reference, seed)?.p_star;
            let sq_dists: Vec<f64> = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let orders = sample_path(spec, n, instance_key(seed, n, r).path(REAL_PATH));
                    let sol = if spec.m == 1 { solve_dual_breakpoint(&orders, d0[0]) } else { solve_dual_simplex(&orders, d0) };
                    let p = sol.map_err(|source| AnalysisError::Offline { n, replication: r, source })?.p;
                    Ok(p.iter().zip(&p_star).map(|(a, b)| (a - b).powi(2)).sum())
                })
                .collect::<Result<_, AnalysisError>>()?;
            let (mse, stderr) = mean_stderr(&sq_dists);
            Ok(DualConvergencePoint { n, mse, stderr, p_star, sq_dists })
        })
        .collect()
}
