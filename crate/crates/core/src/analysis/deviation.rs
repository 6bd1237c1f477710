use super::dual::{population_reference, PriceReference};
use super::{mean_stderr, AnalysisError};
use crate::algos::{run_policy, PolicySpec};
use crate::gens::{delta_path, sample_instance_rep, GeneratorSpec};
use crate::types::{RunRecord, Trajectory};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitStats {
    pub n: usize,
    pub eps_d: f64,
    /// Mean of `n − τ̂` over replications.
    pub mean_exit_margin: f64,
    pub stderr: f64,
    /// Bucket 0 counts margin 0; bucket `k ≥ 1` counts margins in `[2^(k−1), 2^k)`.
    pub exit_histogram: Vec<usize>,
    pub margins: Vec<usize>,
    pub proxy_note: String,
}

/// One row of `state_deviation.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub n: usize,
    pub replication: u64,
    pub j: usize,
    pub deviation: f64,
    /// Whether the replication has left the tracking ball by step `j`.
    pub exited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub exit: ExitStats,
    /// 10%, 50% and 90% quantiles of `‖d_j − δ_j‖` across replications.
    pub quantiles: Vec<[f64; 3]>,
    pub delta: Vec<Vec<f64>>,
    pub rows: Vec<DeviationRow>,
}

/// Exit proxy `τ̂`: the first `j ≥ 1` at which some budget entry drops below
/// `alpha` or the state leaves the ball of radius `eps_d` around `δ_j`,
/// capped at `n`. Returns `τ̂` and the deviation path.
pub fn exit_margin(run: &RunRecord, b0: &[f64], delta: &[Vec<f64>], alpha: f64, eps_d: f64) -> (usize, Vec<f64>) {
    let n = run.decisions.len();
    let devs = Trajectory::from_run(run, b0).with_reference(delta.to_vec()).deviations.unwrap_or_default();
    let tau = (1..n)
        .find(|&j| run.budget_before(j, b0).iter().any(|&b| b < alpha) || devs[j] > eps_d)
        .unwrap_or(n);
    (tau, devs)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn histogram(margins: &[usize]) -> Vec<usize> {
    let bucket = |m: usize| if m == 0 { 0 } else { (usize::BITS - m.leading_zeros()) as usize };
    let len = margins.iter().map(|&m| bucket(m)).max().unwrap_or(0) + 1;
    let mut h = vec![0; len];
    for &m in margins {
        h[bucket(m)] += 1;
    }
    h
}

/// Runs `policy` on `reps` replications and tracks `‖d_j − δ_j(d0)‖₂`.
///
/// The δ-path is built from `reference` with `delta_k` consumption draws
/// per step. Rows are emitted every `stride` steps (and always at the exit
/// step).
#[allow(clippy::too_many_arguments)]
pub fn state_deviation_paths(
    spec: &GeneratorSpec,
    policy: &PolicySpec,
    n: usize,
    d0: &[f64],
    reps: usize,
    eps_d: f64,
    seed: u64,
    reference: PriceReference,
    delta_k: usize,
    stride: usize,
) -> Result<DeviationReport, AnalysisError> {
    if reps == 0 || n < 2 {
        return Err(AnalysisError::Param("state deviation needs reps ≥ 1 and n ≥ 2".into()));
    }
    if !(eps_d > 0.0) {
        return Err(AnalysisError::Param(format!("eps_d must be positive, got {eps_d}")));
    }
    let stride = stride.max(1);
    let p_star = population_reference(spec, n, d0, reference, seed)?;
    let delta = delta_path(spec, n, d0, &p_star, delta_k, seed)?;
    let alpha = spec.bounds.alpha;
    let per_rep: Vec<(usize, Vec<f64>)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let inst = sample_instance_rep(spec, n, d0, seed, r);
            let run = run_policy(&inst, policy).map_err(|source| AnalysisError::Policy { n, replication: r, source })?;
            Ok(exit_margin(&run, &inst.b0(), &delta, alpha, eps_d))
        })
        .collect::<Result<_, AnalysisError>>()?;

    let margins: Vec<usize> = per_rep.iter().map(|(tau, _)| n - tau).collect();
    let as_f: Vec<f64> = margins.iter().map(|&m| m as f64).collect();
    let (mean, stderr) = mean_stderr(&as_f);
    let quantiles = (0..n)
        .map(|j| {
            let mut col: Vec<f64> = per_rep.iter().map(|(_, d)| d[j]).collect();
            col.sort_by(f64::total_cmp);
            [quantile(&col, 0.1), quantile(&col, 0.5), quantile(&col, 0.9)]
        })
        .collect();
    let mut rows = Vec::new();
    for (r, (tau, devs)) in per_rep.iter().enumerate() {
        for (j, &dev) in devs.iter().enumerate() {
            if j % stride == 0 || j == *tau {
                rows.push(DeviationRow { n, replication: r as u64, j, deviation: dev, exited: j >= *tau });
            }
        }
    }
    Ok(DeviationReport {
        exit: ExitStats {
            n,
            eps_d,
            mean_exit_margin: mean,
            stderr,
            exit_histogram: histogram(&margins),
            margins,
            proxy_note: format!(
                "first j ≥ 1 with a budget entry below {alpha} or ‖d_j − δ_j‖₂ > {eps_d}, capped at n"
            ),
        },
        quantiles,
        delta,
        rows,
    })
}
