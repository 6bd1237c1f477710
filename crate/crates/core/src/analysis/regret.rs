use super::{mean_stderr, AnalysisError};
use crate::algos::{run_policy, PolicySpec};
use crate::gens::{instance_key, sample_instance_rep, GeneratorSpec};
use crate::lp::solve_offline_fractional;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One row of `regret.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub n: usize,
    pub policy: String,
    pub replication: u64,
    pub offline_value: f64,
    pub reward: f64,
    pub regret: f64,
    /// Digest of the instance stream key of this replication.
    pub seed_branch: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretEstimate {
    pub n: usize,
    pub policy: PolicySpec,
    pub mean_regret: f64,
    pub stderr: f64,
    pub reps: usize,
    pub mean_offline: f64,
    pub mean_reward: f64,
    pub records: Vec<ReplicationRecord>,
}

impl RegretEstimate {
    fn from_records(n: usize, policy: PolicySpec, records: Vec<ReplicationRecord>) -> Self {
        let regrets: Vec<f64> = records.iter().map(|r| r.regret).collect();
        let (_, stderr) = mean_stderr(&regrets);
        let k = records.len() as f64;
        let mean_offline = records.iter().map(|r| r.offline_value).sum::<f64>() / k;
        let mean_reward = records.iter().map(|r| r.reward).sum::<f64>() / k;
        Self {
            n,
            policy,
            mean_regret: mean_offline - mean_reward,
            stderr,
            reps: records.len(),
            mean_offline,
            mean_reward,
            records,
        }
    }
}

/// Regret of one policy; see [`estimate_regret_crn`].
pub fn estimate_regret(
    spec: &GeneratorSpec,
    policy: &PolicySpec,
    n: usize,
    d0: &[f64],
    reps: usize,
    seed: u64,
) -> Result<RegretEstimate, AnalysisError> {
    let mut out = estimate_regret_crn(spec, std::slice::from_ref(policy), n, d0, reps, seed)?;
    Ok(out.remove(0))
}

/// Regret of several policies on common random numbers: replication `r`
/// of every policy runs on the same instance, and the offline value is
/// solved once per instance.
pub fn estimate_regret_crn(
    spec: &GeneratorSpec,
    policies: &[PolicySpec],
    n: usize,
    d0: &[f64],
    reps: usize,
    seed: u64,
) -> Result<Vec<RegretEstimate>, AnalysisError> {
    if reps < 2 {
        return Err(AnalysisError::Param(format!("reps must be at least 2, got {reps}")));
    }
    if n == 0 {
        return Err(AnalysisError::Param("n must be positive".into()));
    }
    if d0.len() != spec.m {
        return Err(AnalysisError::Param(format!("d0 has {} entries, generator has m = {}", d0.len(), spec.m)));
    }
    for p in policies {
        p.check(spec.m).map_err(|source| AnalysisError::Policy { n, replication: 0, source })?;
    }
    let rows: Vec<Vec<ReplicationRecord>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<ReplicationRecord>, AnalysisError> {
            let inst = sample_instance_rep(spec, n, d0, seed, r);
            let offline = solve_offline_fractional(&inst.orders, &inst.b0())
                .map_err(|source| AnalysisError::Offline { n, replication: r, source })?
                .value;
            let seed_branch = instance_key(seed, n, r).digest();
            policies
                .iter()
                .map(|pol| {
                    let run = run_policy(&inst, pol).map_err(|source| AnalysisError::Policy { n, replication: r, source })?;
                    Ok(ReplicationRecord {
                        n,
                        policy: pol.label(),
                        replication: r,
                        offline_value: offline,
                        reward: run.total_reward,
                        regret: offline - run.total_reward,
                        seed_branch,
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(policies
        .iter()
        .enumerate()
        .map(|(k, pol)| RegretEstimate::from_records(n, pol.clone(), rows.iter().map(|row| row[k].clone()).collect()))
        .collect())
}
