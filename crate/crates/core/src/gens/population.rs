//! Population prices and the δ-path.
//!
//! The population problem for orders `j..n` (0-based) at average budget `d`
//! is `min_{p ≥ 0} d·p + (1/(n−j)) Σ_k E[(u_k − a_kᵀp)⁺]`. Two solvers are
//! provided: [`population_price`], the sample-average approximation over
//! `K` synthetic draws per remaining index, and [`population_price_exact`],
//! which evaluates the expectations in closed form / by quadrature.

use super::family::GeneratorSpec;
use super::law::{dot, OrderLaw};
use super::sample::sample_order;
use super::stream::{Purpose, StreamKey};
use super::GenError;
use crate::lp::{solve_dual_breakpoint, solve_dual_simplex};
use crate::types::Order;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

const BOOTSTRAP_RESAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceMethod {
    Saa,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationPrice {
    pub p_star: Vec<f64>,
    pub n: usize,
    pub j: usize,
    pub d: Vec<f64>,
    /// Synthetic draws per remaining index (0 for quadrature).
    pub k: usize,
    pub method: PriceMethod,
    /// Per-entry bootstrap standard deviation of the SAA price.
    pub bootstrap_sd: Vec<f64>,
}

fn solve_pool(pool: &[Order], d: &[f64]) -> Result<Vec<f64>, GenError> {
    let sol = if d.len() == 1 {
        solve_dual_breakpoint(pool, d[0])?
    } else {
        solve_dual_simplex(pool, d)?
    };
    Ok(sol.p)
}

/// SAA population price from `K·(n − j)` synthetic orders; `bootstrap_sd`
/// comes from 20 resamples of that pool.
pub fn population_price(
    spec: &GeneratorSpec,
    n: usize,
    j: usize,
    d: &[f64],
    k: usize,
    seed: u64,
) -> Result<PopulationPrice, GenError> {
    check_args(spec, n, j, d)?;
    if k == 0 {
        return Err(GenError::Param("SAA needs K ≥ 1".into()));
    }
    let base = StreamKey::new(seed, Purpose::Population).horizon(n);
    let mut pool = Vec::with_capacity(k * (n - j));
    for r in 0..k {
        let key = base.replication(r as u64);
        for i in j..n {
            pool.push(sample_order(spec, i, n, &mut key.index(i as u64).rng()));
        }
    }
    let p_star = solve_pool(&pool, d)?;

    let mut reps = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = Vec::with_capacity(pool.len());
    for b in 0..BOOTSTRAP_RESAMPLES {
        let mut rng = StreamKey::new(seed, Purpose::Bootstrap).horizon(n).replication(b as u64).rng();
        resample.clear();
        for _ in 0..pool.len() {
            resample.push(pool.choose(&mut rng).expect("nonempty pool").clone());
        }
        reps.push(solve_pool(&resample, d)?);
    }
    let bootstrap_sd = (0..spec.m)
        .map(|i| {
            let mean = reps.iter().map(|p| p[i]).sum::<f64>() / reps.len() as f64;
            let var = reps.iter().map(|p| (p[i] - mean).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
            var.sqrt()
        })
        .collect();
    Ok(PopulationPrice { p_star, n, j, d: d.to_vec(), k, method: PriceMethod::Saa, bootstrap_sd })
}

fn check_args(spec: &GeneratorSpec, n: usize, j: usize, d: &[f64]) -> Result<(), GenError> {
    if j >= n {
        return Err(GenError::Param(format!("start index {j} must be below n = {n}")));
    }
    if d.len() != spec.m {
        return Err(GenError::Param(format!("d has {} entries, generator has m = {}", d.len(), spec.m)));
    }
    if d.iter().any(|&v| !(v > 0.0)) {
        return Err(GenError::Param("d must be entrywise positive".into()));
    }
    Ok(())
}

/// Expected average acceptance mass `(1/(n−j)) Σ_k E[a_k 1{u_k > a_kᵀp}]`.
pub fn mean_accept_mass(laws: &[OrderLaw], p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut acc = vec![0.0; m];
    for law in laws {
        for (s, v) in acc.iter_mut().zip(law.accept_mass(p)) {
            *s += v;
        }
    }
    acc.iter_mut().for_each(|v| *v /= laws.len() as f64);
    acc
}

/// Expectation-form objective `g*(p, d)` over the given laws.
pub fn population_objective(laws: &[OrderLaw], p: &[f64], d: &[f64]) -> f64 {
    dot(d, p) + laws.iter().map(|l| l.excess(p)).sum::<f64>() / laws.len() as f64
}

/// Population price with expectations evaluated exactly (one resource) or
/// by tensor quadrature (several resources).
///
/// One resource: the smallest root of the monotone first-order condition,
/// found by bisection on `[0, ū/d]`. Several resources: projected gradient
/// descent with Armijo backtracking on the convex objective.
pub fn population_price_exact(spec: &GeneratorSpec, n: usize, j: usize, d: &[f64]) -> Result<PopulationPrice, GenError> {
    check_args(spec, n, j, d)?;
    let laws: Vec<OrderLaw> = (j..n).map(|i| spec.law(i, n)).collect();
    let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let p_star = if spec.m == 1 {
        let mass = |p: f64| mean_accept_mass(&laws, &[p])[0];
        if mass(0.0) <= d[0] {
            vec![0.0]
        } else {
            let (mut lo, mut hi) = (0.0, spec.bounds.u_max / d_min);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if mass(mid) <= d[0] {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            vec![hi]
        }
    } else {
        projected_descent(&laws, d, spec.bounds.u_max / d_min)
    };
    Ok(PopulationPrice {
        p_star,
        n,
        j,
        d: d.to_vec(),
        k: 0,
        method: PriceMethod::Quadrature,
        bootstrap_sd: vec![0.0; spec.m],
    })
}

fn projected_descent(laws: &[OrderLaw], d: &[f64], cap: f64) -> Vec<f64> {
    let m = d.len();
    let mut p = vec![0.0; m];
    let mut f = population_objective(laws, &p, d);
    let mut step: f64 = 1.0;
    for _ in 0..5000 {
        let mass = mean_accept_mass(laws, &p);
        let grad: Vec<f64> = d.iter().zip(&mass).map(|(d, a)| d - a).collect();
        let proj = |t: f64| -> Vec<f64> {
            p.iter().zip(&grad).map(|(p, g)| (p - t * g).clamp(0.0, cap)).collect()
        };
        let pg: f64 = proj(1.0).iter().zip(&p).map(|(q, p)| (q - p).powi(2)).sum::<f64>().sqrt();
        if pg < 1e-11 {
            break;
        }
        step = (step * 2.0).min(1e3);
        loop {
            let q = proj(step);
            let fq = population_objective(laws, &q, d);
            let decrease: f64 = grad.iter().zip(q.iter().zip(&p)).map(|(g, (q, p))| g * (q - p)).sum();
            if fq <= f + 1e-4 * decrease || step < 1e-14 {
                p = q;
                f = fq;
                break;
            }
            step *= 0.5;
        }
    }
    p
}

/// The δ-path `δ_j = (n·d0 − Σ_{k<j} E[a_k 1{u_k > a_kᵀp*}]) / (n − j)` for
/// `j = 0..n`.
///
/// Each expectation is estimated from `K` stratified consumption draws,
/// conditioning on consumption so the reward indicator is replaced by its
/// exact probability. With fixed consumption the estimate is exact.
/// `δ_0 = n·d0 / n`, which is `d0` whenever that product is exact.
pub fn delta_path(
    spec: &GeneratorSpec,
    n: usize,
    d0: &[f64],
    p_star: &PopulationPrice,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, GenError> {
    if p_star.p_star.len() != spec.m || d0.len() != spec.m {
        return Err(GenError::Param("dimension mismatch between d0, p* and generator".into()));
    }
    let k = k.max(1);
    let b0: Vec<f64> = d0.iter().map(|v| v * n as f64).collect();
    let mut cum = vec![0.0; spec.m];
    let mut out = Vec::with_capacity(n);
    let base = StreamKey::new(seed, Purpose::DeltaPath).horizon(n);
    for j in 0..n {
        let left = (n - j) as f64;
        out.push(b0.iter().zip(&cum).map(|(b, c)| (b - c) / left).collect());
        let law = spec.law(j, n);
        let mass = match &law.consumption {
            super::law::ConsumptionLaw::Atom(_) => law.accept_mass(&p_star.p_star),
            super::law::ConsumptionLaw::Box(boxes) => {
                let mut rng = base.index(j as u64).rng();
                let draws = stratified_draws(boxes, k, &mut rng);
                law.accept_mass_given(&draws, &p_star.p_star)
            }
        };
        for (c, v) in cum.iter_mut().zip(mass) {
            *c += v;
        }
    }
    Ok(out)
}

/// Latin-hypercube draws of box consumption.
fn stratified_draws<R: Rng>(boxes: &[super::law::Tilted], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(boxes.len());
    for t in boxes {
        let mut c: Vec<f64> = (0..k).map(|i| t.quantile((i as f64 + rng.gen::<f64>()) / k as f64)).collect();
        c.shuffle(rng);
        cols.push(c);
    }
    (0..k).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// `(inf aᵀp*, sup aᵀp*)` over the consumption support, for the
/// non-degeneracy estimate reported by validation. The interval should sit
/// strictly inside `(0, ū)`.
pub fn nondegeneracy_estimate(spec: &GeneratorSpec, n: usize, d0: &[f64]) -> Result<(Vec<f64>, f64, f64), GenError> {
    let p = population_price_exact(spec, n, 0, d0)?.p_star;
    let law = spec.law_at_time(0.0);
    let (lo, hi) = match &law.consumption {
        super::law::ConsumptionLaw::Atom(c) => {
            let v = dot(c, &p);
            (v, v)
        }
        super::law::ConsumptionLaw::Box(b) => (
            b.iter().zip(&p).map(|(t, p)| t.lo * p).sum(),
            b.iter().zip(&p).map(|(t, p)| t.hi * p).sum(),
        ),
    };
    Ok((p, lo, hi))
}
