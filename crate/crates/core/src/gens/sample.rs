use super::family::GeneratorSpec;
use super::stream::{Purpose, StreamKey, REAL_PATH, TILDE_PATH};
use crate::types::{Instance, Order, OrderBounds, SeedInfo};
use rand::Rng;

/// Draws order `i` (0-based) of an `n`-order episode: consumption from the
/// law at time `(i + 1)/n`, then the reward given that consumption.
pub fn sample_order<R: Rng + ?Sized>(spec: &GeneratorSpec, i: usize, n: usize, rng: &mut R) -> Order {
    let (u, a) = spec.law(i, n).sample(rng);
    Order { u, a }
}

/// One full path; order `i` uses the stream `key.index(i)`.
pub fn sample_path(spec: &GeneratorSpec, n: usize, key: StreamKey) -> Vec<Order> {
    (0..n).map(|i| sample_order(spec, i, n, &mut key.index(i as u64).rng())).collect()
}

pub fn instance_key(seed: u64, n: usize, replication: u64) -> StreamKey {
    StreamKey::new(seed, Purpose::Instance).horizon(n).replication(replication)
}

/// Replication 0 of [`sample_instance_rep`].
pub fn sample_instance(spec: &GeneratorSpec, n: usize, d0: &[f64], seed: u64) -> Instance {
    sample_instance_rep(spec, n, d0, seed, 0)
}

/// Real path and single-sample path from disjoint stream branches with the
/// same per-index laws.
pub fn sample_instance_rep(spec: &GeneratorSpec, n: usize, d0: &[f64], seed: u64, replication: u64) -> Instance {
    let key = instance_key(seed, n, replication);
    Instance {
        n,
        m: spec.m,
        d0: d0.to_vec(),
        orders: sample_path(spec, n, key.path(REAL_PATH)),
        tilde_orders: sample_path(spec, n, key.path(TILDE_PATH)),
        bounds: OrderBounds::new(spec.bounds.alpha, spec.bounds.u_max),
        seed_info: SeedInfo {
            seed,
            replication,
            generator: spec.label(),
            real_path: REAL_PATH,
            tilde_path: TILDE_PATH,
        },
    }
}

/// Consumption density (or mass, for fixed consumption) at time `t`.
pub fn density_v(spec: &GeneratorSpec, t: f64, a: &[f64]) -> f64 {
    spec.law_at_time(t).consumption.density(a)
}

/// Conditional reward density at time `t` given consumption `a`; zero when
/// `a` or `u` is off the support.
pub fn density_f(spec: &GeneratorSpec, t: f64, a: &[f64], u: f64) -> f64 {
    let law = spec.law_at_time(t);
    if law.consumption.density(a) == 0.0 {
        return 0.0;
    }
    law.reward.pdf(u)
}
