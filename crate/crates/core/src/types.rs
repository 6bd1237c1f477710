//! Shared domain vocabulary: orders, realized instances, run records and
//! state trajectories.
//!
//! Indexing is 0-based throughout the crate. Order `i` here is the
//! `(i + 1)`-th arrival of an episode; `remaining[i]` is the budget left
//! after deciding on order `i`, so the budget *before* order `i` is
//! `remaining[i - 1]` (or `b0` when `i == 0`). The average remaining
//! resource before order `i` is `budget_before(i) / (n - i)`.

use serde::{Deserialize, Serialize};

/// One arrival: a reward and the resource vector it would consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub u: f64,
    pub a: Vec<f64>,
}

impl Order {
    pub fn new(u: f64, a: Vec<f64>) -> Self {
        Self { u, a }
    }

    /// Single-resource convenience constructor.
    pub fn scalar(u: f64, a: f64) -> Self {
        Self { u, a: vec![a] }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// `aᵀp`.
    pub fn priced(&self, p: &[f64]) -> f64 {
        self.a.iter().zip(p).map(|(a, p)| a * p).sum()
    }
}

/// Declared support bounds for orders: `u ∈ [0, u_max]`, `a ∈ [0, alpha]^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderBounds {
    pub alpha: f64,
    pub u_max: f64,
}

impl OrderBounds {
    pub fn new(alpha: f64, u_max: f64) -> Self {
        Self { alpha, u_max }
    }

    pub fn violations(&self, order: &Order) -> Vec<String> {
        let mut out = Vec::new();
        if !(order.u >= 0.0 && order.u <= self.u_max) {
            out.push(format!("reward {} outside [0, {}]", order.u, self.u_max));
        }
        for (i, &a) in order.a.iter().enumerate() {
            if !(a >= 0.0 && a <= self.alpha) {
                out.push(format!("consumption entry {i} = {a} outside [0, {}]", self.alpha));
            }
        }
        out
    }
}

/// Identifiers of the random streams an instance was drawn from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub seed: u64,
    pub replication: u64,
    /// Label of the generator both paths were drawn from.
    pub generator: String,
    /// Stream path id of the real orders.
    pub real_path: u64,
    /// Stream path id of the single-sample orders.
    pub tilde_path: u64,
}

/// A realized episode: the real order sequence and the independent single
/// sample drawn from the same per-index marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    pub d0: Vec<f64>,
    pub orders: Vec<Order>,
    pub tilde_orders: Vec<Order>,
    pub bounds: OrderBounds,
    pub seed_info: SeedInfo,
}

impl Instance {
    /// Initial budget `b0 = n·d0`.
    pub fn b0(&self) -> Vec<f64> {
        self.d0.iter().map(|d| d * self.n as f64).collect()
    }
}

/// Returns every invariant violation of `inst`; empty iff valid.
pub fn validate_instance(inst: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    if inst.n == 0 {
        out.push("n not positive".to_string());
    }
    if inst.m == 0 {
        out.push("m not positive".to_string());
    }
    if inst.d0.len() != inst.m {
        out.push(format!("d0 length {} != m {}", inst.d0.len(), inst.m));
    }
    for (i, &d) in inst.d0.iter().enumerate() {
        if !(d > 0.0 && d.is_finite()) {
            out.push(format!("d0 entry {i} not positive"));
        }
    }
    if inst.orders.len() != inst.n {
        out.push("orders length mismatch".to_string());
    }
    if inst.tilde_orders.len() != inst.orders.len() {
        out.push("tilde length mismatch".to_string());
    }
    for (label, path) in [("order", &inst.orders), ("tilde order", &inst.tilde_orders)] {
        for (k, o) in path.iter().enumerate() {
            if o.a.len() != inst.m {
                out.push(format!("{label} {k} has {} resources, expected {}", o.a.len(), inst.m));
            }
            for v in inst.bounds.violations(o) {
                out.push(format!("{label} {k}: {v}"));
            }
        }
    }
    out
}

/// Decisions and state trajectory of one policy on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub policy: String,
    /// False for diagnostic policies that peek at the realized path.
    pub online: bool,
    pub decisions: Vec<bool>,
    /// Price in force when order `i` arrived.
    pub prices: Vec<Vec<f64>>,
    /// Budget left after deciding order `i`.
    pub remaining: Vec<Vec<f64>>,
    pub total_reward: f64,
    pub feasible: bool,
}

impl RunRecord {
    /// Budget available when order `i` arrived.
    pub fn budget_before<'a>(&'a self, i: usize, b0: &'a [f64]) -> &'a [f64] {
        if i == 0 {
            b0
        } else {
            &self.remaining[i - 1]
        }
    }

    /// Checks the budget recurrence, nonnegativity and the stored reward.
    pub fn violations(&self, inst: &Instance) -> Vec<String> {
        let mut out = Vec::new();
        let n = inst.orders.len();
        if self.decisions.len() != n || self.remaining.len() != n || self.prices.len() != n {
            out.push("record length does not match instance".to_string());
            return out;
        }
        let b0 = inst.b0();
        let mut reward = 0.0;
        for (i, order) in inst.orders.iter().enumerate() {
            let before = self.budget_before(i, &b0);
            let x = self.decisions[i];
            for r in 0..inst.m {
                let expect = if x { before[r] - order.a[r] } else { before[r] };
                if self.remaining[i][r] != expect {
                    out.push(format!("budget recurrence broken at order {i}, resource {r}"));
                }
                if self.remaining[i][r] < 0.0 {
                    out.push(format!("negative budget after order {i}, resource {r}"));
                }
            }
            if x {
                reward += order.u;
            }
        }
        if (reward - self.total_reward).abs() > 1e-12 * reward.abs().max(1.0) {
            out.push(format!("stored reward {} != recomputed {}", self.total_reward, reward));
        }
        out
    }
}

/// Average-remaining-resource path `d_i = b_i / (n - i)` for `i < n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub d_path: Vec<Vec<f64>>,
    pub delta_ref: Option<Vec<Vec<f64>>>,
    pub deviations: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn from_run(run: &RunRecord, b0: &[f64]) -> Self {
        let n = run.decisions.len();
        let d_path = (0..n)
            .map(|i| {
                let left = (n - i) as f64;
                run.budget_before(i, b0).iter().map(|b| b / left).collect()
            })
            .collect();
        Self { d_path, delta_ref: None, deviations: None }
    }

    /// Attaches a reference path and fills the Euclidean deviations.
    pub fn with_reference(mut self, delta: Vec<Vec<f64>>) -> Self {
        let dev = self
            .d_path
            .iter()
            .zip(&delta)
            .map(|(d, r)| euclid(d, r))
            .collect();
        self.delta_ref = Some(delta);
        self.deviations = Some(dev);
        self
    }
}

pub(crate) fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(d0: f64, tilde: usize) -> Instance {
        let orders: Vec<Order> = [0.9, 0.2, 0.6, 0.4].iter().map(|&u| Order::scalar(u, 1.0)).collect();
        Instance {
            n: 4,
            m: 1,
            d0: vec![d0],
            tilde_orders: orders[..tilde].to_vec(),
            orders,
            bounds: OrderBounds::new(1.0, 1.0),
            seed_info: SeedInfo::default(),
        }
    }

    #[test]
    fn valid_instance_has_no_violations() {
        assert!(validate_instance(&small(0.25, 4)).is_empty());
    }

    #[test]
    fn zero_average_budget_is_flagged() {
        assert_eq!(validate_instance(&small(0.0, 4)), vec!["d0 entry 0 not positive"]);
    }

    #[test]
    fn short_tilde_path_is_flagged() {
        assert_eq!(validate_instance(&small(0.25, 3)), vec!["tilde length mismatch"]);
    }

    #[test]
    fn out_of_bounds_order_is_flagged() {
        let mut inst = small(0.25, 4);
        inst.orders[2].a[0] = 1.5;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("order 2"));
    }

    #[test]
    fn trajectory_deviation_matches_reference() {
        let run = RunRecord {
            policy: "t".into(),
            online: true,
            decisions: vec![true, false],
            prices: vec![vec![0.0]; 2],
            remaining: vec![vec![0.5], vec![0.5]],
            total_reward: 1.0,
            feasible: true,
        };
        let t = Trajectory::from_run(&run, &[1.5]).with_reference(vec![vec![0.75], vec![0.25]]);
        assert_eq!(t.d_path, vec![vec![0.75], vec![0.5]]);
        assert_eq!(t.deviations.unwrap(), vec![0.0, 0.25]);
    }
}
