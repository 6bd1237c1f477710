//! Online policies: single-sample dual re-solving and its baselines.
//!
//! Every policy is a pure function `Instance → RunRecord`. Orders are
//! accepted when their reward strictly exceeds the priced consumption and
//! the remaining budget covers the order in every entry.

use crate::lp::{
    accept_decision, solve_dual_breakpoint_budget, solve_dual_simplex_budget, solve_offline_fractional,
    IncrementalDual, LpError,
};
use crate::types::{validate_instance, Instance, Order, RunRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgoError {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("invalid policy: {0}")]
    Policy(String),
    #[error("solver failed at step {step}: {source}")]
    Solver { step: usize, source: LpError },
}

/// How the single-resource re-solve is computed. Several resources always
/// go through the simplex.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualBackend {
    /// Order-statistic index over the tilde pool; `O(log n)` per step.
    #[default]
    Incremental,
    /// Fresh breakpoint solve on the remaining tilde orders at every step.
    Breakpoint,
    /// Fresh simplex solve at every step.
    Simplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    ResolveSingleSample {
        #[serde(default)]
        backend: DualBackend,
    },
    OneShotSingleSample {},
    FixedPrice { p: Vec<f64> },
    GreedyAccept {},
    OracleOfflinePrice {},
}

impl PolicySpec {
    pub fn resolve() -> Self {
        PolicySpec::ResolveSingleSample { backend: DualBackend::Incremental }
    }

    /// Column value used in CSV output.
    pub fn label(&self) -> String {
        match self {
            PolicySpec::ResolveSingleSample { .. } => "resolve_single_sample".into(),
            PolicySpec::OneShotSingleSample {} => "one_shot_single_sample".into(),
            PolicySpec::FixedPrice { p } => {
                let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                format!("fixed_price:{}", parts.join(";"))
            }
            PolicySpec::GreedyAccept {} => "greedy_accept".into(),
            PolicySpec::OracleOfflinePrice {} => "oracle_offline_price".into(),
        }
    }

    /// False for the diagnostic policy that reads the realized path.
    pub fn is_online(&self) -> bool {
        !matches!(self, PolicySpec::OracleOfflinePrice {})
    }

    pub fn check(&self, m: usize) -> Result<(), AlgoError> {
        if let PolicySpec::FixedPrice { p } = self {
            if p.len() != m {
                return Err(AlgoError::Policy(format!("fixed price has {} entries, expected {m}", p.len())));
            }
            if let Some(i) = p.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(AlgoError::Policy(format!("fixed price entry {i} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

pub fn run_policy(inst: &Instance, policy: &PolicySpec) -> Result<RunRecord, AlgoError> {
    match policy {
        PolicySpec::ResolveSingleSample { backend } => run_resolve_with(inst, *backend),
        PolicySpec::OneShotSingleSample {} => run_one_shot_single_sample(inst),
        PolicySpec::FixedPrice { p } => run_fixed_price(inst, p),
        PolicySpec::GreedyAccept {} => run_greedy_accept(inst),
        PolicySpec::OracleOfflinePrice {} => run_oracle_offline_price(inst),
    }
}

fn check_instance(inst: &Instance) -> Result<(), AlgoError> {
    let v = validate_instance(inst);
    match v.first() {
        None => Ok(()),
        Some(first) => Err(AlgoError::Instance(first.clone())),
    }
}

/// Shared simulation loop; `price_at(i, budget)` returns the price in force
/// when order `i` arrives, `accept` the decision rule given that price.
fn simulate<P, A>(inst: &Instance, label: String, online: bool, mut price_at: P, accept: A) -> Result<RunRecord, AlgoError>
where
    P: FnMut(usize, &[f64]) -> Result<Vec<f64>, AlgoError>,
    A: Fn(&Order, &[f64], &[f64]) -> bool,
{
    let n = inst.orders.len();
    let mut b = inst.b0();
    let mut decisions = Vec::with_capacity(n);
    let mut prices = Vec::with_capacity(n);
    let mut remaining = Vec::with_capacity(n);
    let mut total = 0.0;
    for (i, order) in inst.orders.iter().enumerate() {
        let p = price_at(i, &b)?;
        let x = accept(order, &p, &b);
        if x {
            for (bi, ai) in b.iter_mut().zip(&order.a) {
                *bi -= ai;
            }
            total += order.u;
        }
        decisions.push(x);
        prices.push(p);
        remaining.push(b.clone());
    }
    Ok(RunRecord { policy: label, online, decisions, prices, remaining, total_reward: total, feasible: true })
}

fn resolve_price(tilde: &[Order], b: &[f64], backend: DualBackend) -> Result<Vec<f64>, LpError> {
    if b.len() == 1 && backend != DualBackend::Simplex {
        let left = tilde.len().max(1) as f64;
        Ok(solve_dual_breakpoint_budget(tilde, b[0], b[0] / left)?.p)
    } else {
        Ok(solve_dual_simplex_budget(tilde, b)?.p)
    }
}

/// Algorithm 1: before order `i` arrives, re-solve
/// `min_{p≥0} bᵀp + Σ_{k≥i} (ũ_k − ã_kᵀp)⁺` on the single-sample suffix
/// (including index `i`) at the current budget.
pub fn run_resolve_single_sample(inst: &Instance) -> Result<RunRecord, AlgoError> {
    run_resolve_with(inst, DualBackend::Incremental)
}

pub fn run_resolve_with(inst: &Instance, backend: DualBackend) -> Result<RunRecord, AlgoError> {
    check_instance(inst)?;
    let label = PolicySpec::ResolveSingleSample { backend }.label();
    if inst.m == 1 && backend == DualBackend::Incremental {
        let mut index = IncrementalDual::new(&inst.tilde_orders).map_err(|source| AlgoError::Solver { step: 0, source })?;
        return simulate(
            inst,
            label,
            true,
            |i, b| {
                let p = index.price(b[0]);
                index.remove(i);
                Ok(vec![p])
            },
            accept_decision,
        );
    }
    simulate(
        inst,
        label,
        true,
        |i, b| resolve_price(&inst.tilde_orders[i..], b, backend).map_err(|source| AlgoError::Solver { step: i, source }),
        accept_decision,
    )
}

/// Solves the single-sample dual once at `b0` over all tilde orders and
/// keeps that price for the whole episode.
pub fn run_one_shot_single_sample(inst: &Instance) -> Result<RunRecord, AlgoError> {
    check_instance(inst)?;
    let p = resolve_price(&inst.tilde_orders, &inst.b0(), DualBackend::Breakpoint)
        .map_err(|source| AlgoError::Solver { step: 0, source })?;
    simulate(inst, PolicySpec::OneShotSingleSample {}.label(), true, |_, _| Ok(p.clone()), accept_decision)
}

pub fn run_fixed_price(inst: &Instance, p: &[f64]) -> Result<RunRecord, AlgoError> {
    check_instance(inst)?;
    let spec = PolicySpec::FixedPrice { p: p.to_vec() };
    spec.check(inst.m)?;
    simulate(inst, spec.label(), true, |_, _| Ok(p.to_vec()), accept_decision)
}

/// Accept whatever fits (`p ≡ 0`).
pub fn run_greedy_accept(inst: &Instance) -> Result<RunRecord, AlgoError> {
    let mut rec = run_fixed_price(inst, &vec![0.0; inst.m])?;
    rec.policy = PolicySpec::GreedyAccept {}.label();
    Ok(rec)
}

/// Thresholds every order at the hindsight shadow price of the realized
/// path. Not implementable online; the record is flagged accordingly.
///
/// With several resources the price comes from a floating-point basis, so
/// orders within `1e-9·max(1, u)` of the threshold count as ties and are
/// rejected.
pub fn run_oracle_offline_price(inst: &Instance) -> Result<RunRecord, AlgoError> {
    check_instance(inst)?;
    let sol = solve_offline_fractional(&inst.orders, &inst.b0()).map_err(|source| AlgoError::Solver { step: 0, source })?;
    let p = sol.dual_price;
    let multi = inst.m > 1;
    simulate(
        inst,
        PolicySpec::OracleOfflinePrice {}.label(),
        false,
        |_, _| Ok(p.clone()),
        move |o, p, b| {
            if multi && o.u <= o.priced(p) + 1e-9 * o.u.abs().max(1.0) {
                return false;
            }
            accept_decision(o, p, b)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gens::{sample_instance, Consumption, Family, GeneratorSpec, TwoPhaseVariant};
    use crate::lp::{solve_dual_breakpoint, solve_dual_simplex};
    use crate::types::{OrderBounds, SeedInfo};

    fn tiny(u: f64, ut: f64) -> Instance {
        Instance {
            n: 1,
            m: 1,
            d0: vec![1.0],
            orders: vec![Order::scalar(u, 1.0)],
            tilde_orders: vec![Order::scalar(ut, 1.0)],
            bounds: OrderBounds::new(1.0, 1.0),
            seed_info: SeedInfo::default(),
        }
    }

    fn box2() -> GeneratorSpec {
        GeneratorSpec::new(Family::StationaryUniform {
            u_max: 1.0,
            consumption: Consumption::Box { m: 2, lo: 0.2, hi: 1.0, slope: Default::default() },
        })
        .unwrap()
    }

    #[test]
    fn single_step_trace() {
        let inst = tiny(0.9, 0.5);
        for backend in [DualBackend::Incremental, DualBackend::Breakpoint, DualBackend::Simplex] {
            let r = run_resolve_with(&inst, backend).unwrap();
            assert_eq!(r.prices, vec![vec![0.0]]);
            assert_eq!(r.decisions, vec![true]);
            assert_eq!(r.total_reward, 0.9);
        }
        let one = run_one_shot_single_sample(&inst).unwrap();
        assert_eq!(one.decisions, run_resolve_single_sample(&inst).unwrap().decisions);
        let oracle = run_oracle_offline_price(&inst).unwrap();
        assert!(!oracle.online);
        assert_eq!(oracle.total_reward, 0.9);
    }

    #[test]
    fn exhausted_budget_blocks_acceptance() {
        let mut inst = tiny(0.9, 0.5);
        inst.n = 3;
        inst.d0 = vec![0.5];
        inst.orders = vec![Order::scalar(0.9, 1.0), Order::scalar(0.95, 1.0), Order::scalar(0.99, 1.0)];
        inst.tilde_orders = vec![Order::scalar(0.0, 1.0); 3];
        // b0 = 1.5: first order fits, the rest do not, even at price 0
        for r in [run_greedy_accept(&inst).unwrap(), run_resolve_single_sample(&inst).unwrap()] {
            assert_eq!(r.decisions, vec![true, false, false]);
            assert_eq!(r.remaining, vec![vec![0.5]; 3]);
        }
    }

    #[test]
    fn backends_agree_and_runs_are_deterministic() {
        let spec = GeneratorSpec::sinusoidal_default();
        let inst = sample_instance(&spec, 400, &[0.3], 11);
        let fast = run_resolve_single_sample(&inst).unwrap();
        assert_eq!(fast, run_resolve_single_sample(&inst).unwrap());
        let fresh = run_resolve_with(&inst, DualBackend::Breakpoint).unwrap();
        assert_eq!(fast.prices, fresh.prices);
        assert_eq!(fast.decisions, fresh.decisions);
        let simplex = run_resolve_with(&inst, DualBackend::Simplex).unwrap();
        let gap = fast.prices.iter().zip(&simplex.prices).filter(|(a, b)| (a[0] - b[0]).abs() > 1e-9).count();
        assert!(gap <= 4, "{gap} steps disagree");
    }

    #[test]
    fn records_satisfy_invariants_and_decisions_recompute() {
        for (spec, d0) in [
            (GeneratorSpec::stationary_uniform(), vec![0.25]),
            (GeneratorSpec::two_phase(TwoPhaseVariant::P2), vec![0.25]),
            (box2(), vec![0.15, 0.2]),
        ] {
            let n = if spec.m == 1 { 300 } else { 60 };
            let inst = sample_instance(&spec, n, &d0, 5);
            for pol in [
                PolicySpec::resolve(),
                PolicySpec::OneShotSingleSample {},
                PolicySpec::FixedPrice { p: vec![0.5; spec.m] },
                PolicySpec::GreedyAccept {},
                PolicySpec::OracleOfflinePrice {},
            ] {
                let r = run_policy(&inst, &pol).unwrap();
                assert!(r.violations(&inst).is_empty(), "{}: {:?}", pol.label(), r.violations(&inst));
                let b0 = inst.b0();
                for (i, o) in inst.orders.iter().enumerate() {
                    let mut x = accept_decision(o, &r.prices[i], r.budget_before(i, &b0));
                    if !pol.is_online() && spec.m > 1 {
                        x &= o.u > o.priced(&r.prices[i]) + 1e-9 * o.u.max(1.0);
                    }
                    assert_eq!(x, r.decisions[i]);
                }
            }
        }
    }

    #[test]
    fn one_shot_price_is_constant() {
        let inst = sample_instance(&GeneratorSpec::stationary_uniform(), 200, &[0.25], 2);
        let r = run_one_shot_single_sample(&inst).unwrap();
        assert!(r.prices.iter().all(|p| p == &r.prices[0]));
    }

    #[test]
    fn greedy_is_fixed_price_zero() {
        let inst = sample_instance(&GeneratorSpec::two_phase(TwoPhaseVariant::P2), 200, &[0.25], 3);
        assert_eq!(run_greedy_accept(&inst).unwrap().decisions, run_fixed_price(&inst, &[0.0]).unwrap().decisions);
        let none = run_fixed_price(&inst, &[3.1]).unwrap();
        assert_eq!(none.total_reward, 0.0);
        assert!(run_fixed_price(&inst, &[-0.1]).is_err());
    }

    #[test]
    fn tuned_fixed_price_spends_budget_in_phase_one() {
        // phase one accepts each order with probability 1/4 at p = 0.75
        let n = 2000;
        let reps = 50;
        let mut spent = 0.0;
        for s in 0..reps {
            let inst = sample_instance(&GeneratorSpec::two_phase(TwoPhaseVariant::P2), n, &[0.25], s);
            let r = run_fixed_price(&inst, &[0.75]).unwrap();
            spent += r.decisions[..n / 2].iter().filter(|x| **x).count() as f64;
        }
        let mean = spent / reps as f64;
        let expect = 0.25 * (n / 2) as f64;
        // binomial sd √(1000·3/16) ≈ 13.7 per run, capped by the budget of 500
        assert!((mean - expect).abs() < 4.0 * 13.7 / (reps as f64).sqrt() + 1.0, "{mean}");
    }

    #[test]
    fn oracle_matches_offline_up_to_fractional_orders() {
        for (spec, d0) in [(GeneratorSpec::sinusoidal_default(), vec![0.3]), (box2(), vec![0.15, 0.2])] {
            for seed in 0..5 {
                let n = if spec.m == 1 { 500 } else { 80 };
                let inst = sample_instance(&spec, n, &d0, seed);
                let off = solve_offline_fractional(&inst.orders, &inst.b0()).unwrap();
                let r = run_oracle_offline_price(&inst).unwrap();
                let differ = off
                    .x
                    .iter()
                    .zip(&r.decisions)
                    .filter(|(x, d)| (**x - if **d { 1.0 } else { 0.0 }).abs() > 1e-7)
                    .count();
                assert!(differ <= spec.m, "{differ} disagreements");
                assert!(r.total_reward >= off.value - spec.m as f64 * spec.bounds.u_max - 1e-9);
            }
        }
    }

    #[test]
    fn resolve_prices_are_bounded_and_scale_free() {
        let spec = GeneratorSpec::sinusoidal_default();
        let inst = sample_instance(&spec, 300, &[0.25], 17);
        let r = run_resolve_single_sample(&inst).unwrap();
        let n = inst.n;
        let b0 = inst.b0();
        let u_max = inst.tilde_orders.iter().map(|o| o.u).fold(0.0, f64::max);
        for i in 0..n {
            let b = r.budget_before(i, &b0)[0];
            let d = b / (n - i) as f64;
            if d > 0.0 {
                assert!(r.prices[i][0] <= u_max / d + 1e-9);
                // the normalized solve minimizes the unnormalized objective too;
                // prices can differ only on a flat optimum where b·p ties
                let tail = &inst.tilde_orders[i..];
                let normalized = solve_dual_breakpoint(tail, d).unwrap();
                let g = |p: f64| b * p + tail.iter().map(|o| (o.u - o.a[0] * p).max(0.0)).sum::<f64>();
                let (g1, g2) = (g(normalized.p[0]), g(r.prices[i][0]));
                assert!((g1 - g2).abs() <= 1e-9 * g1.abs().max(1.0), "step {i}: {g1} vs {g2}");
                if d * tail.len() as f64 == b {
                    assert_eq!(normalized.p, r.prices[i]);
                }
            }
        }
    }

    #[test]
    fn two_resource_resolve_uses_simplex() {
        let inst = sample_instance(&box2(), 40, &[0.15, 0.2], 4);
        let r = run_resolve_single_sample(&inst).unwrap();
        let d: Vec<f64> = inst.b0().iter().map(|b| b / 40.0).collect();
        let direct = solve_dual_simplex(&inst.tilde_orders, &d).unwrap();
        for (a, b) in r.prices[0].iter().zip(&direct.p) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn policy_spec_round_trips_through_toml() {
        #[derive(Serialize, Deserialize)]
        struct W {
            policies: Vec<PolicySpec>,
        }
        let text = r#"
            [[policies]]
            kind = "resolve_single_sample"
            [[policies]]
            kind = "fixed_price"
            p = [0.75]
            [[policies]]
            kind = "greedy_accept"
        "#;
        let w: W = toml::from_str(text).unwrap();
        assert_eq!(w.policies[0], PolicySpec::resolve());
        assert_eq!(w.policies[1].label(), "fixed_price:0.75");
        assert!(toml::from_str::<W>("[[policies]]\nkind = \"greedy_accept\"\nbogus = 1\n").is_err());
    }
}
