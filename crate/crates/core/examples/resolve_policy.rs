//! Algorithm 1 on a single sinusoidal instance next to its baselines, with
//! the average-remaining-resource trajectory.
//!
//! `cargo run --example resolve_policy`

use olp_lab::algos::{run_policy, PolicySpec};
use olp_lab::gens::{sample_instance, GeneratorSpec};
use olp_lab::lp::solve_offline_fractional;
use olp_lab::types::Trajectory;

fn main() {
    let spec = GeneratorSpec::sinusoidal_default();
    let inst = sample_instance(&spec, 1000, &[0.25], 42);
    let offline = solve_offline_fractional(&inst.orders, &inst.b0()).unwrap();
    println!("offline value {:.3}", offline.value);
    for pol in [
        PolicySpec::resolve(),
        PolicySpec::OneShotSingleSample {},
        PolicySpec::FixedPrice { p: vec![0.75] },
        PolicySpec::GreedyAccept {},
        PolicySpec::OracleOfflinePrice {},
    ] {
        let run = run_policy(&inst, &pol).unwrap();
        let accepted = run.decisions.iter().filter(|x| **x).count();
        println!("{:<24} reward {:>8.3}  regret {:>7.3}  accepted {accepted}", pol.label(), run.total_reward, offline.value - run.total_reward);
    }
    let run = run_policy(&inst, &PolicySpec::resolve()).unwrap();
    let traj = Trajectory::from_run(&run, &inst.b0());
    for j in (0..1000).step_by(100).chain([990, 999]) {
        println!("  j={j:<4} price {:.4}  d_j {:.4}", run.prices[j][0], traj.d_path[j][0]);
    }
}
