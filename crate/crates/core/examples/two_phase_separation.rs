//! A price tuned to the first phase fails when the second phase pays more;
//! the single-sample re-solve sees it coming.
//!
//! `cargo run --release --example two_phase_separation`

use olp_lab::algos::PolicySpec;
use olp_lab::analysis::estimate_regret_crn;
use olp_lab::gens::{GeneratorSpec, TwoPhaseVariant};

fn main() {
    let n = 2000;
    let pols = [PolicySpec::resolve(), PolicySpec::FixedPrice { p: vec![0.75] }, PolicySpec::GreedyAccept {}];
    for variant in [TwoPhaseVariant::P1, TwoPhaseVariant::P2] {
        let spec = GeneratorSpec::two_phase(variant);
        let est = estimate_regret_crn(&spec, &pols, n, &[0.25], 100, 3).unwrap();
        println!("{}:", spec.label());
        for e in est {
            println!("  {:<24} mean regret {:>8.2} ± {:.2}  ({:.3}·n)", e.policy.label(), e.mean_regret, e.stderr, e.mean_regret / n as f64);
        }
    }
}
