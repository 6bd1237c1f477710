//! Mean regret of Algorithm 1 across horizons with power-law and polylog
//! fits.
//!
//! `cargo run --release --example regret_scaling`

use olp_lab::algos::PolicySpec;
use olp_lab::analysis::{estimate_regret, fit_scaling, FitModel};
use olp_lab::gens::GeneratorSpec;

fn main() {
    let spec = GeneratorSpec::sinusoidal_default();
    let est: Vec<_> = [250, 500, 1000, 2000, 4000]
        .iter()
        .map(|&n| estimate_regret(&spec, &PolicySpec::resolve(), n, &[0.25], 200, 1).unwrap())
        .collect();
    for e in &est {
        println!("n={:<5} regret {:.3} ± {:.3}  (offline {:.1})", e.n, e.mean_regret, e.stderr, e.mean_offline);
    }
    for model in [FitModel::PowerLawN, FitModel::Polylog] {
        let f = fit_scaling(&est, model).unwrap();
        println!("{model:?}: exponent {:.3}, r² {:.3}", f.exponent_or_coeff, f.r2);
    }
}
