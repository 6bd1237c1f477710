//! Sweeps the tracking radius and reports the mean exit margin `n − τ̂`
//! of Algorithm 1 across horizons, for choosing `eps_d`.
//!
//! `cargo run --release --example exit_time_pilot`

use olp_lab::algos::PolicySpec;
use olp_lab::analysis::{fit_points, state_deviation_paths, FitModel, PriceReference};
use olp_lab::gens::GeneratorSpec;

fn main() {
    let grid = [250, 500, 1000, 2000, 4000];
    let reps = 60;
    for (name, spec) in [("stationary", GeneratorSpec::stationary_uniform()), ("sinusoidal", GeneratorSpec::sinusoidal_default())] {
        for eps_d in [0.02, 0.05, 0.1] {
            let mut pts = Vec::new();
            let mut line = format!("{name:>10} eps_d={eps_d:<5}");
            for &n in &grid {
                let rep = state_deviation_paths(&spec, &PolicySpec::resolve(), n, &[0.25], reps, eps_d, 101, PriceReference::Exact, 256, n)
                    .expect("pilot run");
                line += &format!(" n={n}:{:.1}", rep.exit.mean_exit_margin);
                pts.push((n, rep.exit.mean_exit_margin));
            }
            match fit_points(&pts, FitModel::PowerLawN) {
                Ok(f) => println!("{line}  slope={:.3}", f.exponent_or_coeff),
                Err(e) => println!("{line}  ({e})"),
            }
        }
    }
}
