//! Squared distance between the empirical dual price of a realized path
//! and the population price, against the `log n / n` rate.
//!
//! `cargo run --release --example dual_convergence`

use olp_lab::analysis::{dual_convergence_curve, PriceReference};
use olp_lab::gens::GeneratorSpec;

fn main() {
    for spec in [GeneratorSpec::stationary_uniform(), GeneratorSpec::sinusoidal_default()] {
        let curve = dual_convergence_curve(&spec, &[250, 500, 1000, 2000, 4000], &[0.25], 300, 5, PriceReference::Exact).unwrap();
        println!("{}:", spec.label());
        for pt in curve {
            let n = pt.n as f64;
            println!("  n={:<5} p*={:.4}  MSE {:.3e} ± {:.1e}  MSE·n/ln n {:.3}", pt.n, pt.p_star[0], pt.mse, pt.stderr, pt.mse * n / n.ln());
        }
    }
}
