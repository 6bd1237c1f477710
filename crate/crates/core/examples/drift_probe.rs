//! One-step drift of the average remaining resource around the δ-path,
//! with an injected population price and with a fresh single-sample
//! re-solve.
//!
//! `cargo run --release --example drift_probe`

use olp_lab::analysis::{z_field_probe, ProbePrice};
use olp_lab::gens::GeneratorSpec;

fn main() {
    let spec = GeneratorSpec::sinusoidal_default();
    let grid: Vec<Vec<f64>> = [0.15, 0.2, 0.25, 0.3, 0.35].iter().map(|&d| vec![d]).collect();
    for (name, price) in [("injected p = 0.75", ProbePrice::Injected { p: vec![0.75] }), ("re-solved", ProbePrice::Resolve)] {
        println!("{name}:");
        for z in z_field_probe(&spec, 1000, 400, &grid, &[0.25], 2000, 9, &price).unwrap() {
            println!("  d={:.2}  drift {:+.2e} ± {:.1e}", z.d[0], z.drift[0], z.stderr[0]);
        }
    }
}
