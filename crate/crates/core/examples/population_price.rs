//! Population dual price by sample averaging and by quadrature, and the
//! δ-path it induces on the two-phase family.
//!
//! `cargo run --release --example population_price`

use olp_lab::gens::{delta_path, population_price, population_price_exact, GeneratorSpec, TwoPhaseVariant};

fn main() {
    let spec = GeneratorSpec::sinusoidal_default();
    let n = 1000;
    let exact = population_price_exact(&spec, n, 0, &[0.25]).unwrap();
    let saa = population_price(&spec, n, 0, &[0.25], 50, 7).unwrap();
    println!("sinusoidal, n={n}: quadrature p* = {:.5}, SAA p* = {:.5} (bootstrap sd {:.5})", exact.p_star[0], saa.p_star[0], saa.bootstrap_sd[0]);

    let p2 = GeneratorSpec::two_phase(TwoPhaseVariant::P2);
    let pp = population_price_exact(&p2, n, 0, &[0.25]).unwrap();
    let delta = delta_path(&p2, n, &[0.25], &pp, 1, 0).unwrap();
    println!("two-phase P2: p* = {}", pp.p_star[0]);
    for j in (0..n).step_by(125) {
        println!("  δ_{j:<4} = {:.4}", delta[j][0]);
    }
}
