//! Shipped generator families: declared bounds, grid validation and a few
//! sampled orders.
//!
//! `cargo run --example generator_tour`

use olp_lab::gens::{
    sample_instance, validate_generator, Consumption, Family, GeneratorSpec, Schedule, TwoPhaseVariant, ValidationGrid,
};

fn main() {
    let specs = vec![
        GeneratorSpec::stationary_uniform(),
        GeneratorSpec::sinusoidal_default(),
        GeneratorSpec::new(Family::LinearDrift {
            u_max: 1.0,
            start: -0.5,
            end: 0.5,
            consumption: Consumption::Box { m: 2, lo: 0.2, hi: 1.0, slope: Schedule::Linear { start: 0.3, end: -0.3 } },
        })
        .unwrap(),
        GeneratorSpec::two_phase(TwoPhaseVariant::P1),
        GeneratorSpec::two_phase(TwoPhaseVariant::P2),
    ];
    for spec in &specs {
        let v = validate_generator(spec, ValidationGrid::default());
        let status = if v.is_empty() { "all checks pass".to_string() } else { v.iter().map(|x| x.kind.to_string()).collect::<Vec<_>>().join(", ") };
        println!("{:<24} m={} {:?}\n    {status}", spec.label(), spec.m, spec.bounds);
        let d0 = vec![0.25; spec.m];
        let inst = sample_instance(spec, 10, &d0, 1);
        for (i, (o, t)) in inst.orders.iter().zip(&inst.tilde_orders).enumerate().step_by(3) {
            println!("    order {i}: real u={:.3} a={:.2?}  single-sample u={:.3} a={:.2?}", o.u, o.a, t.u, t.a);
        }
    }
}
