//! Hindsight LP relaxation: greedy fill for one resource, bounded simplex
//! for several, with strong duality checked against the dual objective.
//!
//! `cargo run --example offline_benchmark`

use olp_lab::lp::{dual_objective, solve_offline_fractional};
use olp_lab::types::Order;

fn main() {
    let one = vec![Order::scalar(1.0, 1.0), Order::scalar(0.4, 1.0), Order::scalar(0.9, 0.5)];
    let s = solve_offline_fractional(&one, &[1.2]).unwrap();
    println!("m=1: x = {:?}, value = {}, shadow price = {:?}", s.x, s.value, s.dual_price);

    let two = vec![
        Order::new(1.0, vec![0.6, 0.2]),
        Order::new(0.8, vec![0.1, 0.9]),
        Order::new(0.7, vec![0.5, 0.5]),
        Order::new(0.3, vec![0.2, 0.1]),
    ];
    let b = [0.9, 0.8];
    let s = solve_offline_fractional(&two, &b).unwrap();
    let d: Vec<f64> = b.iter().map(|v| v / two.len() as f64).collect();
    let dual = two.len() as f64 * dual_objective(&s.dual_price, &two, &d).unwrap();
    println!("m=2: x = {:?}", s.x);
    println!("     value = {}, N·g(p) = {dual}, fractional orders = {}", s.value, s.basis_note);
}
