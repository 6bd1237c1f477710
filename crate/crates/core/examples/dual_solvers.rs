//! The three ways to get the single-resource dual price, and the flat
//! optimum tie rule.
//!
//! `cargo run --example dual_solvers`

use olp_lab::lp::{dual_objective, solve_dual_breakpoint, solve_dual_simplex, IncrementalDual};
use olp_lab::types::Order;

fn main() {
    // two orders, half a unit of budget per order: the optimum is flat on [0.4, 1.0]
    let orders = vec![Order::scalar(1.0, 1.0), Order::scalar(0.4, 1.0)];
    let bp = solve_dual_breakpoint(&orders, 0.5).unwrap();
    println!("breakpoint: p = {:?}, objective = {}, status = {:?}, note = {:?}", bp.p, bp.objective, bp.status, bp.tie_note);
    let sx = solve_dual_simplex(&orders, &[0.5]).unwrap();
    println!("simplex:    p = {:?}, objective = {}", sx.p, sx.objective);
    for p in [0.0, 0.4, 0.7, 1.0, 1.2] {
        println!("  g({p}) = {}", dual_objective(&[p], &orders, &[0.5]).unwrap());
    }

    // the shrinking pool Algorithm 1 sees, answered by the incremental index
    let pool: Vec<Order> = (0..8).map(|k| Order::scalar(0.1 + 0.1 * k as f64, 1.0)).collect();
    let mut index = IncrementalDual::new(&pool).unwrap();
    let mut b = 3.0;
    for i in 0..pool.len() {
        if b <= 0.0 {
            println!("step {i}: budget exhausted");
            break;
        }
        let fresh = solve_dual_breakpoint(&pool[i..], b / (pool.len() - i) as f64).unwrap();
        println!("step {i}: b = {b:.1}, incremental p = {:.2}, fresh p = {:.2}", index.price(b), fresh.p[0]);
        index.remove(i);
        b = (b - 0.5f64).max(0.0);
    }
}
