use super::LpError;
use crate::types::Order;

fn check_prices(p: &[f64]) -> Result<(), LpError> {
    match p.iter().position(|&v| !(v >= 0.0)) {
        Some(index) => Err(LpError::NegativePrice { index, value: p[index] }),
        None => Ok(()),
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Empirical dual objective `d·p + (1/N) Σ (u_k − a_kᵀp)⁺`.
///
/// With no orders this is just `d·p`.
pub fn dual_objective(p: &[f64], orders: &[Order], d: &[f64]) -> Result<f64, LpError> {
    check_prices(p)?;
    let linear = dot(d, p);
    if orders.is_empty() {
        return Ok(linear);
    }
    let excess: f64 = orders.iter().map(|o| (o.u - o.priced(p)).max(0.0)).sum();
    Ok(linear + excess / orders.len() as f64)
}

/// Subgradient `d − (1/N) Σ a_k·1{u_k > a_kᵀp}` of [`dual_objective`].
///
/// Ties `u_k = a_kᵀp` count as rejected, the same rule the policies use.
pub fn dual_subgradient(p: &[f64], orders: &[Order], d: &[f64]) -> Result<Vec<f64>, LpError> {
    check_prices(p)?;
    let mut g = d.to_vec();
    if orders.is_empty() {
        return Ok(g);
    }
    let scale = 1.0 / orders.len() as f64;
    for o in orders.iter().filter(|o| o.u > o.priced(p)) {
        for (gi, ai) in g.iter_mut().zip(&o.a) {
            *gi -= ai * scale;
        }
    }
    Ok(g)
}

/// Accept iff `u > aᵀp` and the remaining budget covers `a` in every entry.
pub fn accept_decision(order: &Order, p: &[f64], remaining: &[f64]) -> bool {
    order.u > order.priced(p) && order.a.iter().zip(remaining).all(|(a, b)| b >= a)
}

/// Price at which a single-resource order becomes marginal.
///
/// Returns the smallest float `r ≥ u/a` with `a·r ≥ u`, so that pricing at
/// the returned breakpoint rejects the order that defines it.
pub(crate) fn breakpoint_ratio(u: f64, a: f64) -> f64 {
    let mut r = u / a;
    while a * r < u {
        r = r.next_up();
    }
    r
}
