use super::objective::{breakpoint_ratio, dual_objective};
use super::simplex::{solve_bounded, BoundedLp};
use super::{DualSolution, LpError, PrimalSolution};
use crate::types::Order;

fn check_orders(orders: &[Order], m: usize) -> Result<(), LpError> {
    for o in orders {
        if o.a.len() != m {
            return Err(LpError::Dimension { expected: m, found: o.a.len() });
        }
        if o.a.iter().any(|&a| a < 0.0) {
            return Err(LpError::NegativeConsumption);
        }
    }
    Ok(())
}

fn count_fractional(x: &[f64]) -> usize {
    x.iter().filter(|&&v| v > 0.0 && v < 1.0).count()
}

/// Optimal fractional offline solution of
/// `max Σ u_k x_k  s.t.  Σ a_k x_k ≤ b, 0 ≤ x ≤ 1`.
///
/// One resource uses the ratio-sorted greedy fill; more resources use the
/// bounded simplex. `dual_price` is the resource shadow price in both cases.
pub fn solve_offline_fractional(orders: &[Order], b: &[f64]) -> Result<PrimalSolution, LpError> {
    if let Some(index) = b.iter().position(|&v| !(v >= 0.0)) {
        return Err(LpError::NegativeBudget { index });
    }
    check_orders(orders, b.len())?;
    if b.len() == 1 {
        Ok(greedy(orders, b[0]))
    } else {
        simplex_primal(orders, b)
    }
}

fn greedy(orders: &[Order], b: f64) -> PrimalSolution {
    let mut x = vec![0.0; orders.len()];
    let mut ranked = Vec::with_capacity(orders.len());
    for (k, o) in orders.iter().enumerate() {
        if o.u > 0.0 {
            if o.a[0] == 0.0 {
                x[k] = 1.0;
            } else {
                ranked.push((breakpoint_ratio(o.u, o.a[0]), k));
            }
        }
    }
    ranked.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
    let mut left = b;
    let mut price = 0.0;
    for &(r, k) in &ranked {
        let a = orders[k].a[0];
        if a <= left {
            x[k] = 1.0;
            left -= a;
        } else {
            x[k] = left / a;
            price = r;
            break;
        }
    }
    let value = orders.iter().zip(&x).map(|(o, x)| o.u * x).sum();
    PrimalSolution { basis_note: count_fractional(&x), x, value, dual_price: vec![price] }
}

fn simplex_primal(orders: &[Order], b: &[f64]) -> Result<PrimalSolution, LpError> {
    let cost: Vec<f64> = orders.iter().map(|o| o.u).collect();
    let cols: Vec<Vec<f64>> = orders.iter().map(|o| o.a.clone()).collect();
    let upper = vec![1.0; orders.len()];
    let sol = solve_bounded(&BoundedLp { cost: &cost, cols: &cols, rhs: b, upper: &upper })?;
    Ok(PrimalSolution {
        basis_note: count_fractional(&sol.x),
        x: sol.x,
        value: sol.value,
        dual_price: sol.duals,
    })
}

/// Minimizes `d·p + (1/N) Σ y_k` over `y_k ≥ u_k − a_kᵀp, y ≥ 0, p ≥ 0`.
///
/// The problem is solved through its LP dual, the bounded packing problem
/// with budget `N·d`, and `p` is read off the optimal basis.
pub fn solve_dual_simplex(orders: &[Order], d: &[f64]) -> Result<DualSolution, LpError> {
    if orders.is_empty() {
        return Err(LpError::Empty);
    }
    if let Some(index) = d.iter().position(|&v| !(v >= 0.0)) {
        return Err(LpError::NegativeBudget { index });
    }
    check_orders(orders, d.len())?;
    let nf = orders.len() as f64;
    let b: Vec<f64> = d.iter().map(|v| v * nf).collect();
    let primal = simplex_primal(orders, &b)?;
    solution_from_price(primal.dual_price, orders, &b, d)
}

pub(crate) fn solve_dual_simplex_budget(orders: &[Order], b: &[f64]) -> Result<DualSolution, LpError> {
    if orders.is_empty() {
        return Ok(DualSolution::optimal(vec![0.0; b.len()], 0.0, 0.0));
    }
    check_orders(orders, b.len())?;
    let primal = simplex_primal(orders, b)?;
    let nf = orders.len() as f64;
    let d: Vec<f64> = b.iter().map(|v| v / nf).collect();
    solution_from_price(primal.dual_price, orders, b, &d)
}

fn solution_from_price(p: Vec<f64>, orders: &[Order], b: &[f64], d: &[f64]) -> Result<DualSolution, LpError> {
    let objective = dual_objective(&p, orders, d)?;
    let scaled = b.iter().zip(&p).map(|(b, p)| b * p).sum::<f64>()
        + orders.iter().map(|o| (o.u - o.priced(&p)).max(0.0)).sum::<f64>();
    Ok(DualSolution::optimal(p, objective, scaled))
}
