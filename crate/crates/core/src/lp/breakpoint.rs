//! Exact single-resource dual minimization.
//!
//! For `m = 1` the dual objective `b·p + Σ (u_k − a_k p)⁺` is piecewise
//! linear and convex with kinks at the ratios `u_k / a_k`. Its right
//! derivative is `b − W(p)` where `W(p)` is the consumption of all orders
//! whose ratio exceeds `p`, so the smallest minimizer is the smallest
//! candidate in `{0} ∪ {u_k/a_k}` with `W(p) ≤ b`.
//!
//! Orders with `a_k = 0` or `u_k ≤ 0` add a constant and never move the
//! minimizer, so they are dropped before the sweep.

use super::objective::{breakpoint_ratio, dual_objective};
use super::{DualSolution, DualStatus, LpError};
use crate::types::Order;

/// (ratio, weight) for every order that shapes the objective.
fn kinks(orders: &[Order]) -> Result<Vec<(f64, f64)>, LpError> {
    let mut out = Vec::with_capacity(orders.len());
    for o in orders {
        if o.a.len() != 1 {
            return Err(LpError::Dimension { expected: 1, found: o.a.len() });
        }
        let a = o.a[0];
        if a < 0.0 {
            return Err(LpError::NegativeConsumption);
        }
        if a > 0.0 && o.u > 0.0 {
            out.push((breakpoint_ratio(o.u, a), a));
        }
    }
    Ok(out)
}

/// Smallest minimizer over `p ≥ 0` of `d·p + (1/N) Σ (u_k − a_k p)⁺`.
pub fn solve_dual_breakpoint(orders: &[Order], d: f64) -> Result<DualSolution, LpError> {
    if !(d > 0.0) {
        return Err(LpError::NonPositiveBudget(d));
    }
    solve_dual_breakpoint_budget(orders, d * orders.len() as f64, d)
}

/// Same minimizer, stated with the unnormalized budget `b`.
///
/// `d` is only used to report the normalized objective; pass `b / N`.
pub(crate) fn solve_dual_breakpoint_budget(
    orders: &[Order],
    b: f64,
    d: f64,
) -> Result<DualSolution, LpError> {
    if !(b >= 0.0) {
        return Err(LpError::NegativeBudget { index: 0 });
    }
    if orders.is_empty() {
        return Ok(DualSolution::optimal(vec![0.0], 0.0, 0.0));
    }
    let mut k = kinks(orders)?;
    k.sort_unstable_by(|x, y| y.0.total_cmp(&x.0));

    // longest prefix (by descending ratio) whose consumption fits in b
    let mut cum = 0.0;
    let mut fit = k.len();
    for (i, &(_, w)) in k.iter().enumerate() {
        if cum + w > b {
            fit = i;
            break;
        }
        cum += w;
    }
    let p = if fit == k.len() { 0.0 } else { k[fit].0 };

    let mut status = DualStatus::Optimal;
    let mut tie_note = None;
    // W(p) == b means the right derivative vanishes: flat up to the next kink
    let above: f64 = k.iter().take_while(|kk| kk.0 > p).map(|kk| kk.1).sum();
    if above == b {
        let upper = k.iter().rev().map(|kk| kk.0).find(|&r| r > p);
        if let Some(q) = upper {
            status = DualStatus::DegenerateTie;
            tie_note = Some(format!("flat optimum on [{p}, {q}]"));
        }
    }
    let objective = dual_objective(&[p], orders, &[d])?;
    let scaled = b * p + orders.iter().map(|o| (o.u - o.a[0] * p).max(0.0)).sum::<f64>();
    Ok(DualSolution { p: vec![p], objective, scaled_objective: scaled, status, tie_note })
}

/// Order-statistic index over a fixed pool of single-resource orders that
/// answers the smallest-minimizer query in `O(log N)` after removals.
///
/// Orders are ranked once by descending ratio; a Fenwick tree over ranks
/// holds the consumption of the orders still active. The query returns the
/// same price as [`solve_dual_breakpoint`] on the active subset.
#[derive(Debug, Clone)]
pub struct IncrementalDual {
    ratio_by_rank: Vec<f64>,
    rank_of: Vec<Option<usize>>,
    tree: Vec<f64>,
    weight: Vec<f64>,
}

impl IncrementalDual {
    pub fn new(orders: &[Order]) -> Result<Self, LpError> {
        let mut entries = Vec::new();
        for (idx, o) in orders.iter().enumerate() {
            if o.a.len() != 1 {
                return Err(LpError::Dimension { expected: 1, found: o.a.len() });
            }
            let a = o.a[0];
            if a < 0.0 {
                return Err(LpError::NegativeConsumption);
            }
            if a > 0.0 && o.u > 0.0 {
                entries.push((breakpoint_ratio(o.u, a), a, idx));
            }
        }
        entries.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.2.cmp(&y.2)));
        let len = entries.len();
        let mut rank_of = vec![None; orders.len()];
        let mut ratio_by_rank = Vec::with_capacity(len);
        let mut weight = vec![0.0; len + 1];
        let mut tree = vec![0.0; len + 1];
        for (r, &(ratio, a, idx)) in entries.iter().enumerate() {
            rank_of[idx] = Some(r + 1);
            ratio_by_rank.push(ratio);
            weight[r + 1] = a;
            tree[r + 1] = a;
        }
        // linear-time Fenwick build
        for i in 1..=len {
            let j = i + (i & i.wrapping_neg());
            if j <= len {
                tree[j] += tree[i];
            }
        }
        Ok(Self { ratio_by_rank, rank_of, tree, weight })
    }

    /// Drops order `idx` (its position in the pool) from the active set.
    pub fn remove(&mut self, idx: usize) {
        if let Some(r) = self.rank_of[idx].take() {
            self.weight[r] = 0.0;
            // rebuild ancestors from their children instead of subtracting,
            // so fully removed ranges sum to an exact zero
            let mut i = r;
            while i < self.tree.len() {
                let low = i & i.wrapping_neg();
                let mut s = self.weight[i];
                let mut k = 1;
                while k < low {
                    s += self.tree[i - k];
                    k <<= 1;
                }
                self.tree[i] = s;
                i += low;
            }
        }
    }

    /// Smallest minimizer of `b·p + Σ_active (u_k − a_k p)⁺` over `p ≥ 0`.
    pub fn price(&self, b: f64) -> f64 {
        let len = self.ratio_by_rank.len();
        let mut pos = 0;
        let mut acc = 0.0;
        let mut step = if len == 0 { 0 } else { 1usize << (usize::BITS - 1 - len.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= len && acc + self.tree[next] <= b {
                pos = next;
                acc += self.tree[next];
            }
            step >>= 1;
        }
        if pos == len {
            0.0
        } else {
            self.ratio_by_rank[pos]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_min(orders: &[Order], d: f64, hi: f64, step: f64) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        let mut k = 0;
        loop {
            let p = k as f64 * step;
            if p > hi {
                break;
            }
            let v = dual_objective(&[p], orders, &[d]).unwrap();
            if v < best.0 - 1e-15 {
                best = (v, p);
            }
            k += 1;
        }
        best
    }

    #[test]
    fn flat_optimum_returns_left_end() {
        let orders = vec![Order::scalar(1.0, 1.0), Order::scalar(0.4, 1.0)];
        let s = solve_dual_breakpoint(&orders, 0.5).unwrap();
        assert_eq!(s.p, vec![0.4]);
        assert!((s.objective - 0.5).abs() < 1e-15);
        assert_eq!(s.status, DualStatus::DegenerateTie);
        let (v, _) = grid_min(&orders, 0.5, 1.2, 1e-5);
        assert!((v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn empty_orders_give_zero_price() {
        let s = solve_dual_breakpoint(&[], 0.5).unwrap();
        assert_eq!(s.p, vec![0.0]);
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn non_positive_budget_is_a_fault() {
        assert!(matches!(solve_dual_breakpoint(&[], 0.0), Err(LpError::NonPositiveBudget(_))));
    }

    #[test]
    fn multi_resource_orders_are_rejected() {
        let o = vec![Order::new(1.0, vec![1.0, 1.0])];
        assert!(matches!(solve_dual_breakpoint(&o, 0.5), Err(LpError::Dimension { .. })));
    }

    #[test]
    fn zero_consumption_orders_do_not_move_the_price() {
        let mut orders = vec![Order::scalar(1.0, 1.0), Order::scalar(0.4, 1.0)];
        let base = solve_dual_breakpoint(&orders, 0.25).unwrap().p;
        orders.push(Order::scalar(5.0, 0.0));
        let s = solve_dual_breakpoint(&orders, 0.25 * 2.0 / 3.0).unwrap();
        assert_eq!(s.p, base);
    }

    #[test]
    fn matches_breakpoint_enumeration_on_uniform_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let orders: Vec<Order> = (0..100).map(|_| Order::scalar(rng.gen::<f64>(), 1.0)).collect();
        let s = solve_dual_breakpoint(&orders, 0.25).unwrap();
        // enumerate every candidate and keep the smallest argmin
        let mut cands: Vec<f64> = orders.iter().map(|o| o.u).collect();
        cands.push(0.0);
        cands.sort_by(f64::total_cmp);
        let vals: Vec<f64> =
            cands.iter().map(|&c| dual_objective(&[c], &orders, &[0.25]).unwrap()).collect();
        let best = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let first = cands[vals.iter().position(|&v| v <= best + 1e-12).unwrap()];
        assert_eq!(s.p[0], first);
        // and the grid oracle lands within one breakpoint gap
        let (_, gp) = grid_min(&orders, 0.25, 1.2, 1e-4);
        let gap = cands.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!((gp - s.p[0]).abs() <= gap + 1e-4);
    }

    #[test]
    fn incremental_index_tracks_fresh_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let orders: Vec<Order> = (0..300)
            .map(|i| {
                let a = if i % 3 == 0 { 1.0 } else { rng.gen_range(0.5..1.5) };
                let u = if i % 17 == 0 { 0.0 } else { rng.gen::<f64>() };
                Order::scalar(u, a)
            })
            .collect();
        let mut idx = IncrementalDual::new(&orders).unwrap();
        for j in 0..orders.len() {
            let suffix = &orders[j..];
            for &b in &[0.0, 3.0, 0.25 * suffix.len() as f64, 1e6] {
                let fresh = solve_dual_breakpoint_budget(suffix, b, b / suffix.len() as f64).unwrap();
                assert_eq!(idx.price(b), fresh.p[0], "step {j}, b {b}");
            }
            idx.remove(j);
        }
        assert_eq!(idx.price(0.0), 0.0);
    }
}
