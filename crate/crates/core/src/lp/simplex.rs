//! Dense revised simplex for bounded packing LPs
//!
//! ```text
//! maximize    cᵀx
//! subject to  A x ≤ b        (b ≥ 0, one slack per row)
//!             0 ≤ x ≤ ub     (ub may be +∞)
//! ```
//!
//! Upper bounds are handled implicitly (bound flips), so the basis is only
//! `rows × rows`. The slack basis is feasible from the start, so no phase
//! one is needed. Pricing is Dantzig until `2·(rows + cols)` iterations,
//! then Bland's rule to rule out cycling.

use super::LpError;

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-8;
const COST_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone)]
pub struct SimplexSolution {
    /// Structural variables only.
    pub x: Vec<f64>,
    pub value: f64,
    /// Optimal row duals `c_Bᵀ B⁻¹`, clamped at zero.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Basic(usize),
    Lower,
    Upper,
}

/// Column-major problem data. `cols[j]` is column `j` of `A`.
pub struct BoundedLp<'a> {
    pub cost: &'a [f64],
    pub cols: &'a [Vec<f64>],
    pub rhs: &'a [f64],
    pub upper: &'a [f64],
}

struct State<'a> {
    lp: &'a BoundedLp<'a>,
    rows: usize,
    ncols: usize,
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    status: Vec<Status>,
    pivots: usize,
}

impl<'a> State<'a> {
    fn cost(&self, j: usize) -> f64 {
        if j < self.ncols {
            self.lp.cost[j]
        } else {
            0.0
        }
    }

    fn upper(&self, j: usize) -> f64 {
        if j < self.ncols {
            self.lp.upper[j]
        } else {
            f64::INFINITY
        }
    }

    /// `Σ_i w_i A_ij` for structural or slack column `j`.
    fn col_dot(&self, w: &[f64], j: usize) -> f64 {
        if j < self.ncols {
            self.lp.cols[j].iter().zip(w).map(|(a, w)| a * w).sum()
        } else {
            w[j - self.ncols]
        }
    }

    /// `B⁻¹ A_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let r = self.rows;
        let mut out = vec![0.0; r];
        if j < self.ncols {
            let col = &self.lp.cols[j];
            for i in 0..r {
                out[i] = (0..r).map(|k| self.binv[i * r + k] * col[k]).sum();
            }
        } else {
            let k = j - self.ncols;
            for i in 0..r {
                out[i] = self.binv[i * r + k];
            }
        }
        out
    }

    fn duals(&self) -> Vec<f64> {
        let r = self.rows;
        (0..r)
            .map(|k| (0..r).map(|i| self.cost(self.basis[i]) * self.binv[i * r + k]).sum())
            .collect()
    }

    /// Rebuilds `B⁻¹` by Gauss-Jordan and recomputes basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let r = self.rows;
        let mut m = vec![0.0; r * r];
        for (i, &j) in self.basis.iter().enumerate() {
            for k in 0..r {
                m[k * r + i] = if j < self.ncols {
                    self.lp.cols[j][k]
                } else if j - self.ncols == k {
                    1.0
                } else {
                    0.0
                };
            }
        }
        let mut inv = vec![0.0; r * r];
        for i in 0..r {
            inv[i * r + i] = 1.0;
        }
        for c in 0..r {
            let piv = (c..r)
                .max_by(|&x, &y| m[x * r + c].abs().total_cmp(&m[y * r + c].abs()))
                .unwrap();
            if m[piv * r + c].abs() < 1e-12 {
                return Err(LpError::Singular { pivots: self.pivots });
            }
            for k in 0..r {
                m.swap(c * r + k, piv * r + k);
                inv.swap(c * r + k, piv * r + k);
            }
            let s = 1.0 / m[c * r + c];
            for k in 0..r {
                m[c * r + k] *= s;
                inv[c * r + k] *= s;
            }
            for i in 0..r {
                if i != c {
                    let f = m[i * r + c];
                    if f != 0.0 {
                        for k in 0..r {
                            m[i * r + k] -= f * m[c * r + k];
                            inv[i * r + k] -= f * inv[c * r + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        let mut resid = self.lp.rhs.to_vec();
        for j in 0..self.ncols {
            if self.status[j] == Status::Upper {
                for (k, a) in self.lp.cols[j].iter().enumerate() {
                    resid[k] -= a * self.lp.upper[j];
                }
            }
        }
        for i in 0..r {
            let v: f64 = (0..r).map(|k| self.binv[i * r + k] * resid[k]).sum();
            self.xb[i] = if v.abs() < FEAS_TOL { v.max(0.0) } else { v };
        }
        Ok(())
    }

    fn pivot(&mut self, row: usize, alpha: &[f64]) {
        let r = self.rows;
        let pv = alpha[row];
        for k in 0..r {
            self.binv[row * r + k] /= pv;
        }
        for i in 0..r {
            if i != row && alpha[i] != 0.0 {
                let f = alpha[i];
                for k in 0..r {
                    self.binv[i * r + k] -= f * self.binv[row * r + k];
                }
            }
        }
    }
}

/// Solves a bounded packing LP. See the module docs for the form.
pub fn solve_bounded(lp: &BoundedLp<'_>) -> Result<SimplexSolution, LpError> {
    let rows = lp.rhs.len();
    let ncols = lp.cost.len();
    if lp.cols.len() != ncols || lp.upper.len() != ncols {
        return Err(LpError::Dimension { expected: ncols, found: lp.cols.len() });
    }
    if let Some(c) = lp.cols.iter().find(|c| c.len() != rows) {
        return Err(LpError::Dimension { expected: rows, found: c.len() });
    }
    if let Some(index) = lp.rhs.iter().position(|&b| !(b >= 0.0)) {
        return Err(LpError::NegativeBudget { index });
    }
    let total = ncols + rows;
    let mut st = State {
        lp,
        rows,
        ncols,
        basis: (ncols..total).collect(),
        binv: {
            let mut v = vec![0.0; rows * rows];
            for i in 0..rows {
                v[i * rows + i] = 1.0;
            }
            v
        },
        xb: lp.rhs.to_vec(),
        status: (0..total)
            .map(|j| if j >= ncols { Status::Basic(j - ncols) } else { Status::Lower })
            .collect(),
        pivots: 0,
    };

    let bland_after = 2 * total;
    let limit = 50 * total + 1000;
    let mut iterations = 0;
    loop {
        if iterations >= limit {
            return Err(LpError::IterationLimit { pivots: st.pivots });
        }
        let bland = iterations >= bland_after;
        let y = st.duals();

        let mut entering: Option<(usize, f64)> = None;
        for j in 0..total {
            let s = st.status[j];
            if matches!(s, Status::Basic(_)) {
                continue;
            }
            let dj = st.cost(j) - st.col_dot(&y, j);
            let gain = match s {
                Status::Lower if dj > COST_TOL => dj,
                Status::Upper if dj < -COST_TOL => -dj,
                _ => continue,
            };
            if bland {
                entering = Some((j, gain));
                break;
            }
            if entering.map_or(true, |(_, g)| gain > g) {
                entering = Some((j, gain));
            }
        }
        let Some((j, _)) = entering else { break };
        iterations += 1;

        let alpha = st.ftran(j);
        let dir = if st.status[j] == Status::Lower { 1.0 } else { -1.0 };
        let mut step = st.upper(j);
        let mut leave: Option<(usize, bool)> = None;
        for i in 0..rows {
            let delta = dir * alpha[i];
            let (t, to_upper) = if delta > PIVOT_TOL {
                (st.xb[i].max(0.0) / delta, false)
            } else if delta < -PIVOT_TOL {
                let ub = st.upper(st.basis[i]);
                if ub.is_infinite() {
                    continue;
                }
                ((ub - st.xb[i]).max(0.0) / -delta, true)
            } else {
                continue;
            };
            let better = match leave {
                None => t < step,
                Some((k, _)) => {
                    if bland {
                        t < step || (t == step && st.basis[i] < st.basis[k])
                    } else {
                        t < step || (t == step && alpha[i].abs() > alpha[k].abs())
                    }
                }
            };
            if better {
                step = t;
                leave = Some((i, to_upper));
            }
        }
        if step.is_infinite() {
            return Err(LpError::Unbounded);
        }
        for i in 0..rows {
            st.xb[i] -= dir * step * alpha[i];
        }
        match leave {
            None => {
                st.status[j] = if dir > 0.0 { Status::Upper } else { Status::Lower };
            }
            Some((row, to_upper)) => {
                let out = st.basis[row];
                st.status[out] = if to_upper { Status::Upper } else { Status::Lower };
                st.xb[row] = if dir > 0.0 { step } else { st.upper(j) - step };
                st.basis[row] = j;
                st.status[j] = Status::Basic(row);
                st.pivot(row, &alpha);
                st.pivots += 1;
                if st.pivots % REFACTOR_EVERY == 0 {
                    st.refactor()?;
                }
            }
        }
        for v in st.xb.iter_mut() {
            if v.abs() < FEAS_TOL * 1e-3 {
                *v = 0.0;
            }
        }
    }

    st.refactor()?;
    let mut x = vec![0.0; ncols];
    for j in 0..ncols {
        x[j] = match st.status[j] {
            Status::Basic(i) => st.xb[i].clamp(0.0, lp.upper[j]),
            Status::Lower => 0.0,
            Status::Upper => lp.upper[j],
        };
    }
    let value = x.iter().zip(lp.cost).map(|(x, c)| x * c).sum();
    let duals = st.duals().into_iter().map(|v| v.max(0.0)).collect();
    Ok(SimplexSolution { x, value, duals, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_variable_textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 ; optimum (2, 6) = 36
        let cols = vec![vec![1.0, 0.0, 3.0], vec![0.0, 2.0, 2.0]];
        let lp = BoundedLp {
            cost: &[3.0, 5.0],
            cols: &cols,
            rhs: &[4.0, 12.0, 18.0],
            upper: &[f64::INFINITY, f64::INFINITY],
        };
        let s = solve_bounded(&lp).unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        // duals (0, 1.5, 1): b·y = 36
        assert!((s.duals[0]).abs() < 1e-12);
        assert!((s.duals[1] - 1.5).abs() < 1e-12);
        assert!((s.duals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounded_knapsack_is_greedy() {
        let cols = vec![vec![1.0], vec![1.0], vec![1.0]];
        let lp = BoundedLp { cost: &[1.0, 0.4, 0.7], cols: &cols, rhs: &[1.5], upper: &[1.0; 3] };
        let s = solve_bounded(&lp).unwrap();
        assert!((s.value - 1.35).abs() < 1e-12);
        assert_eq!(s.x, vec![1.0, 0.0, 0.5]);
        assert!((s.duals[0] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_is_degenerate_but_solves() {
        let cols = vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let lp = BoundedLp { cost: &[2.0, 1.0, 1.0], cols: &cols, rhs: &[0.0, 1.0], upper: &[1.0; 3] };
        let s = solve_bounded(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.x[2], 1.0);
    }

    #[test]
    fn negative_rhs_is_rejected() {
        let cols = vec![vec![1.0]];
        let lp = BoundedLp { cost: &[1.0], cols: &cols, rhs: &[-1.0], upper: &[1.0] };
        assert!(matches!(solve_bounded(&lp), Err(LpError::NegativeBudget { index: 0 })));
    }
}
