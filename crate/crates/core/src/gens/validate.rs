//! Grid checks of the boundedness and smoothness contract every family
//! declares through its [`Bounds`](super::Bounds).

use super::family::GeneratorSpec;
use super::law::ConsumptionLaw;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DensityLowerBound,
    DensityUpperBound,
    Normalization,
    Support,
    /// Gradient in the reward or consumption coordinates exceeds `L̄`.
    Smoothness,
    /// Gradient in time exceeds `L̄` (jumps between phases land here).
    TimeSmoothness,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::DensityLowerBound => "density-lower-bound",
            ViolationKind::DensityUpperBound => "density-upper-bound",
            ViolationKind::Normalization => "normalization",
            ViolationKind::Support => "support",
            ViolationKind::Smoothness => "smoothness",
            ViolationKind::TimeSmoothness => "time-smoothness",
        };
        f.write_str(s)
    }
}

/// One violated check class, with the first offending grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub occurrences: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationGrid {
    pub times: usize,
    pub rewards: usize,
    /// Points per consumption coordinate for box consumption.
    pub consumptions: usize,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self { times: 101, rewards: 200, consumptions: 9 }
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, kind: ViolationKind, detail: impl FnOnce() -> String) {
        match self.0.iter_mut().find(|v| v.kind == kind) {
            Some(v) => v.occurrences += 1,
            None => self.0.push(Violation { kind, detail: detail(), occurrences: 1 }),
        }
    }
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k <= 1 {
        return vec![lo];
    }
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

fn simpson<F: Fn(f64) -> f64>(lo: f64, hi: f64, intervals: usize, f: F) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn consumption_grid(law: &ConsumptionLaw, per_axis: usize) -> Vec<Vec<f64>> {
    match law {
        ConsumptionLaw::Atom(c) => vec![c.clone()],
        ConsumptionLaw::Box(b) => {
            let axes: Vec<Vec<f64>> = b.iter().map(|t| linspace(t.lo, t.hi, per_axis)).collect();
            let mut out = vec![Vec::new()];
            for axis in &axes {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        axis.iter().map(move |&x| {
                            let mut p = prefix.clone();
                            p.push(x);
                            p
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

fn support_of(law: &ConsumptionLaw) -> Vec<(f64, f64)> {
    match law {
        ConsumptionLaw::Atom(c) => c.iter().map(|&v| (v, v)).collect(),
        ConsumptionLaw::Box(b) => b.iter().map(|t| (t.lo, t.hi)).collect(),
    }
}

/// Returns one [`Violation`] per failing check class; empty iff every grid
/// check passes.
///
/// Density bounds, normalization and reward-direction gradients are checked
/// on the reward support in force at each time. Time gradients compare the
/// densities on all of `[0, ū]`, so a support that jumps between times shows
/// up as a time-smoothness failure.
pub fn validate_generator(spec: &GeneratorSpec, grid: ValidationGrid) -> Vec<Violation> {
    let b = spec.bounds;
    let mut out = Collector(Vec::new());
    let tol = 1e-9;
    if !(b.mu_lo > 0.0) {
        out.push(ViolationKind::DensityLowerBound, || format!("declared lower density bound {} is not positive", b.mu_lo));
    }
    let times = linspace(0.0, 1.0, grid.times.max(2));
    let h_t = times[1] - times[0];
    let full_u = linspace(0.0, b.u_max, grid.rewards.max(2));
    let base_support = support_of(&spec.law_at_time(0.0).consumption);

    for (ti, &t) in times.iter().enumerate() {
        let law = spec.law_at_time(t);
        let r = law.reward;
        if r.lo < 0.0 || r.hi > b.u_max * (1.0 + tol) {
            out.push(ViolationKind::Support, || format!("reward support [{}, {}] at t={t} leaves [0, ū]", r.lo, r.hi));
        }
        let sup = support_of(&law.consumption);
        if sup.iter().any(|&(lo, hi)| lo < 0.0 || hi > b.alpha * (1.0 + tol)) {
            out.push(ViolationKind::Support, || format!("consumption support at t={t} leaves [0, α]"));
        }
        if sup != base_support {
            out.push(ViolationKind::Support, || format!("consumption support changes at t={t}"));
        }

        let mass = simpson(r.lo, r.hi, grid.rewards, |u| r.pdf(u));
        if (mass - 1.0).abs() > 1e-6 {
            out.push(ViolationKind::Normalization, || format!("reward density integrates to {mass} at t={t}"));
        }
        if let ConsumptionLaw::Box(boxes) = &law.consumption {
            for (i, tb) in boxes.iter().enumerate() {
                let mass = simpson(tb.lo, tb.hi, grid.rewards, |x| tb.pdf(x));
                if (mass - 1.0).abs() > 1e-6 {
                    out.push(ViolationKind::Normalization, || format!("consumption entry {i} integrates to {mass} at t={t}"));
                }
            }
        }

        let next = (ti + 1 < times.len()).then(|| spec.law_at_time(times[ti + 1]));
        let us = linspace(r.lo, r.hi, grid.rewards.max(2));
        let h_u = us[1] - us[0];
        for a in consumption_grid(&law.consumption, grid.consumptions) {
            for (k, &u) in us.iter().enumerate() {
                let f = r.pdf(u);
                if f < b.mu_lo * (1.0 - tol) {
                    out.push(ViolationKind::DensityLowerBound, || format!("f={f} < μ_lo at t={t}, u={u}"));
                }
                if f > b.mu_hi * (1.0 + tol) {
                    out.push(ViolationKind::DensityUpperBound, || format!("f={f} > μ_hi at t={t}, u={u}"));
                }
                if k + 1 < us.len() {
                    let fu = (r.pdf(us[k + 1]) - f) / h_u;
                    if fu.abs() > b.l_bar * (1.0 + tol) {
                        out.push(ViolationKind::Smoothness, || format!("|∂f/∂u|={} at t={t}, u={u}", fu.abs()));
                    }
                }
            }
            let v = law.consumption.density(&a);
            if v > b.mu_hi * (1.0 + tol) {
                out.push(ViolationKind::DensityUpperBound, || format!("v={v} > μ_hi at t={t}"));
            }
            if let ConsumptionLaw::Box(boxes) = &law.consumption {
                // forward differences along each axis, staying inside the box
                let mut g2 = 0.0;
                for (i, tb) in boxes.iter().enumerate() {
                    let h = (tb.hi - tb.lo) / (grid.consumptions.max(2) - 1) as f64;
                    if a[i] + h <= tb.hi * (1.0 + tol) {
                        let mut a2 = a.clone();
                        a2[i] = (a[i] + h).min(tb.hi);
                        let da = (law.consumption.density(&a2) - v) / h;
                        g2 += da * da;
                    }
                }
                if g2.sqrt() > b.l_bar * (1.0 + tol) {
                    out.push(ViolationKind::Smoothness, || format!("|∇_a v|={} at t={t}", g2.sqrt()));
                }
            }
            if let Some(next) = &next {
                let ft = full_u
                    .iter()
                    .map(|&u| {
                        let f1 = if next.consumption.density(&a) > 0.0 { next.reward.pdf(u) } else { 0.0 };
                        (f1 - r.pdf(u)).abs() / h_t
                    })
                    .fold(0.0, f64::max);
                let vt = (next.consumption.density(&a) - v).abs() / h_t;
                if ft.max(vt) > b.l_bar * (1.0 + tol) {
                    out.push(ViolationKind::TimeSmoothness, || format!("|∂/∂t| = {} between t={t} and t={}", ft.max(vt), t + h_t));
                }
            }
        }
    }
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gens::family::{Consumption, Family, Schedule, TwoPhaseVariant};

    fn kinds(v: &[Violation]) -> Vec<ViolationKind> {
        v.iter().map(|x| x.kind).collect()
    }

    #[test]
    fn stationary_passes() {
        assert!(validate_generator(&GeneratorSpec::stationary_uniform(), ValidationGrid::default()).is_empty());
    }

    #[test]
    fn smooth_families_pass() {
        let fams = vec![
            GeneratorSpec::sinusoidal_default(),
            GeneratorSpec::new(Family::LinearDrift {
                u_max: 1.0,
                start: -0.5,
                end: 0.5,
                consumption: Consumption::Box {
                    m: 1,
                    lo: 0.5,
                    hi: 1.5,
                    slope: Schedule::Sine { mean: 0.0, amplitude: 0.3, cycles: 1.0, phase: 0.0 },
                },
            })
            .unwrap(),
            GeneratorSpec::new(Family::CustomTable {
                u_max: 2.0,
                knots: vec![[0.0, 0.0], [0.4, 0.7], [1.0, -0.3]],
                consumption: Consumption::Box { m: 2, lo: 0.2, hi: 1.0, slope: Schedule::default() },
            })
            .unwrap(),
        ];
        for spec in fams {
            let v = validate_generator(&spec, ValidationGrid::default());
            assert!(v.is_empty(), "{}: {v:?}", spec.label());
        }
    }

    #[test]
    fn two_phase_fails_only_time_smoothness() {
        let v = validate_generator(&GeneratorSpec::two_phase(TwoPhaseVariant::P2), ValidationGrid::default());
        assert_eq!(kinds(&v), vec![ViolationKind::TimeSmoothness]);
        let v = validate_generator(&GeneratorSpec::two_phase(TwoPhaseVariant::P1), ValidationGrid::default());
        assert!(v.is_empty());
    }

    #[test]
    fn vanishing_density_fails_lower_bound() {
        let spec = GeneratorSpec::new(Family::Sinusoidal {
            u_max: 1.0,
            mean: 0.0,
            amplitude: 1.0,
            cycles: 1.0,
            phase: 0.0,
            consumption: Consumption::default(),
        })
        .unwrap();
        assert_eq!(spec.bounds.mu_lo, 0.0);
        let v = validate_generator(&spec, ValidationGrid::default());
        assert_eq!(kinds(&v), vec![ViolationKind::DensityLowerBound]);
    }

    #[test]
    fn understated_gradient_bound_fails_smoothness() {
        let mut spec = GeneratorSpec::sinusoidal_default();
        spec.bounds.l_bar = 0.1;
        let k = kinds(&validate_generator(&spec, ValidationGrid::default()));
        assert!(k.contains(&ViolationKind::Smoothness));
        assert!(k.contains(&ViolationKind::TimeSmoothness));
    }

    #[test]
    fn sinusoidal_density_integrates_to_one() {
        let spec = GeneratorSpec::sinusoidal_default();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            let mass = simpson(0.0, 1.0, 400, |u| crate::gens::density_f(&spec, t, &[1.0], u));
            assert!((mass - 1.0).abs() < 1e-6);
        }
    }
}
