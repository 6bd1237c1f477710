//! Parametric nonstationary families and their declared regularity bounds.

use super::law::{ConsumptionLaw, OrderLaw, Tilted};
use super::GenError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A scalar parameter as a function of normalized time `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    Constant { value: f64 },
    Linear { start: f64, end: f64 },
    Sine {
        mean: f64,
        amplitude: f64,
        #[serde(default = "one")]
        cycles: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise-linear interpolation of `(t, value)` knots.
    Table { knots: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Constant { value: 0.0 }
    }
}

impl Schedule {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Linear { start, end } => start + (end - start) * t,
            Schedule::Sine { mean, amplitude, cycles, phase } => {
                mean + amplitude * (2.0 * PI * cycles * t + phase).sin()
            }
            Schedule::Table { knots } => {
                if t <= knots[0][0] {
                    return knots[0][1];
                }
                for w in knots.windows(2) {
                    let ([t0, v0], [t1, v1]) = (w[0], w[1]);
                    if t <= t1 {
                        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                    }
                }
                knots[knots.len() - 1][1]
            }
        }
    }

    /// `sup_t |value|`.
    pub fn max_abs(&self) -> f64 {
        match self {
            Schedule::Constant { value } => value.abs(),
            Schedule::Linear { start, end } => start.abs().max(end.abs()),
            Schedule::Sine { mean, amplitude, .. } => mean.abs() + amplitude.abs(),
            Schedule::Table { knots } => knots.iter().map(|k| k[1].abs()).fold(0.0, f64::max),
        }
    }

    /// `sup_t |d value / dt|`.
    pub fn max_rate(&self) -> f64 {
        match self {
            Schedule::Constant { .. } => 0.0,
            Schedule::Linear { start, end } => (end - start).abs(),
            Schedule::Sine { amplitude, cycles, .. } => 2.0 * PI * cycles.abs() * amplitude.abs(),
            Schedule::Table { knots } => knots
                .windows(2)
                .map(|w| ((w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).abs())
                .fold(0.0, f64::max),
        }
    }

    fn check(&self, what: &str) -> Result<(), GenError> {
        if let Schedule::Table { knots } = self {
            if knots.len() < 2 || knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                return Err(GenError::Param(format!("{what}: table knots need ≥ 2 strictly increasing times")));
            }
        }
        if !(self.max_abs() <= 1.0) {
            return Err(GenError::Param(format!("{what}: tilt must stay within [-1, 1]")));
        }
        Ok(())
    }
}

/// How resource consumption is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Consumption {
    /// Every order consumes the same vector.
    Constant { value: Vec<f64> },
    /// Independent tilted-uniform entries on `[lo, hi]`, tilt varying in time.
    Box {
        m: usize,
        lo: f64,
        hi: f64,
        #[serde(default)]
        slope: Schedule,
    },
}

impl Default for Consumption {
    fn default() -> Self {
        Consumption::Constant { value: vec![1.0] }
    }
}

impl Consumption {
    fn m(&self) -> usize {
        match self {
            Consumption::Constant { value } => value.len(),
            Consumption::Box { m, .. } => *m,
        }
    }

    fn law(&self, t: f64) -> ConsumptionLaw {
        match self {
            Consumption::Constant { value } => ConsumptionLaw::Atom(value.clone()),
            Consumption::Box { m, lo, hi, slope } => {
                ConsumptionLaw::Box(vec![Tilted::new(*lo, *hi, slope.at(t)); *m])
            }
        }
    }

    fn check(&self) -> Result<(), GenError> {
        match self {
            Consumption::Constant { value } => {
                if value.is_empty() || value.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                    return Err(GenError::Param("constant consumption must be nonnegative and nonempty".into()));
                }
                if value.iter().all(|&v| v == 0.0) {
                    return Err(GenError::Param("constant consumption must have a positive entry".into()));
                }
            }
            Consumption::Box { m, lo, hi, slope } => {
                if *m == 0 || !(*lo >= 0.0 && hi > lo) {
                    return Err(GenError::Param("box consumption needs m ≥ 1 and 0 ≤ lo < hi".into()));
                }
                slope.check("consumption slope")?;
            }
        }
        Ok(())
    }

    fn alpha(&self) -> f64 {
        match self {
            Consumption::Constant { value } => value.iter().cloned().fold(0.0, f64::max),
            Consumption::Box { hi, .. } => *hi,
        }
    }

    /// (max density, max gradient norm) of the consumption density.
    fn density_bounds(&self) -> (f64, f64) {
        match self {
            Consumption::Constant { .. } => (1.0, 0.0),
            Consumption::Box { m, lo, hi, slope } => {
                let w = hi - lo;
                let s = slope.max_abs();
                let peak = (1.0 + s) / w;
                let mf = *m as f64;
                let da = 2.0 * s / (w * w) * peak.powi(*m as i32 - 1) * mf.sqrt();
                let dt = slope.max_rate() / w * peak.powi(*m as i32 - 1) * mf;
                (peak.powi(*m as i32), (da * da + dt * dt).sqrt())
            }
        }
    }
}

/// Which reward sequence the two-phase family draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoPhaseVariant {
    /// Uniform(0, 1) rewards throughout.
    P1,
    /// Uniform(0, 1) up to index ⌈n/2⌉, Uniform(2, 3) afterwards.
    P2,
}

/// Shipped generator families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    StationaryUniform {
        #[serde(default = "one")]
        u_max: f64,
        #[serde(default)]
        consumption: Consumption,
    },
    /// Reward tilt moves linearly from `start` to `end`, shifting the mean.
    LinearDrift {
        #[serde(default = "one")]
        u_max: f64,
        start: f64,
        end: f64,
        #[serde(default)]
        consumption: Consumption,
    },
    /// Reward tilt `mean + amplitude·sin(2π·cycles·t + phase)`.
    Sinusoidal {
        #[serde(default = "one")]
        u_max: f64,
        mean: f64,
        amplitude: f64,
        #[serde(default = "one")]
        cycles: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        consumption: Consumption,
    },
    TwoPhase { variant: TwoPhaseVariant },
    /// Reward tilt interpolated from a `(t, tilt)` table.
    CustomTable {
        #[serde(default = "one")]
        u_max: f64,
        knots: Vec<[f64; 2]>,
        #[serde(default)]
        consumption: Consumption,
    },
}

/// Regularity constants a family declares: consumption support `[0, α]^m`,
/// rewards in `[0, ū]`, conditional reward density in `[μ_lo, μ_hi]` and
/// density gradients bounded by `L̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub alpha: f64,
    pub u_max: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub l_bar: f64,
}

/// A validated family together with its declared bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub m: usize,
    pub bounds: Bounds,
}

impl GeneratorSpec {
    pub fn new(family: Family) -> Result<Self, GenError> {
        let (m, bounds) = match &family {
            Family::TwoPhase { variant } => {
                let u_max = match variant {
                    TwoPhaseVariant::P1 => 1.0,
                    TwoPhaseVariant::P2 => 3.0,
                };
                // piecewise-constant densities: zero gradient inside each phase
                (1, Bounds { alpha: 1.0, u_max, mu_lo: 1.0, mu_hi: 1.0, l_bar: 1.0 })
            }
            _ => {
                let (u_max, tilt, consumption) = smooth_parts(&family);
                if !(u_max > 0.0 && u_max.is_finite()) {
                    return Err(GenError::Param("u_max must be positive".into()));
                }
                tilt.check("reward tilt")?;
                consumption.check()?;
                let s = tilt.max_abs();
                let du = 2.0 * s / (u_max * u_max);
                let dt = tilt.max_rate() / u_max;
                let (v_hi, v_grad) = consumption.density_bounds();
                let f_grad = (du * du + dt * dt).sqrt();
                let bounds = Bounds {
                    alpha: consumption.alpha(),
                    u_max,
                    mu_lo: (1.0 - s) / u_max,
                    mu_hi: ((1.0 + s) / u_max).max(v_hi),
                    l_bar: 1.05 * f_grad.max(v_grad).max(1e-12),
                };
                (consumption.m(), bounds)
            }
        };
        Ok(Self { family, m, bounds })
    }

    pub fn stationary_uniform() -> Self {
        Self::new(Family::StationaryUniform { u_max: 1.0, consumption: Consumption::default() })
            .expect("valid")
    }

    pub fn two_phase(variant: TwoPhaseVariant) -> Self {
        Self::new(Family::TwoPhase { variant }).expect("valid")
    }

    /// The nonstationary family used in the scaling experiments.
    pub fn sinusoidal_default() -> Self {
        Self::new(Family::Sinusoidal {
            u_max: 1.0,
            mean: 0.0,
            amplitude: 0.6,
            cycles: 1.0,
            phase: 0.0,
            consumption: Consumption::default(),
        })
        .expect("valid")
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::StationaryUniform { .. } => "stationary_uniform".into(),
            Family::LinearDrift { .. } => "linear_drift".into(),
            Family::Sinusoidal { .. } => "sinusoidal".into(),
            Family::TwoPhase { variant: TwoPhaseVariant::P1 } => "two_phase_p1".into(),
            Family::TwoPhase { variant: TwoPhaseVariant::P2 } => "two_phase_p2".into(),
            Family::CustomTable { .. } => "custom_table".into(),
        }
    }

    /// Law of the order at normalized time `t`.
    pub fn law_at_time(&self, t: f64) -> OrderLaw {
        match &self.family {
            Family::TwoPhase { variant } => two_phase_law(*variant, t <= 0.5),
            _ => {
                let (u_max, tilt, consumption) = smooth_parts(&self.family);
                OrderLaw {
                    reward: Tilted::new(0.0, u_max, tilt.at(t)),
                    consumption: consumption.law(t),
                }
            }
        }
    }

    /// Law of order `i` (0-based) out of `n`; time is `(i + 1) / n`.
    pub fn law(&self, i: usize, n: usize) -> OrderLaw {
        match &self.family {
            // first phase is indices 1..=⌈n/2⌉ in 1-based terms
            Family::TwoPhase { variant } => two_phase_law(*variant, i < n.div_ceil(2)),
            _ => self.law_at_time((i + 1) as f64 / n as f64),
        }
    }
}

fn two_phase_law(variant: TwoPhaseVariant, first_phase: bool) -> OrderLaw {
    let reward = if first_phase || variant == TwoPhaseVariant::P1 {
        Tilted::new(0.0, 1.0, 0.0)
    } else {
        Tilted::new(2.0, 3.0, 0.0)
    };
    OrderLaw { reward, consumption: ConsumptionLaw::Atom(vec![1.0]) }
}

/// (u_max, reward tilt schedule, consumption) of a smooth family.
fn smooth_parts(family: &Family) -> (f64, Schedule, &Consumption) {
    match family {
        Family::StationaryUniform { u_max, consumption } => (*u_max, Schedule::Constant { value: 0.0 }, consumption),
        Family::LinearDrift { u_max, start, end, consumption } => {
            (*u_max, Schedule::Linear { start: *start, end: *end }, consumption)
        }
        Family::Sinusoidal { u_max, mean, amplitude, cycles, phase, consumption } => (
            *u_max,
            Schedule::Sine { mean: *mean, amplitude: *amplitude, cycles: *cycles, phase: *phase },
            consumption,
        ),
        Family::CustomTable { u_max, knots, consumption } => {
            (*u_max, Schedule::Table { knots: knots.clone() }, consumption)
        }
        Family::TwoPhase { .. } => unreachable!("two-phase family has no tilt schedule"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_evaluate() {
        assert_eq!(Schedule::Linear { start: -0.5, end: 0.5 }.at(0.5), 0.0);
        let s = Schedule::Sine { mean: 0.1, amplitude: 0.5, cycles: 1.0, phase: 0.0 };
        assert!((s.at(0.25) - 0.6).abs() < 1e-15);
        let t = Schedule::Table { knots: vec![[0.0, 0.0], [0.5, 0.8], [1.0, -0.2]] };
        assert!((t.at(0.25) - 0.4).abs() < 1e-15);
        assert!((t.at(0.75) - 0.3).abs() < 1e-15);
        assert!((t.max_rate() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_phase_split_uses_ceiling_of_half() {
        let spec = GeneratorSpec::two_phase(TwoPhaseVariant::P2);
        // n = 5: indices 1..=3 (0-based 0..3) are first phase
        assert_eq!(spec.law(2, 5).reward.lo, 0.0);
        assert_eq!(spec.law(3, 5).reward.lo, 2.0);
        let p1 = GeneratorSpec::two_phase(TwoPhaseVariant::P1);
        assert_eq!(p1.law(4, 5).reward.hi, 1.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let too_steep = Family::Sinusoidal {
            u_max: 1.0,
            mean: 0.5,
            amplitude: 0.6,
            cycles: 1.0,
            phase: 0.0,
            consumption: Consumption::default(),
        };
        assert!(GeneratorSpec::new(too_steep).is_err());
        let bad_box = Family::StationaryUniform {
            u_max: 1.0,
            consumption: Consumption::Box { m: 1, lo: 1.0, hi: 0.5, slope: Schedule::default() },
        };
        assert!(GeneratorSpec::new(bad_box).is_err());
    }

    #[test]
    fn declared_bounds_follow_the_tilt() {
        let spec = GeneratorSpec::sinusoidal_default();
        assert!((spec.bounds.mu_lo - 0.4).abs() < 1e-15);
        assert!((spec.bounds.mu_hi - 1.6).abs() < 1e-15);
        assert_eq!(spec.bounds.alpha, 1.0);
        assert_eq!(spec.m, 1);
    }
}
