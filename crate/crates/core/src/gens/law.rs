//! Per-index laws of an order and their closed-form expectations.
//!
//! Every shipped family draws rewards from a *tilted uniform* law on an
//! interval: density `(1 + s·(2z − 1)) / w` with `z = (x − lo)/w`,
//! `w = hi − lo` and tilt `s ∈ [−1, 1]`. Consumption is either a fixed
//! vector or independent tilted uniforms per entry. Rewards are independent
//! of consumption.

use rand::Rng;

/// Tilted uniform law on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tilted {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
}

impl Tilted {
    pub fn new(lo: f64, hi: f64, slope: f64) -> Self {
        Self { lo, hi, slope }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let z = (x - self.lo) / self.width();
        (1.0 + self.slope * (2.0 * z - 1.0)) / self.width()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let z = (x - self.lo) / self.width();
        (1.0 - self.slope) * z + self.slope * z * z
    }

    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    pub fn mean(&self) -> f64 {
        self.lo + self.width() * (0.5 + self.slope / 6.0)
    }

    /// Inverse CDF.
    pub fn quantile(&self, q: f64) -> f64 {
        let s = self.slope;
        let root = ((1.0 - s) * (1.0 - s) + 4.0 * s * q).max(0.0).sqrt();
        let den = (1.0 - s) + root;
        let z = if den > 0.0 { (2.0 * q / den).clamp(0.0, 1.0) } else { 0.0 };
        self.lo + self.width() * z
    }

    /// `E[(X − x)⁺]`.
    pub fn excess(&self, x: f64) -> f64 {
        if x <= self.lo {
            return self.mean() - x;
        }
        if x >= self.hi {
            return 0.0;
        }
        let s = self.slope;
        let z = (x - self.lo) / self.width();
        self.width()
            * ((1.0 - z) - (1.0 - s) * (1.0 - z * z) / 2.0 - s * (1.0 - z * z * z) / 3.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConsumptionLaw {
    Atom(Vec<f64>),
    Box(Vec<Tilted>),
}

impl ConsumptionLaw {
    pub fn m(&self) -> usize {
        match self {
            ConsumptionLaw::Atom(c) => c.len(),
            ConsumptionLaw::Box(b) => b.len(),
        }
    }

    /// Density (box) or mass (atom) at `a`; zero off the support.
    pub fn density(&self, a: &[f64]) -> f64 {
        match self {
            ConsumptionLaw::Atom(c) => {
                if c.as_slice() == a {
                    1.0
                } else {
                    0.0
                }
            }
            ConsumptionLaw::Box(b) => b.iter().zip(a).map(|(t, &x)| t.pdf(x)).product(),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            ConsumptionLaw::Atom(c) => c.clone(),
            ConsumptionLaw::Box(b) => b.iter().map(Tilted::mean).collect(),
        }
    }
}

/// Joint law of one order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderLaw {
    pub reward: Tilted,
    pub consumption: ConsumptionLaw,
}

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_3),
];

/// `∫_lo^hi g` by 4-point Gauss-Legendre on each piece between `cuts`.
fn piecewise_gl<F: FnMut(f64) -> f64>(lo: f64, hi: f64, cuts: &[f64], mut g: F) -> f64 {
    let mut pts = vec![lo];
    pts.extend(cuts.iter().copied().filter(|&c| c > lo && c < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        total += GL4.iter().map(|&(x, wt)| wt * g(mid + half * x)).sum::<f64>() * half;
    }
    total
}

/// Tensor 8-point rule over the consumption box, `g(a) · v(a)`.
fn tensor_gl<F: FnMut(&[f64]) -> f64>(boxes: &[Tilted], mut g: F) -> f64 {
    let m = boxes.len();
    let mut idx = vec![0usize; m];
    let mut a = vec![0.0; m];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (i, t) in boxes.iter().enumerate() {
            let (x, wt) = GL8[idx[i]];
            let half = 0.5 * (t.hi - t.lo);
            a[i] = t.lo + half * (1.0 + x);
            w *= wt * half * t.pdf(a[i]);
        }
        total += w * g(&a);
        let mut k = 0;
        loop {
            if k == m {
                return total;
            }
            idx[k] += 1;
            if idx[k] < GL8.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

impl OrderLaw {
    pub fn m(&self) -> usize {
        self.consumption.m()
    }

    /// Draws consumption first, then the reward.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, Vec<f64>) {
        let a = match &self.consumption {
            ConsumptionLaw::Atom(c) => c.clone(),
            ConsumptionLaw::Box(b) => b.iter().map(|t| t.sample(rng)).collect(),
        };
        (self.reward.sample(rng), a)
    }

    /// `E[a·1{u > aᵀp}]`.
    ///
    /// Exact for atoms and for one box resource (the integrand is a
    /// piecewise polynomial of degree ≤ 4); an 8-point tensor rule otherwise.
    pub fn accept_mass(&self, p: &[f64]) -> Vec<f64> {
        match &self.consumption {
            ConsumptionLaw::Atom(c) => {
                let s = self.reward.survival(dot(c, p));
                c.iter().map(|v| v * s).collect()
            }
            ConsumptionLaw::Box(b) if b.len() == 1 => {
                let t = b[0];
                let cuts = kink_cuts(&self.reward, p[0]);
                vec![piecewise_gl(t.lo, t.hi, &cuts, |a| a * self.reward.survival(a * p[0]) * t.pdf(a))]
            }
            ConsumptionLaw::Box(b) => (0..b.len())
                .map(|i| tensor_gl(b, |a| a[i] * self.reward.survival(dot(a, p))))
                .collect(),
        }
    }

    /// `E[(u − aᵀp)⁺]`.
    pub fn excess(&self, p: &[f64]) -> f64 {
        match &self.consumption {
            ConsumptionLaw::Atom(c) => self.reward.excess(dot(c, p)),
            ConsumptionLaw::Box(b) if b.len() == 1 => {
                let t = b[0];
                let cuts = kink_cuts(&self.reward, p[0]);
                piecewise_gl(t.lo, t.hi, &cuts, |a| self.reward.excess(a * p[0]) * t.pdf(a))
            }
            ConsumptionLaw::Box(b) => tensor_gl(b, |a| self.reward.excess(dot(a, p))),
        }
    }

    /// Conditional estimate of `E[a·1{u > aᵀp}]` from consumption draws:
    /// `(1/K) Σ a_i·P(u > a_iᵀp)`.
    pub fn accept_mass_given(&self, draws: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        for a in draws {
            let s = self.reward.survival(dot(a, p));
            for (o, v) in out.iter_mut().zip(a) {
                *o += v * s;
            }
        }
        let k = draws.len().max(1) as f64;
        out.iter_mut().for_each(|v| *v /= k);
        out
    }
}

fn kink_cuts(reward: &Tilted, p: f64) -> Vec<f64> {
    if p > 0.0 {
        vec![reward.lo / p, reward.hi / p]
    } else {
        Vec::new()
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn tilted_law_is_a_density() {
        for &s in &[-1.0, -0.4, 0.0, 0.7, 1.0] {
            let t = Tilted::new(0.5, 1.5, s);
            let mass = simpson(0.5, 1.5, 200, |x| t.pdf(x));
            assert!((mass - 1.0).abs() < 1e-12);
            let mean = simpson(0.5, 1.5, 200, |x| x * t.pdf(x));
            assert!((mean - t.mean()).abs() < 1e-12);
            for &q in &[0.0, 0.1, 0.5, 0.93, 1.0] {
                assert!((t.cdf(t.quantile(q)) - q).abs() < 1e-12, "s={s} q={q}");
            }
            for &x in &[0.2, 0.6, 1.0, 1.4, 2.0] {
                let direct = simpson(0.5, 1.5, 2000, |u| (u - x).max(0.0) * t.pdf(u));
                assert!((t.excess(x) - direct).abs() < 1e-6, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn accept_mass_box_matches_monte_carlo() {
        let law = OrderLaw {
            reward: Tilted::new(0.0, 1.0, 0.3),
            consumption: ConsumptionLaw::Box(vec![Tilted::new(0.5, 1.5, -0.2)]),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400_000;
        let p = [0.8];
        let mut acc = 0.0;
        let mut exc = 0.0;
        for _ in 0..n {
            let (u, a) = law.sample(&mut rng);
            if u > a[0] * p[0] {
                acc += a[0];
            }
            exc += (u - a[0] * p[0]).max(0.0);
        }
        assert!((law.accept_mass(&p)[0] - acc / n as f64).abs() < 3e-3);
        assert!((law.excess(&p) - exc / n as f64).abs() < 2e-3);
    }

    #[test]
    fn two_resource_quadrature_is_close_to_one_resource_limit() {
        // second resource priced at zero reduces to the one-resource integral
        let b = Tilted::new(0.5, 1.5, 0.1);
        let two = OrderLaw {
            reward: Tilted::new(0.0, 1.0, 0.0),
            consumption: ConsumptionLaw::Box(vec![b, b]),
        };
        let one = OrderLaw { reward: two.reward, consumption: ConsumptionLaw::Box(vec![b]) };
        let m2 = two.accept_mass(&[0.6, 0.0]);
        let m1 = one.accept_mass(&[0.6]);
        assert!((m2[0] - m1[0]).abs() < 1e-3);
        assert!((two.excess(&[0.6, 0.0]) - one.excess(&[0.6])).abs() < 1e-3);
    }
}
