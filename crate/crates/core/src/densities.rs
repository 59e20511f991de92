//! Analytic reference densities, two-population pairs and their crossing
//! structure.
//!
//! Every density exposes exact derivatives up to order four. The crossing set
//! of a pair (zeros of `Δ = p·f − (1−p)·g`) carries the curvature data that
//! decides which bandwidth regime applies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric::{bisect, std_normal_cdf, std_normal_quantile};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Probabilists' Hermite polynomial `He_k(z)`.
pub(crate) fn hermite(k: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, z);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = z * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn normal_deriv(mean: f64, sd: f64, order: usize, x: f64) -> f64 {
    let z = (x - mean) / sd;
    let phi = INV_SQRT_2PI * (-0.5 * z * z).exp();
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * hermite(order, z) * phi / sd.powi(order as i32 + 1)
}

/// Derivatives of `t ↦ 1/(1+t²)`.
fn lorentz_deriv(order: usize, t: f64) -> f64 {
    let q = 1.0 + t * t;
    match order {
        0 => 1.0 / q,
        1 => -2.0 * t / (q * q),
        2 => (6.0 * t * t - 2.0) / q.powi(3),
        3 => 24.0 * t * (1.0 - t * t) / q.powi(4),
        4 => 24.0 * (5.0 * t.powi(4) - 10.0 * t * t + 1.0) / q.powi(5),
        _ => unreachable!("order checked by caller"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

pub type Sampler = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// Callbacks backing a user-supplied density.
#[derive(Clone)]
pub struct CustomDensity {
    /// `(order, x) ↦ f^(order)(x)` for orders `0..=4`.
    pub deriv: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
    pub sampler: Sampler,
    pub cdf: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity").field("has_cdf", &self.cdf.is_some()).finish()
    }
}

#[derive(Clone, Debug)]
pub enum Density {
    Normal { mean: f64, sd: f64 },
    Mixture(Vec<MixtureComponent>),
    Cauchy { location: f64, scale: f64 },
    /// `(α−1)·x^(−α)` on `[1, ∞)`.
    Pareto { alpha: f64 },
    Custom(CustomDensity),
}

impl Density {
    pub fn standard_normal() -> Self {
        Density::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.deriv(0, x)
    }

    /// Exact derivative of order `0..=4`.
    pub fn deriv(&self, order: usize, x: f64) -> f64 {
        assert!(order <= 4, "derivatives are provided up to order 4");
        match self {
            Density::Normal { mean, sd } => normal_deriv(*mean, *sd, order, x),
            Density::Mixture(comps) => comps
                .iter()
                .map(|c| c.weight * normal_deriv(c.mean, c.sd, order, x))
                .sum(),
            Density::Cauchy { location, scale } => {
                let t = (x - location) / scale;
                lorentz_deriv(order, t) / (PI * scale.powi(order as i32 + 1))
            }
            Density::Pareto { alpha } => {
                if x < 1.0 {
                    return 0.0;
                }
                // (α−1)·(−α)(−α−1)…(−α−order+1)·x^(−α−order)
                let falling: f64 = (0..order).map(|j| -(alpha + j as f64)).product();
                (alpha - 1.0) * falling * x.powf(-alpha - order as f64)
            }
            Density::Custom(c) => (c.deriv)(order, x),
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        Some(match self {
            Density::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            Density::Mixture(comps) => comps
                .iter()
                .map(|c| c.weight * std_normal_cdf((x - c.mean) / c.sd))
                .sum(),
            Density::Cauchy { location, scale } => 0.5 + ((x - location) / scale).atan() / PI,
            Density::Pareto { alpha } => {
                if x <= 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(1.0 - alpha)
                }
            }
            Density::Custom(c) => return c.cdf.as_ref().map(|f| f(x)),
        })
    }

    /// Upper-tail mass `1 − F(x)`, computed without cancellation where the
    /// closed form allows it.
    pub fn survival(&self, x: f64) -> Option<f64> {
        Some(match self {
            Density::Normal { mean, sd } => std_normal_cdf(-(x - mean) / sd),
            Density::Mixture(comps) => comps
                .iter()
                .map(|c| c.weight * std_normal_cdf(-(x - c.mean) / c.sd))
                .sum(),
            Density::Cauchy { location, scale } => 0.5 - ((x - location) / scale).atan() / PI,
            Density::Pareto { alpha } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(1.0 - alpha)
                }
            }
            Density::Custom(_) => return self.cdf(x).map(|c| 1.0 - c),
        })
    }

    pub fn quantile(&self, prob: f64) -> Option<f64> {
        if !(0.0..=1.0).contains(&prob) {
            return None;
        }
        match self {
            Density::Normal { mean, sd } => Some(mean + sd * std_normal_quantile(prob)),
            Density::Cauchy { location, scale } => Some(location + scale * (PI * (prob - 0.5)).tan()),
            Density::Pareto { alpha } => Some((1.0 - prob).powf(-1.0 / (alpha - 1.0))),
            Density::Mixture(_) | Density::Custom(_) => invert_cdf(|x| self.cdf(x), prob),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Density::Normal { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            Density::Mixture(comps) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let last = comps.len() - 1;
                for (i, c) in comps.iter().enumerate() {
                    acc += c.weight;
                    if u < acc || i == last {
                        return c.mean + c.sd * rng.sample::<f64, _>(StandardNormal);
                    }
                }
                unreachable!()
            }
            Density::Cauchy { location, scale } => {
                let u: f64 = rng.random();
                location + scale * (PI * (u - 0.5)).tan()
            }
            Density::Pareto { alpha } => {
                // 1 − U lies in (0, 1]
                let u: f64 = 1.0 - rng.random::<f64>();
                u.powf(-1.0 / (alpha - 1.0))
            }
            Density::Custom(c) => {
                let mut dynrng = DynRng(rng);
                (c.sampler)(&mut dynrng)
            }
        }
    }

    /// Points where the density itself is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::Pareto { .. } => vec![1.0],
            _ => Vec::new(),
        }
    }
}

struct DynRng<'a, R: Rng + ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> RngCore for DynRng<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

fn invert_cdf(cdf: impl Fn(f64) -> Option<f64>, prob: f64) -> Option<f64> {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while cdf(lo)? > prob {
        lo *= 2.0;
        if lo < -1e12 {
            return None;
        }
    }
    while cdf(hi)? < prob {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * (1.0 + mid.abs()) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    F,
    G,
}

/// Built-in density pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairId {
    /// `g = N(−1.2, 0.6²)`: opposite curvatures at the crossing.
    Class1a,
    /// `g` a three-component normal mixture: opposite curvatures.
    Class1b,
    /// `g = N(1, 1)`: equal curvatures at the single crossing.
    Class2a,
    /// `g` standard Cauchy: two symmetric crossings, same-sign curvatures.
    Class2b,
    /// `f = (α−1)x^(−α)`, `g = (β−1)x^(−β)` on `[1, ∞)`.
    ParetoTail { alpha: f64, beta: f64 },
    /// `g = N(0, 1/9)`: `f` dominates both tails.
    LightTail,
}

impl PairId {
    pub fn name(&self) -> String {
        match self {
            PairId::Class1a => "class1a".into(),
            PairId::Class1b => "class1b".into(),
            PairId::Class2a => "class2a".into(),
            PairId::Class2b => "class2b".into(),
            PairId::ParetoTail { alpha, beta } => format!("pareto-{alpha}-{beta}"),
            PairId::LightTail => "lighttail".into(),
        }
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for PairId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "class1a" => Ok(PairId::Class1a),
            "class1b" => Ok(PairId::Class1b),
            "class2a" => Ok(PairId::Class2a),
            "class2b" => Ok(PairId::Class2b),
            "lighttail" => Ok(PairId::LightTail),
            other => Err(Error::Parameter(format!("unknown pair '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DensityPair {
    pub f: Density,
    pub g: Density,
    /// Prior probability of population F.
    pub p: f64,
    pub label: String,
}

pub fn make_pair(id: PairId) -> Result<DensityPair> {
    let f = Density::standard_normal();
    let g = match id {
        PairId::Class1a => Density::Normal { mean: -1.2, sd: 0.6 },
        PairId::Class1b => Density::Mixture(vec![
            MixtureComponent { weight: 0.2, mean: 0.0, sd: 1.0 },
            MixtureComponent { weight: 0.2, mean: 1.0, sd: 2.0 / 3.0 },
            MixtureComponent { weight: 0.6, mean: 19.0 / 12.0, sd: 5.0 / 9.0 },
        ]),
        PairId::Class2a => Density::Normal { mean: 1.0, sd: 1.0 },
        PairId::Class2b => Density::Cauchy { location: 0.0, scale: 1.0 },
        PairId::LightTail => Density::Normal { mean: 0.0, sd: 1.0 / 3.0 },
        PairId::ParetoTail { alpha, beta } => {
            if !(1.0 < alpha && alpha < beta && beta < alpha + 1.0) {
                return Err(Error::Parameter(format!(
                    "Pareto exponents must satisfy 1 < alpha < beta < alpha + 1, got alpha={alpha}, beta={beta}"
                )));
            }
            return DensityPair::new(Density::Pareto { alpha }, Density::Pareto { alpha: beta }, 0.5, id.name());
        }
    };
    DensityPair::new(f, g, 0.5, id.name())
}

impl DensityPair {
    pub fn new(f: Density, g: Density, p: f64, label: impl Into<String>) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter(format!("prior p must lie in (0, 1), got {p}")));
        }
        Ok(Self { f, g, p, label: label.into() })
    }

    pub fn density(&self, which: Which) -> &Density {
        match which {
            Which::F => &self.f,
            Which::G => &self.g,
        }
    }

    pub fn deriv(&self, which: Which, order: usize, x: f64) -> f64 {
        self.density(which).deriv(order, x)
    }

    /// `Δ^(order)(x)` for `Δ = p·f − (1−p)·g`.
    pub fn delta_deriv(&self, order: usize, x: f64) -> f64 {
        self.p * self.f.deriv(order, x) - (1.0 - self.p) * self.g.deriv(order, x)
    }

    pub fn delta(&self, x: f64) -> f64 {
        self.delta_deriv(0, x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, which: Which, count: usize, rng: &mut R) -> Vec<f64> {
        let d = self.density(which);
        (0..count).map(|_| d.sample(rng)).collect()
    }

    /// Distribution function of the pooled law `p·F + (1−p)·G`.
    pub fn pooled_cdf(&self, x: f64) -> Option<f64> {
        Some(self.p * self.f.cdf(x)? + (1.0 - self.p) * self.g.cdf(x)?)
    }

    pub fn pooled_quantile(&self, prob: f64) -> Option<f64> {
        invert_cdf(|x| self.pooled_cdf(x), prob)
    }

    /// `[q_0.0001, q_0.9999]` of the pooled law.
    pub fn default_interval(&self) -> Result<(f64, f64)> {
        match (self.pooled_quantile(1e-4), self.pooled_quantile(1.0 - 1e-4)) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(Error::Parameter(format!(
                "pair '{}' has no distribution function; pass an explicit interval",
                self.label
            ))),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.f.breakpoints();
        b.extend(self.g.breakpoints());
        b
    }

    /// Locates the zeros of `Δ` on `[lo, hi]` by a uniform sign-change scan
    /// followed by bisection.
    pub fn crossings(&self, interval: (f64, f64), grid_points: usize) -> Result<CrossingSet> {
        let (lo, hi) = interval;
        if grid_points < 64 {
            return Err(Error::Parameter(format!("crossing scan needs >= 64 grid points, got {grid_points}")));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Parameter(format!("invalid crossing interval [{lo}, {hi}]")));
        }
        let step = (hi - lo) / (grid_points - 1) as f64;
        let xs: Vec<f64> = (0..grid_points).map(|i| lo + step * i as f64).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| self.delta(x)).collect();

        let mut roots: Vec<(f64, f64)> = Vec::new(); // (y, expected direction)
        for i in 0..grid_points - 1 {
            let (d0, d1) = (ds[i], ds[i + 1]);
            if d0 == 0.0 {
                if roots.last().is_none_or(|r| r.0 != xs[i]) && i > 0 {
                    let dir = (d1 - ds[i - 1]).signum();
                    roots.push((xs[i], dir));
                }
                continue;
            }
            if d0 * d1 < 0.0 {
                let y = bisect(|x| self.delta(x), xs[i], xs[i + 1], 1e-12, 1e-13)
                    .expect("bracket has a sign change");
                roots.push((y, (d1 - d0).signum()));
            }
        }

        let mut points = Vec::with_capacity(roots.len());
        for (y, dir) in roots {
            let slope = self.delta_deriv(1, y);
            if slope.abs() < 1e-6 {
                return Err(Error::DegenerateCrossing { y, slope });
            }
            if dir != 0.0 && slope.signum() != dir {
                return Err(Error::Resolution { near: y });
            }
            points.push(CrossingPoint {
                y,
                delta_prime: slope,
                f0: self.f.eval(y),
                g0: self.g.eval(y),
                f2: self.f.deriv(2, y),
                g2: self.g.deriv(2, y),
                f4: self.f.deriv(4, y),
                g4: self.g.deriv(4, y),
            });
        }
        CrossingSet::new(points, self.p)
    }

    /// Crossings over [`DensityPair::default_interval`] with 4096 grid points.
    pub fn default_crossings(&self) -> Result<CrossingSet> {
        self.crossings(self.default_interval()?, 4096)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingPoint {
    pub y: f64,
    pub delta_prime: f64,
    pub f0: f64,
    pub g0: f64,
    pub f2: f64,
    pub g2: f64,
    pub f4: f64,
    pub g4: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Bias cannot be cancelled: bandwidths of order `n^(−1/5)`.
    Class1,
    /// A common curvature ratio cancels the bias: order `n^(−1/9)`.
    Class2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingSet {
    pub points: Vec<CrossingPoint>,
    pub p: f64,
    pub regime: Regime,
    /// `R = p·f″(y₁) / ((1−p)·g″(y₁))` in the Class2 regime.
    pub ratio: Option<f64>,
    /// `T = p·f⁗(y₁) − R²·(1−p)·g⁗(y₁)` in the Class2 regime.
    pub t_factor: Option<f64>,
}

impl CrossingSet {
    pub fn new(points: Vec<CrossingPoint>, p: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("no crossing of p*f and (1-p)*g in the interval".into()));
        }
        let regime = regime_detect(&points, p)?;
        let (ratio, t_factor) = match regime {
            Regime::Class2 => {
                let y1 = &points[0];
                let r = p * y1.f2 / ((1.0 - p) * y1.g2);
                (Some(r), Some(p * y1.f4 - r * r * (1.0 - p) * y1.g4))
            }
            Regime::Class1 => (None, None),
        };
        Ok(Self { points, p, regime, ratio, t_factor })
    }

    pub fn nu(&self) -> usize {
        self.points.len()
    }
}

/// Class2 exactly when every crossing has same-sign curvatures and the ratio
/// `p·f″/((1−p)·g″)` is common to all crossings (relative tolerance 1e−6).
pub fn regime_detect(points: &[CrossingPoint], p: f64) -> Result<Regime> {
    if points.is_empty() {
        return Err(Error::Parameter("empty crossing set".into()));
    }
    for c in points {
        if c.f2.abs() < 1e-14 && c.g2.abs() < 1e-14 {
            return Err(Error::UnsupportedCurvature { y: c.y });
        }
    }
    if points.iter().any(|c| c.f2 * c.g2 <= 0.0) {
        return Ok(Regime::Class1);
    }
    let ratios: Vec<f64> = points.iter().map(|c| p * c.f2 / ((1.0 - p) * c.g2)).collect();
    let r0 = ratios[0];
    if ratios.iter().all(|r| (r - r0).abs() <= 1e-6 * r0.abs()) {
        Ok(Regime::Class2)
    } else {
        Ok(Regime::Class1)
    }
}
