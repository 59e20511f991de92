//! Kernel density estimates over sorted samples.

use rand::Rng;

use crate::densities::Density;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::{integrate_pieces, QuadConfig};

/// `f̂(x) = (1/(m·h)) Σ K((x − Xᵢ)/h)` over a sample kept in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct KdeEstimate {
    data: Vec<f64>,
    h: f64,
    kernel: Kernel,
}

impl KdeEstimate {
    pub fn new(mut data: Vec<f64>, h: f64, kernel: Kernel) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Parameter("density estimate needs at least one observation".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!("bandwidth must be positive and finite, got {h}")));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parameter("sample contains non-finite values".into()));
        }
        data.sort_by(f64::total_cmp);
        Ok(Self { data, h, kernel })
    }

    /// Data in ascending order. Indices elsewhere in this type refer to this order.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Indices of observations within one support radius of `x`.
    fn window(&self, x: f64) -> std::ops::Range<usize> {
        let r = self.h * self.kernel.support_halfwidth();
        let lo = self.data.partition_point(|&d| d < x - r);
        let hi = self.data.partition_point(|&d| d <= x + r);
        lo..hi.max(lo)
    }

    /// Unnormalized kernel sum `Σ K((x − Xᵢ)/h)`.
    pub fn kernel_sum(&self, x: f64) -> f64 {
        let inv_h = 1.0 / self.h;
        self.data[self.window(x)]
            .iter()
            .map(|&d| self.kernel.eval((x - d) * inv_h))
            .sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.kernel_sum(x) / (self.data.len() as f64 * self.h)
    }

    /// Estimate with observation `omit` removed, divisor `m − 1`.
    pub fn loo_eval(&self, omit: usize, x: f64) -> Result<f64> {
        let m = self.data.len();
        if m < 2 {
            return Err(Error::Parameter("leave-one-out needs at least two observations".into()));
        }
        if omit >= m {
            return Err(Error::Parameter(format!("index {omit} out of range for {m} observations")));
        }
        let own = self.kernel.eval((x - self.data[omit]) / self.h);
        // Clamp tiny negative rounding residue.
        Ok(((self.kernel_sum(x) - own) / ((m - 1) as f64 * self.h)).max(0.0))
    }

    /// Left and right ends of the estimate's support, `[X₁ − h·s, X_m + h·s]`.
    pub fn support(&self) -> (f64, f64) {
        let r = self.h * self.kernel.support_halfwidth();
        (self.data[0] - r, self.data[self.data.len() - 1] + r)
    }

    /// Largest right support endpoint `Xᵢ + h·s` that is `<= x`.
    pub fn last_right_endpoint_at_or_below(&self, x: f64) -> Option<f64> {
        let r = self.h * self.kernel.support_halfwidth();
        let idx = self.data.partition_point(|&d| d + r <= x);
        (idx > 0).then(|| self.data[idx - 1] + r)
    }

    /// Smallest left support endpoint `Xᵢ − h·s` that is `>= x`.
    pub fn first_left_endpoint_at_or_above(&self, x: f64) -> Option<f64> {
        let r = self.h * self.kernel.support_halfwidth();
        let idx = self.data.partition_point(|&d| d - r < x);
        (idx < self.data.len()).then(|| self.data[idx] - r)
    }

    /// Every support endpoint `Xᵢ ± h·s`, unsorted.
    pub fn support_endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let r = self.h * self.kernel.support_halfwidth();
        self.data.iter().flat_map(move |&d| [d - r, d + r])
    }

    /// Draws `count` variates with density exactly equal to this estimate:
    /// a uniformly chosen observation plus `h` times a kernel variate.
    pub fn smoothed_bootstrap<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        let m = self.data.len();
        (0..count)
            .map(|_| {
                let j = rng.random_range(0..m);
                self.data[j] + self.h * self.kernel.sample(rng)
            })
            .collect()
    }
}

/// Exact mean and variance of `f̂(y)` built from `count` draws of `density`
/// with bandwidth `h`:
///
/// `E f̂(y) = ∫ K(t) f(y − h t) dt`,
/// `Var f̂(y) = (1/count)·[(1/h) ∫ K(t)² f(y − h t) dt − (E f̂(y))²]`.
pub fn kde_mean_var(density: &Density, kernel: Kernel, h: f64, count: usize, y: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) || count == 0 {
        return Err(Error::Parameter(format!("need h > 0 and count >= 1, got h={h}, count={count}")));
    }
    let s = kernel.support_halfwidth();
    let breaks: Vec<f64> = density.breakpoints().iter().map(|b| (y - b) / h).collect();
    let cfg = QuadConfig { abs_tol: 1e-12, ..QuadConfig::default() };
    let mean = integrate_pieces(|t| kernel.eval(t) * density.eval(y - h * t), -s, s, &breaks, cfg)?;
    let second = integrate_pieces(|t| kernel.eval(t).powi(2) * density.eval(y - h * t), -s, s, &breaks, cfg)?;
    let var = (second / h - mean * mean) / count as f64;
    Ok((mean, var))
}

/// Spherically symmetric d-variate estimate with kernel `c_d·K(‖u‖)`.
#[derive(Clone, Debug)]
pub struct SphericalKde {
    points: Vec<Vec<f64>>,
    dim: usize,
    h: f64,
    kernel: Kernel,
    norm: f64,
}

/// Normalizing constant `c_d` making `c_d·K(‖u‖)` integrate to one over ℝᵈ.
pub fn spherical_norm(kernel: Kernel, dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    let sphere_area = 2.0 * std::f64::consts::PI.powf(half) / statrs::function::gamma::gamma(half);
    1.0 / (sphere_area * kernel.radial_mass(dim))
}

impl SphericalKde {
    pub fn new(points: Vec<Vec<f64>>, h: f64, kernel: Kernel) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Parameter("multivariate sample must be non-empty with d >= 1".into()));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Parameter("inconsistent point dimensions in sample".into()));
        }
        if !(h > 0.0) {
            return Err(Error::Parameter(format!("bandwidth must be positive, got {h}")));
        }
        let norm = spherical_norm(kernel, dim);
        Ok(Self { points, dim, h, kernel, norm })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Parameter(format!("query has dimension {}, sample has {}", x.len(), self.dim)));
        }
        let sum: f64 = self
            .points
            .iter()
            .map(|p| {
                let r2: f64 = p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
                self.kernel.eval(r2.sqrt() / self.h)
            })
            .sum();
        Ok(self.norm * sum / (self.points.len() as f64 * self.h.powi(self.dim as i32)))
    }
}
