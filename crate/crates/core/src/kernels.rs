//! Compactly supported polynomial kernels on `[-1, 1]`.
//!
//! Each kernel is `K(u) = P(u)` for `|u| <= 1` and zero elsewhere, with `P` an
//! even polynomial. Moments and squared-derivative functionals are computed by
//! exact polynomial integration of `P`; derivatives are taken on the open
//! interval `(-1, 1)`, so the boundary kinks of the lower-order kernels never
//! enter `R(K^(r))`.

use rand::Rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `(35/32)(1 - u²)³`
    #[default]
    Triweight,
    /// `(15/16)(1 - u²)²`
    Biweight,
    /// `(3/4)(1 - u²)`
    Epanechnikov,
}

// Coefficients of P by ascending power of u.
const TRIWEIGHT: [f64; 7] = [35.0 / 32.0, 0.0, -105.0 / 32.0, 0.0, 105.0 / 32.0, 0.0, -35.0 / 32.0];
const BIWEIGHT: [f64; 5] = [15.0 / 16.0, 0.0, -30.0 / 16.0, 0.0, 15.0 / 16.0];
const EPANECHNIKOV: [f64; 3] = [0.75, 0.0, -0.75];

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn derive(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// `∫_{-1}^{1} Σ c_k u^k du`, exact.
fn integrate_symmetric(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, &c)| 2.0 * c / (k as f64 + 1.0))
        .sum()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Triweight, Kernel::Biweight, Kernel::Epanechnikov];

    pub fn support_halfwidth(self) -> f64 {
        1.0
    }

    /// Interior polynomial coefficients, ascending powers of `u`.
    pub fn poly_coeffs(self) -> &'static [f64] {
        match self {
            Kernel::Triweight => &TRIWEIGHT,
            Kernel::Biweight => &BIWEIGHT,
            Kernel::Epanechnikov => &EPANECHNIKOV,
        }
    }

    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        if u.abs() > 1.0 {
            return 0.0;
        }
        let t = 1.0 - u * u;
        match self {
            Kernel::Triweight => 35.0 / 32.0 * t * t * t,
            Kernel::Biweight => 15.0 / 16.0 * t * t,
            Kernel::Epanechnikov => 0.75 * t,
        }
    }

    /// Coefficients of the `r`-th derivative of the interior polynomial.
    pub fn derivative_coeffs(self, r: usize) -> Vec<f64> {
        let mut c = self.poly_coeffs().to_vec();
        for _ in 0..r {
            if c.len() <= 1 {
                return vec![0.0];
            }
            c = derive(&c);
        }
        c
    }

    /// `r`-th derivative of `K` at an interior point, zero outside `(-1, 1)`.
    pub fn derivative(self, r: usize, u: f64) -> f64 {
        if u.abs() >= 1.0 {
            return 0.0;
        }
        horner(&self.derivative_coeffs(r), u)
    }

    /// `κ_j = ∫ u^j K(u) du`. Odd moments are exactly zero.
    pub fn moment(self, j: usize) -> f64 {
        if j % 2 == 1 {
            return 0.0;
        }
        let mut shifted = vec![0.0; j];
        shifted.extend_from_slice(self.poly_coeffs());
        integrate_symmetric(&shifted)
    }

    /// `R(K^(r)) = ∫ (K^(r))²` over the open support. `R(K)` is the `κ` of
    /// the risk expansions.
    pub fn roughness(self, r: usize) -> f64 {
        let d = self.derivative_coeffs(r);
        integrate_symmetric(&poly_mul(&d, &d))
    }

    /// Exact distribution function of a variate with density `K`.
    pub fn cdf(self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        // antiderivative from 0, odd polynomial
        let anti: f64 = self
            .poly_coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| c * u.powi(k as i32 + 1) / (k as f64 + 1.0))
            .sum();
        0.5 + anti
    }

    /// Draws from `K` by rejection against the uniform envelope on `[-1, 1]`
    /// with height `K(0)`.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        let peak = self.eval(0.0);
        loop {
            let u: f64 = rng.random_range(-1.0..=1.0);
            let v: f64 = rng.random::<f64>() * peak;
            if v < self.eval(u) {
                return u;
            }
        }
    }

    /// `∫_0^1 P(ρ) ρ^(d-1) dρ`, the radial mass used to normalize the
    /// spherical multivariate kernel.
    pub fn radial_mass(self, dim: usize) -> f64 {
        assert!(dim >= 1);
        self.poly_coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| c / (k + dim) as f64)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate, QuadConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quad(f: impl Fn(f64) -> f64) -> f64 {
        let cfg = QuadConfig { abs_tol: 1e-13, ..QuadConfig::default() };
        integrate(f, -1.0, 1.0, cfg).unwrap().value
    }

    #[test]
    fn triweight_values() {
        assert_eq!(Kernel::Triweight.eval(0.0), 1.09375);
        assert_eq!(Kernel::Triweight.eval(1.5), 0.0);
        assert!((Kernel::Triweight.eval(0.5) - 0.461_425_781_25).abs() < 1e-15);
        assert_eq!(Kernel::Triweight.eval(-1.0), 0.0);
    }

    #[test]
    fn eval_matches_polynomial() {
        for k in Kernel::ALL {
            for i in 0..=20 {
                let u = -1.0 + 0.1 * i as f64;
                assert!((k.eval(u) - horner(k.poly_coeffs(), u)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn moments_against_quadrature() {
        for k in Kernel::ALL {
            for j in 0..=8 {
                let oracle = quad(|u| u.powi(j as i32) * k.eval(u));
                assert!((k.moment(j) - oracle).abs() < 1e-10, "{k:?} j={j}");
            }
            assert_eq!(k.moment(1), 0.0);
            assert_eq!(k.moment(3), 0.0);
            assert!((k.moment(0) - 1.0).abs() < 1e-10);
            assert!(k.moment(2) > 0.0);
        }
        assert!((Kernel::Triweight.moment(2) - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn roughness_values() {
        assert!((Kernel::Triweight.roughness(0) - 350.0 / 429.0).abs() < 1e-13);
        assert!((Kernel::Triweight.roughness(4) - 33075.0).abs() < 1e-9);
        assert!((Kernel::Epanechnikov.roughness(0) - 0.6).abs() < 1e-14);
        for k in Kernel::ALL {
            let oracle = quad(|u| k.eval(u).powi(2));
            assert!((k.roughness(0) - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let k = Kernel::Triweight;
        let h = 1e-5;
        for &u in &[-0.7, -0.2, 0.1, 0.55] {
            let fd = (k.eval(u + h) - k.eval(u - h)) / (2.0 * h);
            assert!((k.derivative(1, u) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn cdf_is_consistent() {
        for k in Kernel::ALL {
            assert!((k.cdf(0.0) - 0.5).abs() < 1e-15);
            assert!((k.cdf(1.0) - 1.0).abs() < 1e-15);
            let oracle = quad(|u| if u <= 0.3 { k.eval(u) } else { 0.0 });
            assert!((k.cdf(0.3) - oracle).abs() < 1e-8);
        }
    }

    #[test]
    fn sample_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = Kernel::Triweight;
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| k.sample(&mut rng)).collect();
        assert!(draws.iter().all(|u| u.abs() <= 1.0));
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 3.0 * (k.moment(2) / n as f64).sqrt());
        assert!((var - 1.0 / 9.0).abs() < 0.002);
    }

    #[test]
    fn sample_ks_statistic() {
        for k in Kernel::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let n = 100_000;
            let mut draws: Vec<f64> = (0..n).map(|_| k.sample(&mut rng)).collect();
            draws.sort_by(f64::total_cmp);
            let d = draws
                .iter()
                .enumerate()
                .map(|(i, &u)| {
                    let c = k.cdf(u);
                    (c - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - c).abs())
                })
                .fold(0.0, f64::max);
            assert!(d < 0.01, "{k:?} KS = {d}");
        }
    }

    #[test]
    fn radial_mass_two_dims() {
        // ∫_0^1 K(ρ) ρ dρ by quadrature
        let k = Kernel::Triweight;
        let oracle = integrate(|r| k.eval(r) * r, 0.0, 1.0, QuadConfig::default()).unwrap().value;
        assert!((k.radial_mass(2) - oracle).abs() < 1e-12);
    }
}
