//! Empirical bandwidth selection.
//!
//! The bootstrap selector estimates the misclassification risk of the plug-in
//! rule at each `(h₁, h₂)` by resampling from oversmoothed pilot estimates
//! `f̃`, `g̃` and minimizes the estimate over a log-spaced grid. All grid
//! cells share the same `B` bootstrap samples, so the surface is a
//! deterministic function of the data and the seed.
//!
//! Leave-one-out cross-validation is provided as a comparison criterion only.

use std::sync::OnceLock;

use crate::classifier::{pooled_lower_median, tail_rule, Class, Side};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, rng_for, Execution};
use crate::kde::KdeEstimate;
use crate::kernels::Kernel;
use crate::numeric::{integrate, quantile_sorted, std_normal_quantile, QuadConfig};

/// Scale estimate plugged into the normal-reference pilot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScaleRule {
    NormalSd,
    IqrNormalized,
    /// Smaller of the two above.
    #[default]
    RobustMin,
}

/// Units of the selection window `[n^(−c₂), n^(−c₁)]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WindowScale {
    /// The window as written, in raw data units.
    Unit,
    /// The window for `hⱼ` multiplied by `σ̂ⱼ/√κ₂`, so bandwidths are measured
    /// as kernel standard deviations relative to the sample scale.
    #[default]
    DataScaled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectorConfig {
    pub boot_iters: usize,
    pub grid_per_dim: usize,
    pub c1: f64,
    pub c2: f64,
    pub pilot_r: usize,
    pub quad_points: usize,
    pub scale_rule: ScaleRule,
    pub window: WindowScale,
    pub kernel: Kernel,
    pub exec: Execution,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self {
            boot_iters: 100,
            grid_per_dim: 15,
            c1: 0.08,
            c2: 0.45,
            pilot_r: 4,
            quad_points: 201,
            scale_rule: ScaleRule::RobustMin,
            window: WindowScale::DataScaled,
            kernel: Kernel::Triweight,
            exec: Execution::default(),
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.c1 && self.c1 < 1.0 / 9.0 && 0.2 < self.c2 && self.c2 < 1.0) {
            return Err(Error::Parameter(format!(
                "grid exponents must satisfy 0 < c1 < 1/9 < 1/5 < c2 < 1, got c1={}, c2={}",
                self.c1, self.c2
            )));
        }
        if self.boot_iters == 0 || self.grid_per_dim == 0 {
            return Err(Error::Parameter("boot_iters and grid_per_dim must be positive".into()));
        }
        if self.quad_points < 2 {
            return Err(Error::Parameter("quad_points must be at least 2".into()));
        }
        if self.pilot_r > MAX_PILOT_R {
            return Err(Error::Parameter(format!("pilot_r must be at most {MAX_PILOT_R}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub p: f64,
}

impl TrainingData {
    pub fn new(x: Vec<f64>, y: Vec<f64>, p: f64) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::Parameter("both samples must be non-empty".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter(format!("prior p must lie in (0, 1), got {p}")));
        }
        Ok(Self { x, y, p })
    }
}

const MAX_PILOT_R: usize = 6;

/// `∫ (φ^(s))²` for `s = 0..=MAX_PILOT_R + 2`, by quadrature.
fn normal_roughness(s: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cfg = QuadConfig { abs_tol: 1e-13, ..QuadConfig::default() };
        (0..=MAX_PILOT_R + 2)
            .map(|s| {
                let d = |x: f64| {
                    crate::densities::hermite(s, x) * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
                };
                (-20..20)
                    .map(|k| integrate(|x| d(x).powi(2), k as f64, (k + 1) as f64, cfg).expect("smooth integrand").value)
                    .sum()
            })
            .collect()
    })[s]
}

fn scale_estimate(sample: &[f64], rule: ScaleRule) -> Result<f64> {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let sd = (sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = (quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25))
        / (std_normal_quantile(0.75) - std_normal_quantile(0.25));
    let s = match rule {
        ScaleRule::NormalSd => sd,
        ScaleRule::IqrNormalized => iqr,
        ScaleRule::RobustMin => sd.min(iqr),
    };
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DegenerateSample(format!("scale estimate is {s} (sd={sd}, normalized IQR={iqr})")));
    }
    Ok(s)
}

/// Normal-reference bandwidth for estimating the `r`-th derivative:
/// `h = {(2r+1)R(K^(r)) / (n·κ₂²·σ^(−(2r+5))·∫(φ^(r+2))²)}^(1/(2r+5))`.
pub fn pilot_bandwidth(sample: &[f64], kernel: Kernel, r: usize, scale_rule: ScaleRule) -> Result<f64> {
    if sample.len() < 4 {
        return Err(Error::DegenerateSample(format!("pilot needs at least 4 observations, got {}", sample.len())));
    }
    if r > MAX_PILOT_R {
        return Err(Error::Parameter(format!("derivative order {r} exceeds {MAX_PILOT_R}")));
    }
    let sigma = scale_estimate(sample, scale_rule)?;
    let e = (2 * r + 5) as f64;
    let k2 = kernel.moment(2);
    let num = (2 * r + 1) as f64 * kernel.roughness(r);
    let den = sample.len() as f64 * k2 * k2 * sigma.powf(-e) * normal_roughness(r + 2);
    Ok((num / den).powf(1.0 / e))
}

/// Estimated risk on an `h₁ × h₂` grid, row-major in `h₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrSurface {
    pub h1_grid: Vec<f64>,
    pub h2_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ErrSurface {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.h2_grid.len() + j]
    }

    /// Minimizing cell; ties go to the smaller `h₁`, then the smaller `h₂`.
    pub fn argmin(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for i in 0..self.h1_grid.len() {
            for j in 0..self.h2_grid.len() {
                if self.at(i, j) < self.at(best.0, best.1) {
                    best = (i, j);
                }
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub h1: f64,
    pub h2: f64,
    pub err_min: f64,
    pub pilots: (f64, f64),
    pub surface: ErrSurface,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| match k {
            0 => lo,
            _ if k == count - 1 => hi,
            _ => (a + (b - a) * k as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// The unit window `[n^(−c₂), n^(−c₁)]` discretized per the config.
pub fn default_grid(n: usize, cfg: &SelectorConfig) -> Vec<f64> {
    let nf = n as f64;
    log_grid(nf.powf(-cfg.c2), nf.powf(-cfg.c1), cfg.grid_per_dim)
}

/// Grids for `h₁` and `h₂`: the window for `n = |Y|`, scaled per
/// `cfg.window`.
pub fn selection_grids(data: &TrainingData, cfg: &SelectorConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let base = default_grid(data.y.len(), cfg);
    let factor = |sample: &[f64]| -> Result<f64> {
        Ok(match cfg.window {
            WindowScale::Unit => 1.0,
            WindowScale::DataScaled => scale_estimate(sample, cfg.scale_rule)? / cfg.kernel.moment(2).sqrt(),
        })
    };
    let (a, b) = (factor(&data.x)?, factor(&data.y)?);
    Ok((base.iter().map(|h| a * h).collect(), base.iter().map(|h| b * h).collect()))
}

pub fn pilots(data: &TrainingData, cfg: &SelectorConfig) -> Result<(f64, f64)> {
    Ok((
        pilot_bandwidth(&data.x, cfg.kernel, cfg.pilot_r, cfg.scale_rule)?,
        pilot_bandwidth(&data.y, cfg.kernel, cfg.pilot_r, cfg.scale_rule)?,
    ))
}

/// Bootstrap risk estimate on an explicit grid.
///
/// For each of `B` replicates, resamples of sizes `m` and `n` are drawn from
/// `f̃ = KDE(X, h₃)` and `g̃ = KDE(Y, h₄)`; replicate `b` uses the generator
/// derived from `(seed, b)`. At `quad_points` abscissae spanning the data
/// range widened by the larger pilot support radius, the fractions of
/// replicates misclassifying the point are integrated against `f̃` and `g̃`
/// by the trapezoid rule. Where both resampled estimates vanish the tail rule
/// decides, with the side chosen by the pooled median of the resamples.
pub fn bootstrap_surface(
    data: &TrainingData,
    h1_grid: &[f64],
    h2_grid: &[f64],
    pilots: (f64, f64),
    cfg: &SelectorConfig,
    seed: u64,
) -> Result<ErrSurface> {
    cfg.validate()?;
    if h1_grid.is_empty() || h2_grid.is_empty() {
        return Err(Error::Parameter("bandwidth grids must be non-empty".into()));
    }
    let kernel = cfg.kernel;
    let p = data.p;
    let f_pilot = KdeEstimate::new(data.x.clone(), pilots.0, kernel)?;
    let g_pilot = KdeEstimate::new(data.y.clone(), pilots.1, kernel)?;
    for &h in h1_grid.iter().chain(h2_grid) {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Parameter(format!("bandwidth {h} must be positive and finite")));
        }
    }

    let pad = pilots.0.max(pilots.1) * kernel.support_halfwidth();
    let lo = f_pilot.data()[0].min(g_pilot.data()[0]) - pad;
    let hi = f_pilot.data()[f_pilot.len() - 1].max(g_pilot.data()[g_pilot.len() - 1]) + pad;
    let q = cfg.quad_points;
    let step = (hi - lo) / (q - 1) as f64;
    let zs: Vec<f64> = (0..q).map(|k| if k == q - 1 { hi } else { lo + step * k as f64 }).collect();
    let (m, n) = (data.x.len(), data.y.len());
    let (g1, g2) = (h1_grid.len(), h2_grid.len());
    let cells = g1 * g2;

    // misclassification counts per (cell, abscissa): [0] for F points
    // labelled G, [1] for G points labelled F
    let replicate = |b: usize| -> Result<Vec<[u32; 2]>> {
        let mut rng = rng_for(seed, &[b as u64]);
        let xs = f_pilot.smoothed_bootstrap(m, &mut rng);
        let ys = g_pilot.smoothed_bootstrap(n, &mut rng);
        let fs = h1_grid.iter().map(|&h| KdeEstimate::new(xs.clone(), h, kernel)).collect::<Result<Vec<_>>>()?;
        let gs = h2_grid.iter().map(|&h| KdeEstimate::new(ys.clone(), h, kernel)).collect::<Result<Vec<_>>>()?;
        let median = pooled_lower_median(fs[0].data(), gs[0].data());
        let fv: Vec<Vec<f64>> = fs.iter().map(|e| zs.iter().map(|&z| e.eval(z)).collect()).collect();
        let gv: Vec<Vec<f64>> = gs.iter().map(|e| zs.iter().map(|&z| e.eval(z)).collect()).collect();
        let mut counts = vec![[0u32; 2]; cells * q];
        for i in 0..g1 {
            for j in 0..g2 {
                let base = (i * g2 + j) * q;
                for k in 0..q {
                    let (f, g) = (fv[i][k], gv[j][k]);
                    let class = if f == 0.0 && g == 0.0 {
                        let side = if zs[k] > median { Side::Right } else { Side::Left };
                        tail_rule(&fs[i], &gs[j], zs[k], side)?.value
                    } else if p * f - (1.0 - p) * g >= 0.0 {
                        Class::FromF
                    } else {
                        Class::FromG
                    };
                    match class {
                        Class::FromG => counts[base + k][0] += 1,
                        Class::FromF => counts[base + k][1] += 1,
                    }
                }
            }
        }
        Ok(counts)
    };

    // integer sums are order independent, so chunking cannot change results
    let chunk = cfg.boot_iters.div_ceil(32).max(1);
    let chunks = cfg.boot_iters.div_ceil(chunk);
    let partial = map_indexed(cfg.exec, chunks, |c| -> Result<Vec<[u32; 2]>> {
        let mut acc = vec![[0u32; 2]; cells * q];
        for b in c * chunk..((c + 1) * chunk).min(cfg.boot_iters) {
            for (a, v) in acc.iter_mut().zip(replicate(b)?) {
                a[0] += v[0];
                a[1] += v[1];
            }
        }
        Ok(acc)
    });
    let mut counts = vec![[0u32; 2]; cells * q];
    for part in partial {
        for (a, v) in counts.iter_mut().zip(part?) {
            a[0] += v[0];
            a[1] += v[1];
        }
    }

    let ft: Vec<f64> = zs.iter().map(|&z| f_pilot.eval(z)).collect();
    let gt: Vec<f64> = zs.iter().map(|&z| g_pilot.eval(z)).collect();
    let inv_b = 1.0 / cfg.boot_iters as f64;
    let values = (0..cells)
        .map(|c| {
            let row = &counts[c * q..(c + 1) * q];
            let integrand = |k: usize| {
                p * row[k][0] as f64 * inv_b * ft[k] + (1.0 - p) * row[k][1] as f64 * inv_b * gt[k]
            };
            let inner: f64 = (1..q - 1).map(integrand).sum();
            step * (inner + 0.5 * (integrand(0) + integrand(q - 1)))
        })
        .collect();
    Ok(ErrSurface { h1_grid: h1_grid.to_vec(), h2_grid: h2_grid.to_vec(), values })
}

/// Bootstrap risk estimate at a single `(h₁, h₂)`. Equal, bit for bit, to the
/// corresponding cell of [`bootstrap_surface`] for the same seed.
pub fn bootstrap_err(
    data: &TrainingData,
    h1: f64,
    h2: f64,
    pilots: (f64, f64),
    cfg: &SelectorConfig,
    seed: u64,
) -> Result<f64> {
    Ok(bootstrap_surface(data, &[h1], &[h2], pilots, cfg, seed)?.values[0])
}

/// Minimizes the bootstrap risk over the given grids.
pub fn select_on_grid(
    data: &TrainingData,
    h1_grid: &[f64],
    h2_grid: &[f64],
    cfg: &SelectorConfig,
    seed: u64,
) -> Result<Selection> {
    let pilots = pilots(data, cfg)?;
    let surface = bootstrap_surface(data, h1_grid, h2_grid, pilots, cfg, seed)?;
    let (i, j) = surface.argmin();
    Ok(Selection {
        h1: surface.h1_grid[i],
        h2: surface.h2_grid[j],
        err_min: surface.at(i, j),
        pilots,
        surface,
    })
}

/// Bootstrap selection over the grids of [`selection_grids`].
pub fn select_bandwidths(data: &TrainingData, cfg: &SelectorConfig, seed: u64) -> Result<Selection> {
    if data.x.len() < 10 || data.y.len() < 10 {
        return Err(Error::Parameter("bandwidth selection needs at least 10 observations per sample".into()));
    }
    let (g1, g2) = selection_grids(data, cfg)?;
    select_on_grid(data, &g1, &g2, cfg, seed)
}

/// Leave-one-out misclassification rate
/// `(p/m)Σ I{Δ̂_{−i}(Xᵢ) < 0, Xᵢ ∈ I} + ((1−p)/n)Σ I{Δ̂_{−i}(Yᵢ) > 0, Yᵢ ∈ I}`.
pub fn cv_err(data: &TrainingData, h1: f64, h2: f64, kernel: Kernel, interval: Option<(f64, f64)>) -> Result<f64> {
    let (m, n) = (data.x.len(), data.y.len());
    if m < 2 || n < 2 {
        return Err(Error::Parameter("cross-validation needs at least two observations per sample".into()));
    }
    let p = data.p;
    let fhat = KdeEstimate::new(data.x.clone(), h1, kernel)?;
    let ghat = KdeEstimate::new(data.y.clone(), h2, kernel)?;
    let inside = |v: f64| interval.is_none_or(|(a, b)| a <= v && v <= b);
    let mut wrong_f = 0usize;
    for (i, &xi) in fhat.data().iter().enumerate() {
        if inside(xi) && p * fhat.loo_eval(i, xi)? - (1.0 - p) * ghat.eval(xi) < 0.0 {
            wrong_f += 1;
        }
    }
    let mut wrong_g = 0usize;
    for (i, &yi) in ghat.data().iter().enumerate() {
        if inside(yi) && p * fhat.eval(yi) - (1.0 - p) * ghat.loo_eval(i, yi)? > 0.0 {
            wrong_g += 1;
        }
    }
    Ok(p * wrong_f as f64 / m as f64 + (1.0 - p) * wrong_g as f64 / n as f64)
}

/// `cv_err` on an `h₁ × h₂` grid, same layout as [`ErrSurface`].
pub fn cv_surface(data: &TrainingData, h1_grid: &[f64], h2_grid: &[f64], kernel: Kernel) -> Result<ErrSurface> {
    let mut values = Vec::with_capacity(h1_grid.len() * h2_grid.len());
    for &a in h1_grid {
        for &b in h2_grid {
            values.push(cv_err(data, a, b, kernel, None)?);
        }
    }
    Ok(ErrSurface { h1_grid: h1_grid.to_vec(), h2_grid: h2_grid.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{make_pair, PairId, Which};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_cfg(b: usize) -> SelectorConfig {
        SelectorConfig { boot_iters: b, grid_per_dim: 5, ..SelectorConfig::default() }
    }

    fn class1a_data(n: usize, seed: u64) -> TrainingData {
        let pr = make_pair(PairId::Class1a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TrainingData::new(pr.sample(Which::F, n, &mut rng), pr.sample(Which::G, n, &mut rng), 0.5).unwrap()
    }

    /// `(2s)! / (2^(2s+1) s! √π)`
    fn normal_roughness_closed(s: usize) -> f64 {
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        fact(2 * s) / (2f64.powi(2 * s as i32 + 1) * fact(s) * std::f64::consts::PI.sqrt())
    }

    #[test]
    fn normal_functional_matches_closed_form() {
        for s in 0..=8 {
            let (a, b) = (normal_roughness(s), normal_roughness_closed(s));
            assert!((a - b).abs() < 1e-10 * b, "s={s}: {a} vs {b}");
        }
        assert!((normal_roughness(6) - 45.818).abs() < 1e-3);
    }

    #[test]
    fn pilot_formula() {
        // sample with sd 1 and normalized IQR above 1, so RobustMin picks sd
        let raw: Vec<f64> = (0..100).map(|i| ((i as f64 + 0.5) / 100.0 - 0.5) * 12f64.sqrt()).collect();
        let mean = raw.iter().sum::<f64>() / 100.0;
        let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
        let sample: Vec<f64> = raw.iter().map(|v| v / sd).collect();
        let h = pilot_bandwidth(&sample, Kernel::Triweight, 4, ScaleRule::NormalSd).unwrap();
        let oracle = (9.0 * 33075.0 / (100.0 / 81.0 * normal_roughness_closed(6))).powf(1.0 / 13.0);
        assert!((h - oracle).abs() < 1e-9 * oracle);
        assert!((oracle - 1.9327).abs() < 1e-3);
    }

    #[test]
    fn pilot_scaling() {
        let d = class1a_data(100, 1);
        let h = pilot_bandwidth(&d.x, Kernel::Triweight, 4, ScaleRule::RobustMin).unwrap();
        let scaled: Vec<f64> = d.x.iter().map(|v| 3.0 * v).collect();
        let hs = pilot_bandwidth(&scaled, Kernel::Triweight, 4, ScaleRule::RobustMin).unwrap();
        assert!((hs - 3.0 * h).abs() < 1e-12 * hs);
        let four: Vec<f64> = d.x.iter().cycle().take(400).copied().collect();
        let h4 = pilot_bandwidth(&four, Kernel::Triweight, 4, ScaleRule::NormalSd).unwrap();
        let h1 = pilot_bandwidth(&d.x, Kernel::Triweight, 4, ScaleRule::NormalSd).unwrap();
        // sd of the replicated sample differs only by the n−1 divisor
        let adj = (4.0 * 99.0 / 399.0f64).sqrt();
        assert!((h4 - h1 * adj * 4f64.powf(-1.0 / 13.0)).abs() < 1e-12);
    }

    #[test]
    fn pilot_errors() {
        assert!(matches!(
            pilot_bandwidth(&[1.0; 10], Kernel::Triweight, 4, ScaleRule::RobustMin),
            Err(Error::DegenerateSample(_))
        ));
        assert!(pilot_bandwidth(&[1.0, 2.0, 3.0], Kernel::Triweight, 4, ScaleRule::RobustMin).is_err());
        // zero IQR but positive sd
        let v = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0];
        assert!(pilot_bandwidth(&v, Kernel::Triweight, 4, ScaleRule::IqrNormalized).is_err());
        assert!(pilot_bandwidth(&v, Kernel::Triweight, 4, ScaleRule::NormalSd).is_ok());
    }

    #[test]
    fn config_window_is_validated() {
        assert!(SelectorConfig::default().validate().is_ok());
        assert!(SelectorConfig { c1: 0.12, ..SelectorConfig::default() }.validate().is_err());
        assert!(SelectorConfig { c2: 0.2, ..SelectorConfig::default() }.validate().is_err());
    }

    #[test]
    fn bootstrap_err_is_deterministic_and_matches_surface() {
        let d = class1a_data(40, 2);
        let cfg = small_cfg(1);
        let pil = pilots(&d, &cfg).unwrap();
        let a = bootstrap_err(&d, 0.3, 0.4, pil, &cfg, 5).unwrap();
        let b = bootstrap_err(&d, 0.3, 0.4, pil, &cfg, 5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let cfg = small_cfg(20);
        let grid = default_grid(40, &cfg);
        let s = bootstrap_surface(&d, &grid, &grid, pil, &cfg, 9).unwrap();
        for (i, &h1) in grid.iter().enumerate() {
            for (j, &h2) in grid.iter().enumerate() {
                assert_eq!(bootstrap_err(&d, h1, h2, pil, &cfg, 9).unwrap().to_bits(), s.at(i, j).to_bits());
            }
        }
    }

    #[test]
    fn sequential_and_parallel_surfaces_agree() {
        let d = class1a_data(40, 3);
        let par = SelectorConfig { exec: Execution::Parallel, ..small_cfg(40) };
        let seq = SelectorConfig { exec: Execution::Sequential, ..small_cfg(40) };
        assert_eq!(select_bandwidths(&d, &par, 4).unwrap(), select_bandwidths(&d, &seq, 4).unwrap());
    }

    #[test]
    fn separated_and_identical_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pr = make_pair(PairId::Class2a).unwrap();
        let x = pr.sample(Which::F, 50, &mut rng);
        let y: Vec<f64> = pr.sample(Which::F, 50, &mut rng).iter().map(|v| v + 100.0).collect();
        let d = TrainingData::new(x.clone(), y, 0.5).unwrap();
        let cfg = small_cfg(30);
        let pil = pilots(&d, &cfg).unwrap();
        assert!(bootstrap_err(&d, 0.5, 0.5, pil, &cfg, 1).unwrap() <= 0.01);
        assert_eq!(cv_err(&d, 0.5, 0.5, Kernel::Triweight, None).unwrap(), 0.0);

        let same = TrainingData::new(x.clone(), x, 0.5).unwrap();
        let pil = pilots(&same, &cfg).unwrap();
        let e = bootstrap_err(&same, 0.5, 0.5, pil, &cfg, 1).unwrap();
        assert!((e - 0.5).abs() <= 0.05, "{e}");
        // leaving Xᵢ out of f̂ but not of ĝ = f̂ tips every point toward the
        // other class, so the leave-one-out rate is exactly one
        assert_eq!(cv_err(&same, 0.5, 0.5, Kernel::Triweight, None).unwrap(), 1.0);
    }

    #[test]
    fn selection_stays_in_window_and_is_consistent() {
        let d = class1a_data(60, 7);
        for window in [WindowScale::Unit, WindowScale::DataScaled] {
            let cfg = SelectorConfig { window, ..small_cfg(20) };
            let sel = select_bandwidths(&d, &cfg, 3).unwrap();
            let (g1, g2) = selection_grids(&d, &cfg).unwrap();
            assert!(sel.h1 >= g1[0] && sel.h1 <= g1[4] && sel.h2 >= g2[0] && sel.h2 <= g2[4]);
            let again = bootstrap_err(&d, sel.h1, sel.h2, sel.pilots, &cfg, 3).unwrap();
            assert_eq!(again.to_bits(), sel.err_min.to_bits());
            assert!(sel.surface.values.iter().all(|&v| v >= sel.err_min));
        }
        let unit = default_grid(60, &small_cfg(1));
        assert!((unit[0] - 60f64.powf(-0.45)).abs() < 1e-15 && (unit[4] - 60f64.powf(-0.08)).abs() < 1e-15);
    }

    #[test]
    fn scaled_window_is_equivariant() {
        let d = class1a_data(40, 12);
        let cfg = small_cfg(1);
        let (a1, a2) = selection_grids(&d, &cfg).unwrap();
        let t = 7.0;
        let scaled = TrainingData::new(d.x.iter().map(|v| t * v).collect(), d.y.iter().map(|v| t * v).collect(), 0.5).unwrap();
        let (b1, b2) = selection_grids(&scaled, &cfg).unwrap();
        for (u, v) in a1.iter().zip(&b1).chain(a2.iter().zip(&b2)) {
            assert!((v - t * u).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn nested_grids_never_raise_the_minimum() {
        let d = class1a_data(60, 8);
        let cfg = small_cfg(20);
        let wide = log_grid(0.05, 2.0, 9);
        let narrow: Vec<f64> = wide[2..7].to_vec();
        let a = select_on_grid(&d, &narrow, &narrow, &cfg, 11).unwrap();
        let b = select_on_grid(&d, &wide, &wide, &cfg, 11).unwrap();
        assert!(b.err_min <= a.err_min);
    }

    #[test]
    fn argmin_ties_prefer_smaller_bandwidths() {
        let s = ErrSurface { h1_grid: vec![1.0, 2.0], h2_grid: vec![1.0, 2.0], values: vec![0.3, 0.1, 0.1, 0.1] };
        assert_eq!(s.argmin(), (0, 1));
    }

    #[test]
    fn cv_is_a_probability() {
        let d = class1a_data(30, 9);
        for h in [0.01, 0.1, 0.5, 3.0] {
            let v = cv_err(&d, h, h, Kernel::Triweight, None).unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
        let all = cv_err(&d, 0.4, 0.4, Kernel::Triweight, None).unwrap();
        let none = cv_err(&d, 0.4, 0.4, Kernel::Triweight, Some((100.0, 101.0))).unwrap();
        assert!(none == 0.0 && all > 0.0);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.1, 10.0, 3);
        assert_eq!(g[0], 0.1);
        assert!((g[1] - 1.0).abs() < 1e-15);
        assert_eq!(g[2], 10.0);
    }
}
