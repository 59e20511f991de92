//! Bayes risk, exact conditional risk of trained classifiers, and the
//! asymptotic excess-risk expansions that drive bandwidth choice.
//!
//! Notation: `κ = ∫K²`, `κ₂ = ∫u²K`, `κ₄ = ∫u⁴K`, `r = m/n`, and bandwidths
//! are written `h_j = H_j·n^(−ρ)`. For a crossing set with slopes `Δ′(y_j)`:
//!
//! - Class1: `B₁ = ½κ Σ|Δ′|⁻¹{(rH₁)⁻¹p²f + H₂⁻¹(1−p)²g}`,
//!   `B₂ = ⅛κ₂² Σ|Δ′|⁻¹{H₁²pf″ − H₂²(1−p)g″}²`, with `ρ = 1/5`.
//! - Class2 with `H₂ = R^(1/2)H₁`: `B₃ = c₁/H₁`, `B₄ = c₂H₁⁸`, with `ρ = 1/9`.

use crate::classifier::{Class, TrainedClassifier};
use crate::densities::{CrossingSet, Density, DensityPair, Regime, Which};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, rng_for, Execution};
use crate::kde::kde_mean_var;
use crate::kernels::Kernel;
use crate::numeric::{bisect, bisect_label, integrate_pieces, nelder_mead, NelderMeadConfig, QuadConfig};

/// Quantile level at which infinite integration limits are truncated.
pub const TAIL_LEVEL: f64 = 1e-7;
const REGION_GRID: usize = 2048;
const BOUNDARY_TOL: f64 = 1e-10;

fn finite_domain(pair: &DensityPair, interval: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = interval;
    if !(lo < hi) || lo.is_nan() || hi.is_nan() {
        return Err(Error::Parameter(format!("invalid interval [{lo}, {hi}]")));
    }
    let need = |q: f64| {
        pair.pooled_quantile(q).ok_or_else(|| {
            Error::Parameter(format!("pair '{}' has no distribution function for an unbounded interval", pair.label))
        })
    };
    let a = if lo.is_finite() { lo } else { need(TAIL_LEVEL)? };
    let b = if hi.is_finite() { hi } else { need(1.0 - TAIL_LEVEL)? };
    Ok((a, b))
}

fn scan_sign_changes(pair: &DensityPair, a: f64, b: f64, out: &mut Vec<f64>) {
    let n = 4096;
    let step = (b - a) / (n - 1) as f64;
    let mut prev = (a, pair.delta(a));
    for i in 1..n {
        let x = if i == n - 1 { b } else { a + step * i as f64 };
        let d = pair.delta(x);
        if prev.1 * d < 0.0 {
            if let Some(y) = bisect(|t| pair.delta(t), prev.0, x, 0.0, 1e-13) {
                out.push(y);
            }
        }
        prev = (x, d);
    }
}

/// Sign changes of `Δ` on `[a, b]`, refined by bisection. Heavy tails make
/// `[a, b]` very wide, so the central part of the pooled law is scanned
/// separately and its ends are kept as breakpoints.
fn delta_breaks(pair: &DensityPair, a: f64, b: f64) -> Vec<f64> {
    let mut breaks = Vec::new();
    scan_sign_changes(pair, a, b, &mut breaks);
    if let (Some(lo), Some(hi)) = (pair.pooled_quantile(1e-3), pair.pooled_quantile(1.0 - 1e-3)) {
        let (lo, hi) = (lo.max(a), hi.min(b));
        if lo < hi {
            scan_sign_changes(pair, lo, hi, &mut breaks);
            breaks.extend([lo, hi]);
        }
    }
    breaks.extend(pair.breakpoints().into_iter().filter(|&t| t > a && t < b));
    breaks
}

/// `∫ min(p·f, (1−p)·g)` over `interval`; either end may be infinite.
///
/// Infinite ends are truncated at pooled quantiles `1e−7` / `1 − 1e−7`; the
/// mass beyond is added from the distribution function of whichever
/// population attains the minimum at the truncation point.
pub fn bayes_risk(pair: &DensityPair, interval: (f64, f64)) -> Result<f64> {
    let (a, b) = finite_domain(pair, interval)?;
    let p = pair.p;
    let integrand = |x: f64| (p * pair.f.eval(x)).min((1.0 - p) * pair.g.eval(x));
    let breaks = delta_breaks(pair, a, b);
    let mut total = integrate_pieces(integrand, a, b, &breaks, QuadConfig::default())?;
    let losing = |x: f64| if pair.delta(x) > 0.0 { Which::G } else { Which::F };
    let weight = |w: Which| if w == Which::F { p } else { 1.0 - p };
    if interval.0 == f64::NEG_INFINITY {
        let w = losing(a);
        total += weight(w) * pair.density(w).cdf(a).unwrap_or(0.0);
    }
    if interval.1 == f64::INFINITY {
        let w = losing(b);
        total += weight(w) * pair.density(w).survival(b).unwrap_or(0.0);
    }
    Ok(total)
}

/// Domain over which an empirical rule is scored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RiskRule {
    /// The plug-in rule scored on a compact interval.
    A1Body(f64, f64),
    /// The combined rule scored on the whole line.
    Ahat,
}

impl RiskRule {
    fn interval(self) -> (f64, f64) {
        match self {
            RiskRule::A1Body(a, b) => (a, b),
            RiskRule::Ahat => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskReport {
    pub err_a0: f64,
    pub err_emp: f64,
    pub excess: f64,
    pub se: f64,
    pub n_reps: usize,
}

fn cdf_of(d: &Density, x: f64) -> Result<f64> {
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    d.cdf(x).ok_or_else(|| Error::Parameter("exact risk needs distribution functions".into()))
}

/// Probability that a new observation in `[u, v]` is misclassified when the
/// whole segment carries label `class`.
fn segment_loss(pair: &DensityPair, class: Class, u: f64, v: f64) -> Result<f64> {
    if v <= u {
        return Ok(0.0);
    }
    Ok(match class {
        Class::FromF => (1.0 - pair.p) * (cdf_of(&pair.g, v)? - cdf_of(&pair.g, u)?),
        Class::FromG => pair.p * (cdf_of(&pair.f, v)? - cdf_of(&pair.f, u)?),
    })
}

/// Misclassified probability mass split by true population.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MisclassifiedMass {
    /// `p·P_F(x labelled G)`.
    pub from_f: f64,
    /// `(1−p)·P_G(x labelled F)`.
    pub from_g: f64,
}

impl MisclassifiedMass {
    pub fn total(&self) -> f64 {
        self.from_f + self.from_g
    }
}

/// Exact misclassification probability of `clf` for observations in
/// `interval` (ends may be infinite).
///
/// Decision regions are recovered from labels on a 2048-point grid plus every
/// training point and support endpoint of the two estimates, with each label
/// change refined to `1e−10` by bisection. Outside the probed range the label
/// is constant, so unbounded ends contribute exactly through the distribution
/// functions.
pub fn decision_risk(pair: &DensityPair, clf: &TrainedClassifier, interval: (f64, f64)) -> Result<f64> {
    Ok(decision_risk_parts(pair, clf, interval)?.total())
}

pub fn decision_risk_parts(
    pair: &DensityPair,
    clf: &TrainedClassifier,
    interval: (f64, f64),
) -> Result<MisclassifiedMass> {
    let (a, b) = finite_domain(pair, interval)?;
    let (fa, fb) = clf.fhat().support();
    let (ga, gb) = clf.ghat().support();
    let (lo, hi) = if interval.0.is_finite() && interval.1.is_finite() {
        (a, b)
    } else {
        (
            if interval.0.is_finite() { a } else { a.min(fa).min(ga) },
            if interval.1.is_finite() { b } else { b.max(fb).max(gb) },
        )
    };
    let step = (hi - lo) / (REGION_GRID - 1) as f64;
    let mut probes: Vec<f64> = (0..REGION_GRID).map(|i| lo + step * i as f64).collect();
    probes[REGION_GRID - 1] = hi;
    probes.extend(
        clf.fhat()
            .support_endpoints()
            .chain(clf.ghat().support_endpoints())
            .chain(clf.fhat().data().iter().copied())
            .chain(clf.ghat().data().iter().copied())
            .filter(|&t| t > lo && t < hi),
    );
    probes.sort_by(f64::total_cmp);
    probes.dedup();

    let label = |x: f64| clf.class_of(x);
    let mut mass = MisclassifiedMass::default();
    let mut add = |class: Class, u: f64, v: f64| -> Result<()> {
        let loss = segment_loss(pair, class, u, v)?;
        match class {
            Class::FromF => mass.from_g += loss,
            Class::FromG => mass.from_f += loss,
        }
        Ok(())
    };
    let mut left = interval.0;
    let mut current = label(probes[0]);
    if interval.0.is_finite() {
        left = probes[0];
    }
    for w in probes.windows(2) {
        let next = label(w[1]);
        if next != current {
            let cut = bisect_label(label, w[0], w[1], BOUNDARY_TOL);
            add(current, left, cut)?;
            left = cut;
            current = next;
        }
    }
    let right = if interval.1.is_finite() { hi } else { f64::INFINITY };
    add(current, left, right)?;
    Ok(mass)
}

/// Monte Carlo average of the exact conditional risk over `reps` training
/// sets of sizes `m` (from F) and `n` (from G).
#[allow(clippy::too_many_arguments)]
pub fn empirical_risk(
    pair: &DensityPair,
    m: usize,
    n: usize,
    h1: f64,
    h2: f64,
    kernel: Kernel,
    reps: usize,
    seed: u64,
    rule: RiskRule,
    exec: Execution,
) -> Result<RiskReport> {
    if reps == 0 || m == 0 || n == 0 {
        return Err(Error::Parameter("reps, m and n must be positive".into()));
    }
    let interval = rule.interval();
    let err_a0 = bayes_risk(pair, interval)?;
    let risks = map_indexed(exec, reps, |rep| -> Result<f64> {
        let mut rng = rng_for(seed, &[rep as u64]);
        let x = pair.sample(Which::F, m, &mut rng);
        let y = pair.sample(Which::G, n, &mut rng);
        let clf = TrainedClassifier::new(x, y, h1, h2, pair.p, kernel)?;
        decision_risk(pair, &clf, interval)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let mean = risks.iter().sum::<f64>() / reps as f64;
    let se = if reps > 1 {
        let var = risks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        (var / reps as f64).sqrt()
    } else {
        0.0
    };
    Ok(RiskReport { err_a0, err_emp: mean, excess: mean - err_a0, se, n_reps: reps })
}

/// Leading term `½Σ|Δ′(y_j)|⁻¹ E{pf̂(y_j) − (1−p)ĝ(y_j)}²`, using exact
/// moments of the estimates.
pub fn expansion_excess(
    pair: &DensityPair,
    cs: &CrossingSet,
    m: usize,
    n: usize,
    h1: f64,
    h2: f64,
    kernel: Kernel,
) -> Result<f64> {
    let p = pair.p;
    let mut total = 0.0;
    for c in &cs.points {
        let (ef, vf) = kde_mean_var(&pair.f, kernel, h1, m, c.y)?;
        let (eg, vg) = kde_mean_var(&pair.g, kernel, h2, n, c.y)?;
        let mean = p * ef - (1.0 - p) * eg;
        let var = p * p * vf + (1.0 - p) * (1.0 - p) * vg;
        total += 0.5 * (mean * mean + var) / c.delta_prime.abs();
    }
    Ok(total)
}

/// `(B₁, B₂)` at scaled bandwidths `(H₁, H₂)` and size ratio `r = m/n`.
pub fn expansion_b1_b2(cs: &CrossingSet, big_h1: f64, big_h2: f64, r: f64, kernel: Kernel) -> (f64, f64) {
    let p = cs.p;
    let kappa = kernel.roughness(0);
    let k2 = kernel.moment(2);
    let (mut b1, mut b2) = (0.0, 0.0);
    for c in &cs.points {
        let w = 1.0 / c.delta_prime.abs();
        b1 += w * (p * p * c.f0 / (r * big_h1) + (1.0 - p).powi(2) * c.g0 / big_h2);
        b2 += w * (big_h1 * big_h1 * p * c.f2 - big_h2 * big_h2 * (1.0 - p) * c.g2).powi(2);
    }
    (0.5 * kappa * b1, 0.125 * k2 * k2 * b2)
}

/// Leading excess risk at raw bandwidths, `B₁ + B₂` with `H_j = h_j·n^(1/5)`
/// scaled back by `n^(−4/5)`.
pub fn asymptotic_excess(cs: &CrossingSet, m: usize, n: usize, h1: f64, h2: f64, kernel: Kernel) -> f64 {
    let s = (n as f64).powf(0.2);
    let (b1, b2) = expansion_b1_b2(cs, h1 * s, h2 * s, m as f64 / n as f64, kernel);
    (b1 + b2) * (n as f64).powf(-0.8)
}

/// Class2 coefficients: `B₃(H₁) = c1/H₁`, `B₄(H₁) = c2·H₁⁸`, and the ratio
/// `R` fixing `H₂ = R^(1/2)·H₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Class2Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub ratio: f64,
}

pub fn expansion_b3_b4(cs: &CrossingSet, r: f64, kernel: Kernel) -> Result<Class2Coefficients> {
    let ratio = match (cs.regime, cs.ratio) {
        (Regime::Class2, Some(ratio)) => ratio,
        _ => return Err(Error::Regime { expected: "Class2" }),
    };
    let p = cs.p;
    let kappa = kernel.roughness(0);
    let k4 = kernel.moment(4);
    let (mut c1, mut c2) = (0.0, 0.0);
    for c in &cs.points {
        let w = 1.0 / c.delta_prime.abs();
        c1 += w * (p * p * c.f0 / r + (1.0 - p).powi(2) * c.g0 / ratio.sqrt());
        c2 += w * t_term(p, ratio, c.f4, c.g4).powi(2);
    }
    Ok(Class2Coefficients { c1: 0.5 * kappa * c1, c2: k4 * k4 / 1152.0 * c2, ratio })
}

fn t_term(p: f64, ratio: f64, f4: f64, g4: f64) -> f64 {
    let (a, b) = (p * f4, ratio * ratio * (1.0 - p) * g4);
    let t = a - b;
    // cancellation to rounding level means T vanishes identically
    if t.abs() <= 1e-10 * (a.abs() + b.abs()) {
        0.0
    } else {
        t
    }
}

/// Full set of expansion coefficients for a crossing set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionTerms {
    pub b1: f64,
    pub b2: f64,
    pub b3: Option<f64>,
    pub b4: Option<f64>,
    pub rho: f64,
    pub big_h1: f64,
    pub big_h2: f64,
}

pub fn expansion_terms(cs: &CrossingSet, r: f64, kernel: Kernel) -> Result<ExpansionTerms> {
    let plan = optimal_bandwidths(cs, 1, r, kernel)?;
    let (b1, b2) = expansion_b1_b2(cs, plan.big_h1, plan.big_h2, r, kernel);
    let (b3, b4) = match cs.regime {
        Regime::Class2 => {
            let c = expansion_b3_b4(cs, r, kernel)?;
            (Some(c.c1 / plan.big_h1), Some(c.c2 * plan.big_h1.powi(8)))
        }
        Regime::Class1 => (None, None),
    };
    Ok(ExpansionTerms { b1, b2, b3, b4, rho: plan.rho, big_h1: plan.big_h1, big_h2: plan.big_h2 })
}

/// Asymptotically optimal bandwidths `h_j = H_j·n^(−ρ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandwidthPlan {
    pub h1: f64,
    pub h2: f64,
    pub big_h1: f64,
    pub big_h2: f64,
    pub rho: f64,
    /// Set when `T = 0`, so the `h⁸` bias term is absent and the rate
    /// exponent drops to `1/13`. `H₁ = 1` is then nominal.
    pub degenerate: bool,
    pub regime: Regime,
}

/// Minimizes `f` over positive vectors by Nelder–Mead in log coordinates
/// from several starts; errors if the restarts disagree by more than `1e−8`
/// relative.
fn multistart_log<F: Fn(&[f64]) -> f64>(f: F, starts: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let cfg = NelderMeadConfig::default();
    let obj = |z: &[f64]| {
        let h: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        let v = f(&h);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut values = Vec::with_capacity(starts.len());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in starts {
        let z0: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        let res = nelder_mead(obj, &z0, cfg);
        values.push(res.value);
        if best.as_ref().is_none_or(|b| res.value < b.1) {
            best = Some((res.x.iter().map(|v| v.exp()).collect(), res.value));
        }
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo.abs().max(f64::MIN_POSITIVE);
    if !lo.is_finite() || spread > 1e-8 {
        return Err(Error::Optimization { spread });
    }
    Ok(best.expect("at least one start"))
}

fn log_starts(dim: usize) -> Vec<Vec<f64>> {
    let levels: Vec<f64> = (0..4).map(|k| 10f64.powf(-1.0 + 2.0 * k as f64 / 3.0)).collect();
    match dim {
        2 => levels.iter().flat_map(|&a| levels.iter().map(move |&b| vec![a, b])).collect(),
        _ => (0..16).map(|k| vec![10f64.powf(-1.0 + 2.0 * k as f64 / 15.0); dim]).collect(),
    }
}

/// Optimal bandwidths for training sizes `m = r·n` and `n`.
pub fn optimal_bandwidths(cs: &CrossingSet, n: usize, r: f64, kernel: Kernel) -> Result<BandwidthPlan> {
    if n == 0 || !(r > 0.0) {
        return Err(Error::Parameter(format!("need n >= 1 and r > 0, got n={n}, r={r}")));
    }
    let nf = n as f64;
    match cs.regime {
        Regime::Class1 => {
            let (h, _) = multistart_log(
                |h| {
                    let (b1, b2) = expansion_b1_b2(cs, h[0], h[1], r, kernel);
                    b1 + b2
                },
                &log_starts(2),
            )?;
            let scale = nf.powf(-0.2);
            Ok(BandwidthPlan {
                h1: h[0] * scale,
                h2: h[1] * scale,
                big_h1: h[0],
                big_h2: h[1],
                rho: 0.2,
                degenerate: false,
                regime: Regime::Class1,
            })
        }
        Regime::Class2 => {
            let c = expansion_b3_b4(cs, r, kernel)?;
            let (big_h1, rho, degenerate) = if c.c2 > 0.0 {
                ((c.c1 / (8.0 * c.c2)).powf(1.0 / 9.0), 1.0 / 9.0, false)
            } else {
                (1.0, 1.0 / 13.0, true)
            };
            let big_h2 = c.ratio.sqrt() * big_h1;
            let scale = nf.powf(-rho);
            Ok(BandwidthPlan {
                h1: big_h1 * scale,
                h2: big_h2 * scale,
                big_h1,
                big_h2,
                rho,
                degenerate,
                regime: Regime::Class2,
            })
        }
    }
}

/// One population in a multi-class problem.
#[derive(Clone, Debug)]
pub struct Population {
    pub density: Density,
    pub prior: f64,
}

/// A crossing of `p_i·f_i` and `p_j·f_j` at `y`, with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCrossing {
    pub i: usize,
    pub j: usize,
    pub y: f64,
}

/// Variance and bias parts of the multi-population objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiObjective {
    pub variance: f64,
    pub bias: f64,
}

impl MultiObjective {
    pub fn total(&self) -> f64 {
        self.variance + self.bias
    }
}

/// Crossings of every pair `p_i f_i`, `p_j f_j` on `[lo, hi]`.
pub fn pairwise_crossings(pops: &[Population], interval: (f64, f64), grid_points: usize) -> Result<Vec<PairCrossing>> {
    let mut out = Vec::new();
    for i in 0..pops.len() {
        for j in i + 1..pops.len() {
            let pair = DensityPair {
                f: pops[i].density.clone(),
                g: pops[j].density.clone(),
                p: pops[i].prior / (pops[i].prior + pops[j].prior),
                label: format!("{i}-{j}"),
            };
            let cs = pair.crossings(interval, grid_points)?;
            out.extend(cs.points.iter().map(|c| PairCrossing { i, j, y: c.y }));
        }
    }
    Ok(out)
}

/// Multi-population objective at scaled bandwidths `big_h` and size ratios
/// `r_j = n_j/n`:
///
/// `κ/4 ΣΣ_{i≠j} |Δ′|⁻¹{(r_iH_i)⁻¹p_i²f_i + (r_jH_j)⁻¹p_j²f_j}
///  + κ₂²/16 ΣΣ_{i≠j} |Δ′|⁻¹{H_i²p_if_i″ − H_j²p_jf_j″}²`,
///
/// with the double sums over ordered pairs, so each listed crossing counts
/// twice. With two populations this equals `B₁ + B₂`.
pub fn multi_t(
    pops: &[Population],
    table: &[PairCrossing],
    big_h: &[f64],
    r: &[f64],
    kernel: Kernel,
) -> Result<MultiObjective> {
    let n = pops.len();
    if n < 2 || big_h.len() != n || r.len() != n {
        return Err(Error::Parameter("need N >= 2 populations with one H and one r each".into()));
    }
    for (a, ca) in table.iter().enumerate() {
        if ca.i >= ca.j || ca.j >= n {
            return Err(Error::Parameter(format!("bad crossing indices ({}, {})", ca.i, ca.j)));
        }
        for cb in &table[a + 1..] {
            if (ca.i, ca.j) != (cb.i, cb.j) && (ca.y - cb.y).abs() <= 1e-9 {
                return Err(Error::UnsupportedConfiguration(format!(
                    "populations ({}, {}) and ({}, {}) cross at the same point {}",
                    ca.i, ca.j, cb.i, cb.j, ca.y
                )));
            }
        }
    }
    let kappa = kernel.roughness(0);
    let k2 = kernel.moment(2);
    let (mut var, mut bias) = (0.0, 0.0);
    for c in table {
        let (pi, pj) = (&pops[c.i], &pops[c.j]);
        let slope = pi.prior * pi.density.deriv(1, c.y) - pj.prior * pj.density.deriv(1, c.y);
        let w = 1.0 / slope.abs();
        var += w
            * (pi.prior.powi(2) * pi.density.eval(c.y) / (r[c.i] * big_h[c.i])
                + pj.prior.powi(2) * pj.density.eval(c.y) / (r[c.j] * big_h[c.j]));
        bias += w
            * (big_h[c.i].powi(2) * pi.prior * pi.density.deriv(2, c.y)
                - big_h[c.j].powi(2) * pj.prior * pj.density.deriv(2, c.y))
            .powi(2);
    }
    // each unordered crossing appears twice in the ordered sums
    Ok(MultiObjective { variance: 2.0 * kappa / 4.0 * var, bias: 2.0 * k2 * k2 / 16.0 * bias })
}

/// Minimizer of [`multi_t`] over `H`; returns the constants and the minimum.
pub fn minimize_multi_t(pops: &[Population], table: &[PairCrossing], r: &[f64], kernel: Kernel) -> Result<(Vec<f64>, f64)> {
    multi_t(pops, table, &vec![1.0; pops.len()], r, kernel)?;
    multistart_log(
        |h| multi_t(pops, table, h, r, kernel).map_or(f64::INFINITY, |t| t.total()),
        &log_starts(pops.len()),
    )
}
