//! Classification rules built on kernel density estimates.
//!
//! - [`classify_a0`]: the Bayes rule, sign of `Δ(x) = p·f(x) − (1−p)·g(x)`
//! - [`TrainedClassifier::classify_a1`]: the plug-in rule on `Δ̂`
//! - [`TrainedClassifier::classify_tail`]: where `f̂ = ĝ = 0`, side on which
//!   the nearest estimated support ends decides
//! - [`TrainedClassifier::classify_ahat`]: plug-in rule where it is defined,
//!   tail rule otherwise, with the side picked by the pooled median
//!
//! Exact ties are resolved toward F everywhere.

use crate::densities::DensityPair;
use crate::error::{Error, Result};
use crate::kde::{KdeEstimate, SphericalKde};
use crate::kernels::Kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    FromF,
    FromG,
}

/// Which sub-rule produced a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Path {
    Body,
    TailRight,
    TailLeft,
    TieBreak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub value: Class,
    pub path: Path,
}

impl Label {
    fn body(value: Class) -> Self {
        Self { value, path: Path::Body }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

fn sign_label(delta: f64) -> Label {
    if delta > 0.0 {
        Label::body(Class::FromF)
    } else if delta < 0.0 {
        Label::body(Class::FromG)
    } else {
        Label { value: Class::FromF, path: Path::TieBreak }
    }
}

/// Bayes rule for a known pair.
pub fn classify_a0(pair: &DensityPair, x: f64) -> Label {
    sign_label(pair.delta(x))
}

/// Plug-in classifier from two training samples.
#[derive(Clone, Debug)]
pub struct TrainedClassifier {
    fhat: KdeEstimate,
    ghat: KdeEstimate,
    p: f64,
    pooled_median: f64,
}

/// Tail rule on a pair of estimates, without checking that both vanish at
/// `x`: the population whose estimated support ends closest to `x` on the
/// given side wins, F on ties.
pub fn tail_rule(fhat: &KdeEstimate, ghat: &KdeEstimate, x: f64, side: Side) -> Result<Label> {
    let (f_end, g_end, path) = match side {
        Side::Right => (
            fhat.last_right_endpoint_at_or_below(x),
            ghat.last_right_endpoint_at_or_below(x),
            Path::TailRight,
        ),
        Side::Left => (fhat.first_left_endpoint_at_or_above(x), ghat.first_left_endpoint_at_or_above(x), Path::TailLeft),
    };
    let value = match (f_end, g_end) {
        (None, None) => {
            let side = if side == Side::Right { "left" } else { "right" };
            return Err(Error::EmptyTail { side, x });
        }
        (Some(_), None) => Class::FromF,
        (None, Some(_)) => Class::FromG,
        (Some(a), Some(b)) => {
            let f_closer = match side {
                Side::Right => a >= b,
                Side::Left => a <= b,
            };
            if f_closer {
                Class::FromF
            } else {
                Class::FromG
            }
        }
    };
    Ok(Label { value, path })
}

/// Lower median of the union of two ascending samples.
pub fn pooled_lower_median(a: &[f64], b: &[f64]) -> f64 {
    let total = a.len() + b.len();
    let target = (total - 1) / 2;
    // walk the merge up to the target rank
    let (mut i, mut j) = (0, 0);
    loop {
        let take_a = j >= b.len() || (i < a.len() && a[i] <= b[j]);
        let v = if take_a { a[i] } else { b[j] };
        if i + j == target {
            return v;
        }
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
    }
}

impl TrainedClassifier {
    pub fn new(x: Vec<f64>, y: Vec<f64>, h1: f64, h2: f64, p: f64, kernel: Kernel) -> Result<Self> {
        let fhat = KdeEstimate::new(x, h1, kernel)?;
        let ghat = KdeEstimate::new(y, h2, kernel)?;
        Self::from_estimates(fhat, ghat, p)
    }

    pub fn from_estimates(fhat: KdeEstimate, ghat: KdeEstimate, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter(format!("prior p must lie in (0, 1), got {p}")));
        }
        let pooled_median = pooled_lower_median(fhat.data(), ghat.data());
        Ok(Self { fhat, ghat, p, pooled_median })
    }

    pub fn fhat(&self) -> &KdeEstimate {
        &self.fhat
    }

    pub fn ghat(&self) -> &KdeEstimate {
        &self.ghat
    }

    pub fn prior(&self) -> f64 {
        self.p
    }

    pub fn pooled_median(&self) -> f64 {
        self.pooled_median
    }

    pub fn delta_hat(&self, x: f64) -> f64 {
        self.p * self.fhat.eval(x) - (1.0 - self.p) * self.ghat.eval(x)
    }

    /// Plug-in rule. `None` when both estimates vanish at `x`; callers then
    /// need [`TrainedClassifier::classify_ahat`].
    pub fn classify_a1(&self, x: f64) -> Option<Label> {
        let f = self.fhat.eval(x);
        let g = self.ghat.eval(x);
        if f == 0.0 && g == 0.0 {
            return None;
        }
        Some(sign_label(self.p * f - (1.0 - self.p) * g))
    }

    /// Tail rule at a point where both estimates vanish.
    pub fn classify_tail(&self, x: f64, side: Side) -> Result<Label> {
        if self.fhat.eval(x) != 0.0 || self.ghat.eval(x) != 0.0 {
            return Err(Error::NotInTail { x });
        }
        self.tail_label(x, side)
    }

    fn tail_label(&self, x: f64, side: Side) -> Result<Label> {
        tail_rule(&self.fhat, &self.ghat, x, side)
    }

    /// Combined rule: plug-in where either estimate is positive, otherwise the
    /// right tail rule above the pooled median and the left one at or below it.
    pub fn classify_ahat(&self, x: f64) -> Result<Label> {
        if let Some(l) = self.classify_a1(x) {
            return Ok(l);
        }
        let side = if x > self.pooled_median { Side::Right } else { Side::Left };
        self.tail_label(x, side)
    }

    /// Class assigned by [`TrainedClassifier::classify_ahat`]. Total on ℝ
    /// because both samples are non-empty.
    pub fn class_of(&self, x: f64) -> Class {
        self.classify_ahat(x)
            .expect("non-empty samples leave an endpoint on the far side of the median")
            .value
    }
}

/// Rule for N ≥ 2 univariate populations: argmax of `p_j·f̂_j(x)`.
#[derive(Clone, Debug)]
pub struct MultiClassifier {
    estimates: Vec<KdeEstimate>,
    priors: Vec<f64>,
}

impl MultiClassifier {
    pub fn new(samples: Vec<Vec<f64>>, bandwidths: &[f64], priors: &[f64], kernel: Kernel) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::Parameter("need at least two populations".into()));
        }
        if bandwidths.len() != n || priors.len() != n {
            return Err(Error::Parameter(format!(
                "{n} samples but {} bandwidths and {} priors",
                bandwidths.len(),
                priors.len()
            )));
        }
        if priors.iter().any(|&p| p <= 0.0) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter("priors must be positive and sum to 1".into()));
        }
        let estimates = samples
            .into_iter()
            .zip(bandwidths)
            .map(|(s, &h)| KdeEstimate::new(s, h, kernel))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { estimates, priors: priors.to_vec() })
    }

    /// Index of the winning population; lowest index on ties. `None` when
    /// every estimate vanishes at `x`.
    pub fn classify(&self, x: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        let mut any = false;
        for (j, (e, &p)) in self.estimates.iter().zip(&self.priors).enumerate() {
            let f = e.eval(x);
            any |= f != 0.0;
            let v = p * f;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        if any {
            best.map(|(j, _)| j)
        } else {
            None
        }
    }
}

/// Convenience wrapper over [`MultiClassifier`].
pub fn classify_multi(
    samples: Vec<Vec<f64>>,
    bandwidths: &[f64],
    priors: &[f64],
    kernel: Kernel,
    x: f64,
) -> Result<Option<usize>> {
    Ok(MultiClassifier::new(samples, bandwidths, priors, kernel)?.classify(x))
}

/// d-variate plug-in rule with a spherical kernel and one bandwidth per population.
#[derive(Clone, Debug)]
pub struct MultivariateClassifier {
    fhat: SphericalKde,
    ghat: SphericalKde,
    p: f64,
}

impl MultivariateClassifier {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>, h1: f64, h2: f64, p: f64, kernel: Kernel) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter(format!("prior p must lie in (0, 1), got {p}")));
        }
        let fhat = SphericalKde::new(x, h1, kernel)?;
        let ghat = SphericalKde::new(y, h2, kernel)?;
        if fhat.dim() != ghat.dim() {
            return Err(Error::Parameter(format!(
                "samples have dimensions {} and {}",
                fhat.dim(),
                ghat.dim()
            )));
        }
        Ok(Self { fhat, ghat, p })
    }

    /// `Ok(None)` when both estimates vanish at `x`.
    pub fn classify(&self, x: &[f64]) -> Result<Option<Label>> {
        let f = self.fhat.eval(x)?;
        let g = self.ghat.eval(x)?;
        if f == 0.0 && g == 0.0 {
            return Ok(None);
        }
        Ok(Some(sign_label(self.p * f - (1.0 - self.p) * g)))
    }
}
