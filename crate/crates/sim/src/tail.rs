use kdclass::exec::{map_indexed, rng_for};
use kdclass::risk::decision_risk_parts;
use kdclass::{make_pair, DensityPair, Execution, Kernel, PairId, TrainedClassifier, Which};

use crate::error::{SimError, SimResult};
use crate::stats::mean_sd;

#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub n: usize,
    pub h: f64,
    /// Replicate mean of `∫_{x₀}^∞ P(x labelled G) f(x) dx`.
    pub tail_mass: f64,
    pub se: f64,
    /// `n·h·tail_mass`.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailStudy {
    pub alpha: f64,
    pub beta: f64,
    pub x0: f64,
    pub rows: Vec<TailRow>,
}

/// Bandwidth used by the tail experiments at sample size `n`.
pub fn tail_bandwidth(n: usize) -> f64 {
    (n as f64).powf(-0.2)
}

/// Per-replicate `∫_{lo}^∞ P(x labelled G) f(x) dx` under the combined rule,
/// with `m = n` and `h₁ = h₂ = n^(−1/5)`.
fn tail_masses(pair: &DensityPair, n: usize, lo: f64, reps: usize, seed: u64, k: usize, exec: Execution) -> SimResult<Vec<f64>> {
    let h = tail_bandwidth(n);
    map_indexed(exec, reps, |rep| -> SimResult<f64> {
        let mut rng = rng_for(seed, &[k as u64, rep as u64]);
        let x = pair.sample(Which::F, n, &mut rng);
        let y = pair.sample(Which::G, n, &mut rng);
        let clf = TrainedClassifier::new(x, y, h, h, pair.p, Kernel::Triweight)?;
        Ok(decision_risk_parts(pair, &clf, (lo, f64::INFINITY))?.from_f / pair.p)
    })
    .into_iter()
    .collect()
}

/// Tail misclassification beyond `x₀` (the F 0.99 quantile) for the Pareto
/// pair, scaled by `n·h` and tabulated against `n`.
pub fn run_tail_study(alpha: f64, beta: f64, n_list: &[usize], reps: usize, seed: u64, exec: Execution) -> SimResult<TailStudy> {
    let pair = make_pair(PairId::ParetoTail { alpha, beta })?;
    if reps == 0 || n_list.is_empty() {
        return Err(SimError::Config("tail study needs reps ≥ 1 and a non-empty n_list".into()));
    }
    let x0 = pair.f.quantile(0.99).expect("Pareto quantile is closed form");
    let mut rows = Vec::with_capacity(n_list.len());
    for (k, &n) in n_list.iter().enumerate() {
        let masses = tail_masses(&pair, n, x0, reps, seed, k, exec)?;
        let (mean, sd) = mean_sd(&masses);
        let h = tail_bandwidth(n);
        rows.push(TailRow { n, h, tail_mass: mean, se: sd / (reps as f64).sqrt(), scaled: n as f64 * h * mean });
    }
    Ok(TailStudy { alpha, beta, x0, rows })
}

/// Fraction of the F mass beyond 3 that the combined rule assigns to F, for
/// `f = N(0,1)`, `g = N(0, 1/9)`, averaged over replicates.
pub fn light_tail_contrast(n: usize, reps: usize, seed: u64, exec: Execution) -> SimResult<f64> {
    if reps == 0 {
        return Err(SimError::Config("reps must be at least 1".into()));
    }
    let pair = make_pair(PairId::LightTail)?;
    let beyond = pair.f.survival(3.0).expect("normal survival function");
    let wrong = tail_masses(&pair, n, 3.0, reps, seed, 0, exec)?;
    Ok(1.0 - wrong.iter().sum::<f64>() / (reps as f64 * beyond))
}
