use std::fmt;

use kdclass::exec::{derive_seed, map_indexed, rng_for};
use kdclass::selector::{select_bandwidths, TrainingData};
use kdclass::{make_pair, Execution};

use crate::config::ExperimentConfig;
use crate::error::SimResult;
use crate::stats::{fit_slope, mean_sd, SlopeFit};

/// Which bandwidth a fit or column refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    H1,
    H2,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::H1 => "h1",
            Which::H2 => "h2",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateRow {
    pub n: usize,
    pub rep: usize,
    pub h1: f64,
    pub h2: f64,
    pub err_boot_min: f64,
    pub seed: u64,
    pub pilot_h1: f64,
    pub pilot_h2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub mean_neglog_h1: f64,
    pub mean_neglog_h2: f64,
    pub sd_neglog_h1: f64,
    pub sd_neglog_h2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyResult {
    pub pair: String,
    pub rows: Vec<ReplicateRow>,
    pub summary: Vec<SummaryRow>,
    pub fit_h1: SlopeFit,
    pub fit_h2: SlopeFit,
}

/// Seed of replicate `rep` at the `k`-th sample size. Two studies with the
/// same master seed see the same seeds cell by cell.
pub fn replicate_seed(master: u64, k: usize, rep: usize) -> u64 {
    derive_seed(master, &[k as u64, rep as u64])
}

/// Replicated bootstrap selection with `p = 1/2`, `m = n`, followed by
/// least-squares fits of mean `−log ĥⱼ` on `log n`.
pub fn run_study(cfg: &ExperimentConfig, exec: Execution) -> SimResult<StudyResult> {
    cfg.validate()?;
    let pair = make_pair(cfg.pair)?;
    let selector = kdclass::selector::SelectorConfig { exec: Execution::Sequential, ..cfg.selector };
    let cells = cfg.n_list.len() * cfg.reps;
    let rows = map_indexed(exec, cells, |c| -> SimResult<ReplicateRow> {
        let (k, rep) = (c / cfg.reps, c % cfg.reps);
        let n = cfg.n_list[k];
        let seed = replicate_seed(cfg.seed, k, rep);
        let mut rng = rng_for(seed, &[0]);
        let x = pair.sample(kdclass::Which::F, n, &mut rng);
        let y = pair.sample(kdclass::Which::G, n, &mut rng);
        let data = TrainingData::new(x, y, pair.p)?;
        let sel = select_bandwidths(&data, &selector, derive_seed(seed, &[1]))?;
        Ok(ReplicateRow {
            n,
            rep,
            h1: sel.h1,
            h2: sel.h2,
            err_boot_min: sel.err_min,
            seed,
            pilot_h1: sel.pilots.0,
            pilot_h2: sel.pilots.1,
        })
    })
    .into_iter()
    .collect::<SimResult<Vec<_>>>()?;

    let summary: Vec<SummaryRow> = rows
        .chunks(cfg.reps)
        .map(|chunk| {
            let l1: Vec<f64> = chunk.iter().map(|r| -r.h1.ln()).collect();
            let l2: Vec<f64> = chunk.iter().map(|r| -r.h2.ln()).collect();
            let (m1, s1) = mean_sd(&l1);
            let (m2, s2) = mean_sd(&l2);
            SummaryRow { n: chunk[0].n, mean_neglog_h1: m1, mean_neglog_h2: m2, sd_neglog_h1: s1, sd_neglog_h2: s2 }
        })
        .collect();
    let pts = |f: fn(&SummaryRow) -> f64| -> Vec<(f64, f64)> {
        summary.iter().map(|s| ((s.n as f64).ln(), f(s))).collect()
    };
    let fit_h1 = fit_slope(&pts(|s| s.mean_neglog_h1), Which::H1)?;
    let fit_h2 = fit_slope(&pts(|s| s.mean_neglog_h2), Which::H2)?;
    Ok(StudyResult { pair: cfg.pair.name(), rows, summary, fit_h1, fit_h2 })
}
