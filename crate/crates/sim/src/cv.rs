use kdclass::exec::{derive_seed, map_indexed, rng_for};
use kdclass::selector::{cv_surface, select_on_grid, selection_grids, SelectorConfig, TrainingData};
use kdclass::{make_pair, Execution, PairId, Which};

use crate::error::SimResult;
use crate::stats::iqr;

#[derive(Clone, Debug, PartialEq)]
pub struct CvRow {
    pub rep: usize,
    pub seed: u64,
    pub boot_h1: f64,
    pub boot_h2: f64,
    pub cv_h1: f64,
    pub cv_h2: f64,
    pub pilot_h1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvComparison {
    pub pair: String,
    pub n: usize,
    pub rows: Vec<CvRow>,
    pub iqr_log_boot_h1: f64,
    pub iqr_log_cv_h1: f64,
    /// `iqr_log_cv_h1 / iqr_log_boot_h1`.
    pub ratio: f64,
}

/// Ratio of the interquartile ranges of `log ĥ` under two selectors.
pub fn spread_ratio(cv: &[f64], boot: &[f64]) -> f64 {
    let logs = |v: &[f64]| v.iter().map(|h| h.ln()).collect::<Vec<_>>();
    iqr(&logs(cv)) / iqr(&logs(boot))
}

/// Bootstrap selection and leave-one-out CV minimization on the same grid and
/// the same training samples, `m = n`.
pub fn run_cv_comparison(
    pair_id: PairId,
    n: usize,
    reps: usize,
    seed: u64,
    selector: &SelectorConfig,
    exec: Execution,
) -> SimResult<CvComparison> {
    let pair = make_pair(pair_id)?;
    let selector = SelectorConfig { exec: Execution::Sequential, ..*selector };
    selector.validate()?;
    let rows = map_indexed(exec, reps, |rep| -> SimResult<CvRow> {
        let rep_seed = derive_seed(seed, &[rep as u64]);
        let mut rng = rng_for(rep_seed, &[0]);
        let x = pair.sample(Which::F, n, &mut rng);
        let y = pair.sample(Which::G, n, &mut rng);
        let data = TrainingData::new(x, y, pair.p)?;
        let (g1, g2) = selection_grids(&data, &selector)?;
        let boot = select_on_grid(&data, &g1, &g2, &selector, derive_seed(rep_seed, &[1]))?;
        let cv = cv_surface(&data, &g1, &g2, selector.kernel)?;
        let (i, j) = cv.argmin();
        Ok(CvRow {
            rep,
            seed: rep_seed,
            boot_h1: boot.h1,
            boot_h2: boot.h2,
            cv_h1: g1[i],
            cv_h2: g2[j],
            pilot_h1: boot.pilots.0,
        })
    })
    .into_iter()
    .collect::<SimResult<Vec<_>>>()?;
    let boot: Vec<f64> = rows.iter().map(|r| r.boot_h1).collect();
    let cv: Vec<f64> = rows.iter().map(|r| r.cv_h1).collect();
    let log_iqr = |v: &[f64]| iqr(&v.iter().map(|h| h.ln()).collect::<Vec<_>>());
    Ok(CvComparison {
        pair: pair_id.name(),
        n,
        iqr_log_boot_h1: log_iqr(&boot),
        iqr_log_cv_h1: log_iqr(&cv),
        ratio: spread_ratio(&cv, &boot),
        rows,
    })
}
