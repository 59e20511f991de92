use kdclass::exec::{derive_seed, rng_for};
use kdclass::selector::{cv_surface, select_on_grid, selection_grids, ErrSurface, Selection, SelectorConfig, TrainingData};
use kdclass::{make_pair, PairId, Which};

use crate::error::SimResult;

/// Bootstrap and leave-one-out surfaces for a single training sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceReport {
    pub pair: String,
    pub n: usize,
    pub selection: Selection,
    pub cv: ErrSurface,
}

pub fn risk_surface(pair_id: PairId, n: usize, seed: u64, selector: &SelectorConfig) -> SimResult<SurfaceReport> {
    let pair = make_pair(pair_id)?;
    let mut rng = rng_for(seed, &[0]);
    let x = pair.sample(Which::F, n, &mut rng);
    let y = pair.sample(Which::G, n, &mut rng);
    let data = TrainingData::new(x, y, pair.p)?;
    let (g1, g2) = selection_grids(&data, selector)?;
    let selection = select_on_grid(&data, &g1, &g2, selector, derive_seed(seed, &[1]))?;
    let cv = cv_surface(&data, &g1, &g2, selector.kernel)?;
    Ok(SurfaceReport { pair: pair_id.name(), n, selection, cv })
}
