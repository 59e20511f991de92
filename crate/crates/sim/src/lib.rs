//! Simulation harness for bandwidth-selection studies: replicated selection
//! across sample sizes with slope regression, the heavy-tail divergence
//! experiment, and the cross-validation comparison.
//!
//! Every replicate draws from a generator derived from the master seed and
//! its `(n index, replicate)` position, so output files are byte-identical
//! across reruns and worker counts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cv;
pub mod error;
pub mod output;
pub mod stats;
pub mod study;
pub mod surface;
pub mod tail;

pub use config::{default_n_list, ExperimentConfig};
pub use cv::{run_cv_comparison, CvComparison, CvRow};
pub use error::{SimError, SimResult};
pub use stats::{fit_slope, iqr, SlopeFit};
pub use study::{run_study, ReplicateRow, StudyResult, SummaryRow, Which};
pub use tail::{light_tail_contrast, run_tail_study, TailRow, TailStudy};
