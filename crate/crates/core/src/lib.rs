//! Kernel-based two-population classification with bandwidths chosen to
//! minimize misclassification risk rather than density-estimation error.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernels`]: compact polynomial kernels and their exact functionals
//! - [`densities`]: analytic reference pairs and the crossing structure of `p·f − (1−p)·g`
//! - [`kde`]: kernel density estimates, exact estimator moments, smoothed bootstrap
//! - [`classifier`]: plug-in, tail and combined rules, N-population and d-variate rules
//! - [`risk`]: Bayes risk, exact-region empirical risk, asymptotic expansions, optimal bandwidths
//! - [`selector`]: bootstrap bandwidth selector, pilot bandwidths, cross-validation control
//!
//! Replicate loops run on rayon when the default `parallel` feature is on.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod densities;
pub mod error;
pub mod exec;
pub mod kde;
pub mod kernels;
pub mod numeric;
pub mod risk;
pub mod selector;

pub use classifier::{Class, Label, Path, TrainedClassifier};
pub use densities::{make_pair, CrossingSet, Density, DensityPair, PairId, Regime, Which};
pub use error::{Error, Result};
pub use exec::Execution;
pub use kde::KdeEstimate;
pub use kernels::Kernel;
