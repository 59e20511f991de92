use std::path::{Path, PathBuf};

use kdclass::selector::SelectorConfig;
use kdclass::PairId;
use serde::Deserialize;

use crate::error::{io_err, SimError, SimResult};

/// `round(20·10^(k/9))` for `k = 0..9`: ten log-spaced sizes from 20 to 200.
pub fn default_n_list() -> Vec<usize> {
    (0..10).map(|k| (20.0 * 10f64.powf(k as f64 / 9.0)).round() as usize).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub pair: PairId,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub selector: SelectorConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            pair: PairId::Class1a,
            n_list: default_n_list(),
            reps: 100,
            selector: SelectorConfig::default(),
            seed: 20_240_601,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> SimResult<()> {
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::Config("n_list must be non-empty and strictly increasing".into()));
        }
        if self.reps == 0 {
            return Err(SimError::Config("reps must be at least 1".into()));
        }
        self.selector.validate()?;
        Ok(())
    }
}

/// Optional `key = value` settings file; keys mirror the long CLI flags.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub pair: Option<String>,
    pub n_list: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub boot_iters: Option<usize>,
    pub grid: Option<usize>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub window: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> SimResult<Self> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sizes() {
        assert_eq!(default_n_list(), vec![20, 26, 33, 43, 56, 72, 93, 120, 155, 200]);
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig { n_list: vec![20, 20], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { reps: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn file_config_parsing() {
        let c = FileConfig::parse("pair = \"class2a\"\nn-list = [20, 40]\nreps = 3\nc1 = 0.05\nseed = 9\n").unwrap();
        assert_eq!(c.pair.as_deref(), Some("class2a"));
        assert_eq!(c.n_list, Some(vec![20, 40]));
        assert_eq!(c.reps, Some(3));
        assert_eq!(c.seed, Some(9));
        assert!(FileConfig::parse("bogus = 1").is_err());
    }
}
