pub mod complexity;
pub mod compress;
pub mod ingest;
pub mod report;
pub mod sweep;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use anyhow::Result;

use ecgspike_core::train::TrainConfig;

use crate::config::ExperimentConfig;
use crate::output::{self, Meta};

/// Effective settings of one invocation.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    /// `--bits`, when given.
    pub bits: Option<Vec<u32>>,
    /// `--bin`, when given.
    pub bins: Option<Vec<usize>>,
    pub allow_partial: bool,
}

impl Run {
    pub fn new(config: ExperimentConfig, out: impl Into<PathBuf>) -> Self {
        Self {
            config,
            out: out.into(),
            bits: None,
            bins: None,
            allow_partial: false,
        }
    }

    pub fn meta(&self, command: &str, mode: impl Into<String>) -> Meta {
        Meta::new(command, self.config.seed, mode)
    }

    pub fn sweep_bits(&self) -> Vec<u32> {
        self.bits
            .clone()
            .unwrap_or_else(|| self.config.sweep.bits.clone())
    }

    pub fn sweep_bins(&self) -> Vec<usize> {
        self.bins
            .clone()
            .unwrap_or_else(|| self.config.sweep.bin_factors.clone())
    }

    /// Resolution for single-model commands: the first `--bits` entry or the
    /// configured LC-ADC resolution.
    pub fn train_bits(&self) -> u32 {
        self.bits
            .as_ref()
            .and_then(|b| b.first().copied())
            .unwrap_or(self.config.lcadc.resolution_bits)
    }

    pub fn train_bin(&self) -> usize {
        self.bins
            .as_ref()
            .and_then(|b| b.first().copied())
            .unwrap_or(self.config.bin_factor)
    }

    pub fn dir(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.dir("cache")
    }

    /// Store the effective config beside a command's outputs.
    pub fn archive_config(&self, dir: &Path) -> Result<()> {
        output::write_text(
            &dir.join("config.json"),
            &(serde_json::to_string_pretty(&self.config)? + "\n"),
        )
    }
}

/// Training hyperparameters in one line, for CSV headers.
pub fn train_label(config: &TrainConfig) -> String {
    format!(
        "epochs={};batch={};lr={};optimizer={};surrogate={}:{};lambda={};band={}-{};detach_reset={};train_lif={}",
        config.epochs,
        config.batch_size,
        config.learning_rate,
        serde_json::to_value(config.optimizer)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        serde_json::to_value(config.surrogate.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        config.surrogate.width,
        config.self_mod_weight,
        config.target_rate_range.0,
        config.target_rate_range.1,
        config.detach_reset,
        config.train_lif,
    )
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(mean(&[1.0, 2.0]), Some(1.5));
    }

    #[test]
    fn list_flags_fall_back_to_config() {
        let mut run = Run::new(ExperimentConfig::default(), "x");
        assert_eq!(run.sweep_bits(), [5, 6, 7]);
        assert_eq!(run.train_bits(), 5);
        run.bits = Some(vec![7, 5]);
        assert_eq!(run.train_bits(), 7);
        assert_eq!(run.sweep_bits(), [7, 5]);
    }
}
