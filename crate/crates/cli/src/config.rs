use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use ecgspike_core::ingest::{SplitRatio, WindowGeometry};
use ecgspike_core::lcadc::LcAdcConfig;
use ecgspike_core::snn::NetworkSpec;
use ecgspike_core::train::{InputEncoding, TrainConfig};

/// Everything a run depends on. Archived next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Corpus directory (WFDB or CSV records).
    pub data_dir: Option<PathBuf>,
    pub channel: usize,
    pub window: WindowGeometry,
    pub per_class: usize,
    pub split: SplitRatio,
    pub lcadc: LcAdcConfig,
    /// Spike ticks merged into one network input position.
    pub bin_factor: usize,
    pub time_steps: usize,
    /// JSON `NetworkSpec`; the default five-conv topology when absent.
    pub network: Option<PathBuf>,
    pub train: TrainConfig,
    pub sweep: SweepConfig,
    /// Simulation lengths tabulated by `complexity`.
    pub complexity_time_steps: Vec<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub bits: Vec<u32>,
    pub bin_factors: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Also train the SCNN on Nyquist amplitude input.
    pub nyquist: bool,
    /// Also train the CNN baseline on Nyquist amplitude input.
    pub cnn: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            bits: vec![5, 6, 7],
            bin_factors: vec![2],
            seeds: vec![0, 1, 2],
            nyquist: true,
            cnn: true,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data_dir: None,
            channel: 0,
            window: WindowGeometry::default(),
            per_class: 800,
            split: SplitRatio::default(),
            lcadc: LcAdcConfig::default(),
            bin_factor: 2,
            time_steps: 8,
            network: None,
            train: TrainConfig::default(),
            sweep: SweepConfig::default(),
            complexity_time_steps: vec![1, 2, 4, 5, 6, 8, 16, 19, 32],
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn lcadc_encoding(&self, bits: u32, bin_factor: usize) -> InputEncoding {
        InputEncoding::LcAdc {
            config: LcAdcConfig {
                resolution_bits: bits,
                ..self.lcadc
            },
            bin_factor,
        }
    }

    pub fn network_spec(&self, input_len: usize) -> Result<NetworkSpec> {
        match &self.network {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading network spec {}", path.display()))?;
                let mut spec: NetworkSpec = serde_json::from_str(&text)
                    .with_context(|| format!("parsing network spec {}", path.display()))?;
                spec.time_steps = self.time_steps;
                spec.validate()?;
                anyhow::ensure!(
                    spec.input_len == input_len,
                    "network spec expects {} inputs but the encoding yields {input_len}",
                    spec.input_len
                );
                Ok(spec)
            }
            None => Ok(NetworkSpec::default_for(input_len, self.time_steps)),
        }
    }
}
