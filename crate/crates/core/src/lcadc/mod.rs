//! Behavioural model of a clocked level-crossing ADC.
//!
//! The converter tracks a reference value. At every clock tick the present
//! input is compared against it; when the difference reaches one LSB
//! (`A_FS / 2^M`) a REQ spike is emitted, DIR records whether the crossing
//! was upward, and the reference moves. Ticks without a crossing produce
//! nothing, which is where the compression comes from.

pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the reference moves after a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMode {
    /// Reference becomes the present input value.
    #[default]
    PresentSample,
    /// Reference steps by a whole number of LSBs toward the input, so it
    /// always sits on the level grid anchored at the first sample.
    LevelSnapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcAdcConfig {
    /// Full-scale input range in millivolts.
    pub a_fs_mv: f64,
    pub resolution_bits: u32,
    pub clock_hz: u32,
    /// Encode the number of LSBs crossed instead of a unit spike.
    pub multi_spike: bool,
    #[serde(default)]
    pub reference: ReferenceMode,
}

impl Default for LcAdcConfig {
    fn default() -> Self {
        Self {
            a_fs_mv: 10.0,
            resolution_bits: 5,
            clock_hz: 360,
            multi_spike: false,
            reference: ReferenceMode::PresentSample,
        }
    }
}

impl LcAdcConfig {
    pub fn with_bits(resolution_bits: u32) -> Self {
        Self {
            resolution_bits,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.resolution_bits) {
            return Err(Error::InvalidConfig(format!(
                "resolution_bits {} outside [1, 16]",
                self.resolution_bits
            )));
        }
        if !(self.a_fs_mv > 0.0 && self.a_fs_mv.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "a_fs_mv {} must be positive",
                self.a_fs_mv
            )));
        }
        if self.clock_hz == 0 {
            return Err(Error::InvalidConfig("clock_hz must be positive".into()));
        }
        Ok(())
    }

    /// Stable short name, used for cache keys and report columns.
    pub fn tag(&self) -> String {
        format!(
            "m{}_afs{}_{}{}",
            self.resolution_bits,
            self.a_fs_mv,
            match self.reference {
                ReferenceMode::PresentSample => "present",
                ReferenceMode::LevelSnapped => "snapped",
            },
            if self.multi_spike { "_multi" } else { "" }
        )
    }
}

/// Quantization step `A_FS / 2^M` in millivolts.
pub fn compute_lsb(config: &LcAdcConfig) -> f64 {
    config.a_fs_mv / f64::from(1u32 << config.resolution_bits)
}

/// Raw converter outputs, one entry per clock tick.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpikeStreams {
    pub req: Vec<bool>,
    /// Up-crossing flag; only meaningful where `req` is set.
    pub dir: Vec<bool>,
    /// Whole LSBs spanned by the crossing (0 where `req` is clear).
    pub levels: Vec<u32>,
}

impl SpikeStreams {
    pub fn len(&self) -> usize {
        self.req.len()
    }

    pub fn is_empty(&self) -> bool {
        self.req.is_empty()
    }
}

/// Run the converter over a signal sampled at the converter clock.
pub fn sample(signal_mv: &[f64], config: &LcAdcConfig) -> Result<SpikeStreams> {
    config.validate()?;
    let (&first, rest) = signal_mv.split_first().ok_or(Error::EmptyInput)?;
    let lsb = compute_lsb(config);
    let n = signal_mv.len();
    let mut streams = SpikeStreams {
        req: vec![false; n],
        dir: vec![false; n],
        levels: vec![0; n],
    };

    let mut reference = first;
    for (i, &x) in rest.iter().enumerate().map(|(i, x)| (i + 1, x)) {
        let delta = x - reference;
        if delta.abs() >= lsb {
            let levels = (delta.abs() / lsb).floor();
            streams.req[i] = true;
            streams.dir[i] = x > reference;
            streams.levels[i] = levels as u32;
            reference = match config.reference {
                ReferenceMode::PresentSample => x,
                ReferenceMode::LevelSnapped => reference + delta.signum() * levels * lsb,
            };
        }
    }
    Ok(streams)
}

/// Signed per-tick spike train: `+k` for an up-crossing, `-k` for a down
/// crossing, 0 when idle. `k` is 1 unless multi-spike mode is on.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TernarySpikeTrain {
    pub values: Vec<i32>,
}

impl TernarySpikeTrain {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spike_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    /// Merge `bin_factor` consecutive ticks into one, keeping the sign of
    /// their net movement. A trailing partial bin is kept.
    pub fn binned(&self, bin_factor: usize) -> TernarySpikeTrain {
        assert!(bin_factor > 0, "bin_factor must be positive");
        TernarySpikeTrain {
            values: self
                .values
                .chunks(bin_factor)
                .map(|c| c.iter().sum::<i32>().signum())
                .collect(),
        }
    }
}

pub fn merge_req_dir(streams: &SpikeStreams, config: &LcAdcConfig) -> Result<TernarySpikeTrain> {
    if streams.req.len() != streams.dir.len() || streams.req.len() != streams.levels.len() {
        return Err(Error::Shape(format!(
            "REQ/DIR lengths differ ({} vs {})",
            streams.req.len(),
            streams.dir.len()
        )));
    }
    let values = streams
        .req
        .iter()
        .zip(&streams.dir)
        .zip(&streams.levels)
        .map(|((&req, &up), &levels)| {
            if !req {
                return 0;
            }
            let magnitude = if config.multi_spike { levels as i32 } else { 1 };
            if up {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    Ok(TernarySpikeTrain { values })
}

/// `sample` followed by `merge_req_dir`.
pub fn encode(signal_mv: &[f64], config: &LcAdcConfig) -> Result<TernarySpikeTrain> {
    merge_req_dir(&sample(signal_mv, config)?, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CompressionStats {
    pub nyquist_points: u64,
    /// Ticks carrying a spike.
    pub spike_points: u64,
    /// Sum of spike magnitudes (equals `spike_points` in single-spike mode).
    pub crossings: u64,
}

impl CompressionStats {
    pub fn normalized_points(&self) -> f64 {
        if self.nyquist_points == 0 {
            return 0.0;
        }
        self.spike_points as f64 / self.nyquist_points as f64
    }

    pub fn reduction(&self) -> f64 {
        1.0 - self.normalized_points()
    }

    /// Pool counts from several signals (corpus-level aggregate).
    pub fn merge(self, other: CompressionStats) -> CompressionStats {
        CompressionStats {
            nyquist_points: self.nyquist_points + other.nyquist_points,
            spike_points: self.spike_points + other.spike_points,
            crossings: self.crossings + other.crossings,
        }
    }
}

pub fn compression_stats(train: &TernarySpikeTrain) -> Result<CompressionStats> {
    if train.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(CompressionStats {
        nyquist_points: train.len() as u64,
        spike_points: train.spike_count() as u64,
        crossings: train
            .values
            .iter()
            .map(|v| u64::from(v.unsigned_abs()))
            .sum(),
    })
}
