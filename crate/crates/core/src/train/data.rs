//! Turning beat windows into network inputs.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{BeatClass, BeatWindow, WindowGeometry};
use crate::lcadc::{encode, LcAdcConfig, TernarySpikeTrain};

/// How a millivolt window becomes one input frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputEncoding {
    /// Level-crossing spikes, `bin_factor` ticks merged per input position.
    LcAdc {
        config: LcAdcConfig,
        bin_factor: usize,
    },
    /// Mean-removed Nyquist samples, averaged over `bin_factor` ticks.
    Amplitude { bin_factor: usize },
}

impl InputEncoding {
    pub fn bin_factor(&self) -> usize {
        match *self {
            Self::LcAdc { bin_factor, .. } | Self::Amplitude { bin_factor } => bin_factor,
        }
    }

    /// Frame length for a window of `window_len` ticks.
    pub fn input_len(&self, window_len: usize) -> usize {
        window_len.div_ceil(self.bin_factor())
    }

    pub fn tag(&self) -> String {
        match self {
            Self::LcAdc { config, bin_factor } => format!("lcadc_{}_bin{bin_factor}", config.tag()),
            Self::Amplitude { bin_factor } => format!("amplitude_bin{bin_factor}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bin_factor() == 0 {
            return Err(Error::InvalidConfig("bin_factor must be positive".into()));
        }
        if let Self::LcAdc { config, .. } = self {
            config.validate()?;
        }
        Ok(())
    }

    pub fn encode(&self, samples_mv: &[f64]) -> Result<Vec<f32>> {
        if samples_mv.is_empty() {
            return Err(Error::EmptyInput);
        }
        match *self {
            Self::LcAdc { config, bin_factor } => Ok(encode(samples_mv, &config)?
                .binned(bin_factor)
                .values
                .into_iter()
                .map(|v| v as f32)
                .collect()),
            Self::Amplitude { bin_factor } => {
                let mean = samples_mv.iter().sum::<f64>() / samples_mv.len() as f64;
                Ok(samples_mv
                    .chunks(bin_factor)
                    .map(|c| (c.iter().map(|x| x - mean).sum::<f64>() / c.len() as f64) as f32)
                    .collect())
            }
        }
    }
}

/// A whole record in the form beat frames are cut from. The level-crossing
/// converter runs once over the full recording, so a window's first spikes
/// depend on the signal before it.
#[derive(Debug, Clone, PartialEq)]
pub enum EncodedRecord {
    Spikes(TernarySpikeTrain),
    Millivolts(Vec<f64>),
}

impl InputEncoding {
    pub fn encode_record(&self, record_mv: &[f64]) -> Result<EncodedRecord> {
        match self {
            Self::LcAdc { config, .. } => Ok(EncodedRecord::Spikes(encode(record_mv, config)?)),
            Self::Amplitude { .. } => Ok(EncodedRecord::Millivolts(record_mv.to_vec())),
        }
    }

    /// Frame for ticks `[start, start + len)` of an encoded record.
    pub fn frame(&self, record: &EncodedRecord, start: usize, len: usize) -> Result<Vec<f32>> {
        let end = start + len;
        match (self, record) {
            (Self::LcAdc { bin_factor, .. }, EncodedRecord::Spikes(train)) => {
                let slice = train.values.get(start..end).ok_or_else(|| {
                    Error::Shape(format!("window [{start}, {end}) outside record"))
                })?;
                Ok(TernarySpikeTrain {
                    values: slice.to_vec(),
                }
                .binned(*bin_factor)
                .values
                .into_iter()
                .map(|v| v as f32)
                .collect())
            }
            (Self::Amplitude { .. }, EncodedRecord::Millivolts(mv)) => {
                self.encode(mv.get(start..end).ok_or_else(|| {
                    Error::Shape(format!("window [{start}, {end}) outside record"))
                })?)
            }
            _ => Err(Error::InvalidConfig(format!(
                "record was not encoded for {}",
                self.tag()
            ))),
        }
    }
}

/// Location and label of a beat window within a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRef {
    pub record_id: String,
    pub center_index: usize,
    pub label: BeatClass,
}

impl From<&BeatWindow> for WindowRef {
    fn from(w: &BeatWindow) -> Self {
        Self {
            record_id: w.record_id.clone(),
            center_index: w.center_index,
            label: w.label,
        }
    }
}

/// Frames for beat windows cut from whole encoded records, keyed by
/// record id.
pub fn encode_from_records(
    windows: &[WindowRef],
    geometry: WindowGeometry,
    records: &HashMap<String, EncodedRecord>,
    encoding: &InputEncoding,
) -> Result<Vec<Sample>> {
    encoding.validate()?;
    windows
        .par_iter()
        .map(|w| {
            let record = records.get(&w.record_id).ok_or_else(|| {
                Error::InvalidConfig(format!("record {} not encoded", w.record_id))
            })?;
            let start = w.center_index.checked_sub(geometry.pre).ok_or_else(|| {
                Error::Shape(format!(
                    "window at {} starts before the record",
                    w.center_index
                ))
            })?;
            Ok(Sample {
                input: encoding.frame(record, start, geometry.len())?,
                label: w.label.index(),
            })
        })
        .collect()
}

/// One encoded input with its class index.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f32>,
    pub label: usize,
}

pub fn encode_windows(windows: &[BeatWindow], encoding: &InputEncoding) -> Result<Vec<Sample>> {
    encoding.validate()?;
    windows
        .par_iter()
        .map(|w| {
            Ok(Sample {
                input: encoding.encode(&w.samples_mv)?,
                label: w.label.index(),
            })
        })
        .collect()
}
