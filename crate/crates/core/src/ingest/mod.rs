//! MIT-BIH ingestion: WFDB readers, AAMI labelling, beat windows and the
//! balanced train/test split.

mod aami;
pub mod annotation;
pub mod corpus;
pub mod csv;
mod segment;
mod split;
pub mod wfdb;

use serde::{Deserialize, Serialize};

pub use aami::{map_to_aami, AamiClass, BeatClass};
pub use annotation::parse_annotations;
pub use segment::{segment_beats, Segmented, WindowGeometry};
pub use split::{balance_and_split, DatasetSplit, SplitRatio};
pub use wfdb::parse_wfdb_212;

use crate::error::{Error, Result};

pub const MITBIH_SAMPLING_RATE_HZ: u32 = 360;
pub const MITBIH_ADC_RESOLUTION_BITS: u32 = 11;
pub const MITBIH_ADC_GAIN: f64 = 200.0;
pub const MITBIH_ADC_ZERO: i32 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatAnnotation {
    pub sample_index: usize,
    pub symbol: char,
    pub aami_class: AamiClass,
}

impl BeatAnnotation {
    pub fn new(sample_index: usize, symbol: char) -> Self {
        Self {
            sample_index,
            symbol,
            aami_class: map_to_aami(symbol),
        }
    }
}

/// Per-channel calibration from the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInfo {
    pub description: String,
    /// ADC counts per millivolt.
    pub gain: f64,
    pub zero: i32,
}

impl ChannelInfo {
    pub fn to_mv(&self, count: i16) -> f64 {
        (f64::from(count) - f64::from(self.zero)) / self.gain
    }
}

/// A two-channel digitized recording.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    pub record_id: String,
    pub sampling_rate_hz: u32,
    pub adc_resolution_bits: u32,
    pub channel_info: [ChannelInfo; 2],
    pub channels: [Vec<i16>; 2],
    pub annotations: Vec<BeatAnnotation>,
}

impl EcgRecord {
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels[0].len() != self.channels[1].len() {
            return Err(Error::Shape(format!(
                "record {}: channel lengths differ ({} vs {})",
                self.record_id,
                self.channels[0].len(),
                self.channels[1].len()
            )));
        }
        if let Some(a) = self
            .annotations
            .iter()
            .find(|a| a.sample_index >= self.len())
        {
            return Err(Error::Shape(format!(
                "record {}: annotation at {} outside [0, {})",
                self.record_id,
                a.sample_index,
                self.len()
            )));
        }
        for info in &self.channel_info {
            if !(info.gain > 0.0) {
                return Err(Error::parse(format!(
                    "record {}: non-positive gain {}",
                    self.record_id, info.gain
                )));
            }
        }
        Ok(())
    }

    pub fn has_mitbih_geometry(&self) -> bool {
        self.sampling_rate_hz == MITBIH_SAMPLING_RATE_HZ
            && self.adc_resolution_bits == MITBIH_ADC_RESOLUTION_BITS
    }

    /// Whole channel converted to millivolts.
    pub fn channel_mv(&self, channel: usize) -> Vec<f64> {
        let info = &self.channel_info[channel];
        self.channels[channel]
            .iter()
            .map(|&c| info.to_mv(c))
            .collect()
    }
}

/// A fixed-length beat-centred excerpt in millivolts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatWindow {
    pub record_id: String,
    pub center_index: usize,
    pub samples_mv: Vec<f64>,
    pub label: BeatClass,
}
