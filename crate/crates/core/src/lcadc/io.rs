//! Spike-train and compression-report serialization.
//!
//! Run-length JSON keeps only the non-zero ticks:
//!
//! ```json
//! {"length": 5, "events": [{"index": 2, "sign": 1}, {"index": 4, "sign": -1}]}
//! ```
//!
//! `sign` carries the full signed value, so multi-spike magnitudes survive.
//! Dense CSV is one value per line with a `value` header.

use serde::{Deserialize, Serialize};

use super::{CompressionStats, TernarySpikeTrain};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeEvent {
    pub index: usize,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLengthTrain {
    pub length: usize,
    pub events: Vec<SpikeEvent>,
}

impl From<&TernarySpikeTrain> for RunLengthTrain {
    fn from(train: &TernarySpikeTrain) -> Self {
        Self {
            length: train.len(),
            events: train
                .values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(index, &sign)| SpikeEvent { index, sign })
                .collect(),
        }
    }
}

impl RunLengthTrain {
    pub fn to_train(&self) -> Result<TernarySpikeTrain> {
        let mut values = vec![0; self.length];
        let mut last = None;
        for e in &self.events {
            if e.index >= self.length || e.sign == 0 || last.is_some_and(|l| e.index <= l) {
                return Err(Error::parse(format!(
                    "spike event {e:?} invalid for length {} (indices must be increasing, signs non-zero)",
                    self.length
                )));
            }
            values[e.index] = e.sign;
            last = Some(e.index);
        }
        Ok(TernarySpikeTrain { values })
    }
}

pub fn to_rle_json(train: &TernarySpikeTrain) -> String {
    serde_json::to_string(&RunLengthTrain::from(train)).expect("plain struct serializes")
}

pub fn from_rle_json(text: &str) -> Result<TernarySpikeTrain> {
    serde_json::from_str::<RunLengthTrain>(text)?.to_train()
}

pub fn to_dense_csv(train: &TernarySpikeTrain) -> String {
    let mut out = String::with_capacity(train.len() * 3 + 6);
    out.push_str("value\n");
    for v in &train.values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn from_dense_csv(text: &str) -> Result<TernarySpikeTrain> {
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && *l != "value")
        .map(|l| {
            l.parse()
                .map_err(|_| Error::parse(format!("bad spike value {l:?}")))
        })
        .collect::<Result<_>>()?;
    Ok(TernarySpikeTrain { values })
}

pub const COMPRESSION_CSV_HEADER: &str = "record_id,M,nyquist_points,spike_points,reduction";

pub fn compression_csv_row(
    record_id: &str,
    resolution_bits: u32,
    stats: &CompressionStats,
) -> String {
    format!(
        "{record_id},{resolution_bits},{},{},{:.6}",
        stats.nyquist_points,
        stats.spike_points,
        stats.reduction()
    )
}
