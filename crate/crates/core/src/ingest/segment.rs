use serde::{Deserialize, Serialize};

use super::{BeatWindow, EcgRecord};
use crate::error::{Error, Result};

/// Samples kept before and after each annotated beat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowGeometry {
    pub pre: usize,
    pub post: usize,
}

impl WindowGeometry {
    pub fn len(&self) -> usize {
        self.pre + self.post
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for WindowGeometry {
    fn default() -> Self {
        Self {
            pre: 128,
            post: 192,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Segmented {
    pub windows: Vec<BeatWindow>,
    /// N/SVEB/VEB/F beats dropped because their window left the record.
    pub skipped_at_boundary: usize,
}

/// Cut one window per N/SVEB/VEB/F annotation. Window `i` covers
/// `[center - pre, center + post)`; windows that do not fit are counted
/// and dropped.
pub fn segment_beats(
    record: &EcgRecord,
    window: WindowGeometry,
    channel: usize,
) -> Result<Segmented> {
    if channel > 1 {
        return Err(Error::InvalidConfig(format!(
            "channel {channel} (expected 0 or 1)"
        )));
    }
    if window.is_empty() {
        return Err(Error::InvalidConfig("zero-length beat window".into()));
    }
    let info = &record.channel_info[channel];
    let samples = &record.channels[channel];
    let mut out = Segmented::default();

    for ann in &record.annotations {
        let Some(label) = ann.aami_class.beat_class() else {
            continue;
        };
        let center = ann.sample_index;
        let (Some(start), end) = (center.checked_sub(window.pre), center + window.post) else {
            out.skipped_at_boundary += 1;
            continue;
        };
        if end > samples.len() {
            out.skipped_at_boundary += 1;
            continue;
        }
        out.windows.push(BeatWindow {
            record_id: record.record_id.clone(),
            center_index: center,
            samples_mv: samples[start..end].iter().map(|&c| info.to_mv(c)).collect(),
            label,
        });
    }
    Ok(out)
}
