use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use ecgspike_core::lcadc::{compression_stats, CompressionStats, TernarySpikeTrain};
use ecgspike_core::train::EncodedRecord;

use super::Run;
use crate::dataset::{encode_records, Manifest};
use crate::output::{self, fmt};

/// Corpus-level result for one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionSummary {
    pub resolution_bits: u32,
    /// Pooled over all records.
    pub aggregate: CompressionStats,
    pub reduction: f64,
    /// Unweighted mean of per-record reductions.
    pub mean_record_reduction: f64,
    /// Pooled over the beat windows of both splits, each cut from its
    /// record-level spike train.
    pub segments: Option<CompressionStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub channel: usize,
    pub a_fs_mv: f64,
    pub records: usize,
    pub resolutions: Vec<ResolutionSummary>,
}

/// Per-record statistics for one resolution, in manifest record order.
pub fn record_stats(
    run: &Run,
    manifest: &Manifest,
    bits: u32,
) -> Result<Vec<(String, CompressionStats)>> {
    let encoding = run.config.lcadc_encoding(bits, 1);
    let ids = manifest.record_ids();
    let encoded = encode_records(manifest, &ids, &encoding, &run.cache_dir())?;
    ids.into_iter()
        .map(|id| match &encoded[&id] {
            EncodedRecord::Spikes(train) => Ok((id.clone(), compression_stats(train)?)),
            EncodedRecord::Millivolts(_) => bail!("record {id} was not spike encoded"),
        })
        .collect()
}

pub fn summarize(bits: u32, stats: &[(String, CompressionStats)]) -> ResolutionSummary {
    let aggregate = stats
        .iter()
        .fold(CompressionStats::default(), |acc, (_, s)| acc.merge(*s));
    let mean_record_reduction =
        stats.iter().map(|(_, s)| s.reduction()).sum::<f64>() / stats.len().max(1) as f64;
    ResolutionSummary {
        resolution_bits: bits,
        aggregate,
        reduction: aggregate.reduction(),
        mean_record_reduction,
        segments: None,
    }
}

/// Statistics pooled over every beat window of the manifest.
pub fn segment_stats(run: &Run, manifest: &Manifest, bits: u32) -> Result<CompressionStats> {
    let encoding = run.config.lcadc_encoding(bits, 1);
    let encoded = encode_records(
        manifest,
        &manifest.split_record_ids(),
        &encoding,
        &run.cache_dir(),
    )?;
    let len = manifest.window.len();
    let mut pooled = CompressionStats::default();
    for w in manifest.train.iter().chain(&manifest.test) {
        let EncodedRecord::Spikes(train) = &encoded[&w.record_id] else {
            bail!("record {} was not spike encoded", w.record_id);
        };
        let start = w.center_index - manifest.window.pre;
        let slice = TernarySpikeTrain {
            values: train.values[start..start + len].to_vec(),
        };
        pooled = pooled.merge(compression_stats(&slice)?);
    }
    Ok(pooled)
}

pub fn run(run: &Run) -> Result<CompressionReport> {
    let manifest = Manifest::load(&run.out)?;
    let dir = run.dir("compress");
    let meta = run.meta(
        "compress",
        format!(
            "lcadc;channel={};a_fs_mv={};units=fraction_of_nyquist_points",
            manifest.channel, run.config.lcadc.a_fs_mv
        ),
    );
    let mut rows = Vec::new();
    let mut resolutions = Vec::new();
    for bits in run.sweep_bits() {
        let stats = record_stats(run, &manifest, bits)?;
        for (id, s) in &stats {
            rows.push(stat_row(id, bits, s));
        }
        let mut summary = summarize(bits, &stats);
        rows.push(stat_row("ALL", bits, &summary.aggregate));
        let segments = segment_stats(run, &manifest, bits)?;
        rows.push(stat_row("BEATS", bits, &segments));
        summary.segments = Some(segments);
        log::info!("M={bits}: reduction {:.2}%", 100.0 * summary.reduction);
        resolutions.push(summary);
    }
    output::write_csv(
        &dir.join("compression.csv"),
        &meta,
        &[
            "record_id",
            "M",
            "nyquist_points",
            "spike_points",
            "reduction",
        ],
        rows,
    )?;
    output::write_csv(
        &dir.join("reduction_vs_bits.csv"),
        &meta,
        &["M", "reduction_pct", "beat_window_reduction_pct"],
        resolutions.iter().map(|r| {
            vec![
                r.resolution_bits.to_string(),
                fmt(100.0 * r.reduction),
                r.segments
                    .map_or_else(String::new, |s| fmt(100.0 * s.reduction())),
            ]
        }),
    )?;
    let report = CompressionReport {
        channel: manifest.channel,
        a_fs_mv: run.config.lcadc.a_fs_mv,
        records: manifest.records.len(),
        resolutions,
    };
    output::write_json(&dir.join("summary.json"), &meta, &report)?;
    run.archive_config(&dir)?;
    Ok(report)
}

fn stat_row(id: &str, bits: u32, s: &CompressionStats) -> Vec<String> {
    vec![
        id.to_string(),
        bits.to_string(),
        s.nyquist_points.to_string(),
        s.spike_points.to_string(),
        fmt(s.reduction()),
    ]
}
