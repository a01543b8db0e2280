//! Corpus loading, the dataset manifest and the on-disk spike cache.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ecgspike_core::ingest::corpus::{discover, expected_records, load, RecordSource};
use ecgspike_core::ingest::{
    balance_and_split, segment_beats, AamiClass, BeatClass, EcgRecord, SplitRatio, WindowGeometry,
};
use ecgspike_core::lcadc::io::{from_rle_json, to_rle_json};
use ecgspike_core::lcadc::TernarySpikeTrain;
use ecgspike_core::train::{encode_from_records, EncodedRecord, InputEncoding, Sample, WindowRef};
use ecgspike_core::Error as CoreError;

use crate::config::ExperimentConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub record_id: String,
    pub samples: usize,
    /// Annotation counts per AAMI class, non-beats excluded.
    pub beats: BTreeMap<AamiClass, u64>,
    pub skipped_at_boundary: usize,
}

/// What `ingest` found and the balanced split it drew.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub data_dir: PathBuf,
    pub channel: usize,
    pub window: WindowGeometry,
    pub per_class: usize,
    pub split_ratio: SplitRatio,
    pub seed: u64,
    pub records: Vec<RecordSummary>,
    pub missing_records: Vec<String>,
    pub class_counts: BTreeMap<AamiClass, u64>,
    pub train: Vec<WindowRef>,
    pub test: Vec<WindowRef>,
}

impl Manifest {
    pub fn load(out: &Path) -> Result<Self> {
        let path = out.join(MANIFEST_FILE);
        let value = crate::output::read_json(&path).with_context(|| {
            format!(
                "no dataset manifest; run `ingest` with --out {}",
                out.display()
            )
        })?;
        Ok(serde_json::from_value(value)?)
    }

    pub fn record_ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.record_id.clone()).collect()
    }

    /// Ids of records that contribute at least one split window.
    pub fn split_record_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .train
            .iter()
            .chain(&self.test)
            .map(|w| w.record_id.clone())
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }
}

fn data_dir(config: &ExperimentConfig) -> Result<&Path> {
    config
        .data_dir
        .as_deref()
        .context("no corpus directory; pass --data or set data_dir in the config")
}

/// Sources in the corpus directory plus ids the `RECORDS` list names but
/// the directory lacks.
pub fn scan(dir: &Path) -> Result<(Vec<RecordSource>, Vec<String>)> {
    if !dir.is_dir() {
        bail!("corpus directory {} does not exist", dir.display());
    }
    let sources = discover(dir)?;
    let missing = match expected_records(dir)? {
        Some(expected) => expected
            .into_iter()
            .filter(|id| !sources.iter().any(|s| s.id() == id))
            .collect(),
        None => Vec::new(),
    };
    Ok((sources, missing))
}

pub fn load_records(sources: &[RecordSource]) -> Result<Vec<EcgRecord>> {
    sources
        .par_iter()
        .map(|s| load(s).with_context(|| format!("loading record {}", s.id())))
        .collect()
}

pub fn build_manifest(config: &ExperimentConfig, allow_partial: bool) -> Result<Manifest> {
    let dir = data_dir(config)?;
    let (sources, missing) = scan(dir)?;
    if sources.is_empty() {
        bail!("0 records found in {}", dir.display());
    }
    if !missing.is_empty() {
        if allow_partial {
            log::warn!(
                "{} listed records missing: {}",
                missing.len(),
                missing.join(" ")
            );
        } else {
            bail!(
                "{} listed records missing from {}: {} (pass --allow-partial to continue)",
                missing.len(),
                dir.display(),
                missing.join(" ")
            );
        }
    }
    let records = load_records(&sources)?;
    let mut summaries = Vec::with_capacity(records.len());
    let mut windows = Vec::new();
    let mut class_counts: BTreeMap<AamiClass, u64> = BTreeMap::new();
    for record in &records {
        let mut beats = BTreeMap::new();
        for a in &record.annotations {
            if a.aami_class != AamiClass::NonBeat {
                *beats.entry(a.aami_class).or_insert(0) += 1;
                *class_counts.entry(a.aami_class).or_insert(0) += 1;
            }
        }
        let seg = segment_beats(record, config.window, config.channel)?;
        summaries.push(RecordSummary {
            record_id: record.record_id.clone(),
            samples: record.len(),
            beats,
            skipped_at_boundary: seg.skipped_at_boundary,
        });
        windows.extend(seg.windows);
    }

    let mut per_class = config.per_class;
    let split = match balance_and_split(&windows, per_class, config.split, config.seed) {
        Err(CoreError::InsufficientData {
            class,
            available,
            requested,
        }) if allow_partial => {
            per_class = BeatClass::ALL
                .iter()
                .map(|c| windows.iter().filter(|w| w.label == *c).count())
                .min()
                .unwrap_or(0);
            log::warn!("only {available} {class} windows for {requested} requested; using {per_class} per class");
            balance_and_split(&windows, per_class, config.split, config.seed)?
        }
        other => other?,
    };
    Ok(Manifest {
        data_dir: dir.to_path_buf(),
        channel: config.channel,
        window: config.window,
        per_class,
        split_ratio: config.split,
        seed: config.seed,
        records: summaries,
        missing_records: missing,
        class_counts,
        train: split.train.iter().map(WindowRef::from).collect(),
        test: split.test.iter().map(WindowRef::from).collect(),
    })
}

/// Load and encode the named records, reusing cached spike trains under
/// `cache_dir` when the encoding is level-crossing.
pub fn encode_records(
    manifest: &Manifest,
    ids: &[String],
    encoding: &InputEncoding,
    cache_dir: &Path,
) -> Result<HashMap<String, EncodedRecord>> {
    let (sources, _) = scan(&manifest.data_dir)?;
    let wanted: Vec<&RecordSource> = ids
        .iter()
        .map(|id| {
            sources.iter().find(|s| s.id() == id).with_context(|| {
                format!(
                    "record {id} is no longer in {}",
                    manifest.data_dir.display()
                )
            })
        })
        .collect::<Result<_>>()?;
    wanted
        .par_iter()
        .map(|source| {
            let id = source.id().to_string();
            let encoded = match encoding {
                InputEncoding::LcAdc { config, .. } => {
                    let path = cache_dir.join(format!(
                        "{id}_ch{}_{}.json",
                        manifest.channel,
                        config.tag()
                    ));
                    EncodedRecord::Spikes(cached_train(&path, || {
                        let record = load(source)?;
                        Ok(ecgspike_core::lcadc::encode(
                            &record.channel_mv(manifest.channel),
                            config,
                        )?)
                    })?)
                }
                InputEncoding::Amplitude { .. } => {
                    encoding.encode_record(&load(source)?.channel_mv(manifest.channel))?
                }
            };
            Ok((id, encoded))
        })
        .collect()
}

fn cached_train(
    path: &Path,
    compute: impl FnOnce() -> Result<TernarySpikeTrain>,
) -> Result<TernarySpikeTrain> {
    if let Ok(text) = fs::read_to_string(path) {
        match from_rle_json(&text) {
            Ok(train) => return Ok(train),
            Err(e) => log::warn!("ignoring unreadable cache {}: {e}", path.display()),
        }
    }
    let train = compute()?;
    crate::output::write_text(path, &to_rle_json(&train))?;
    Ok(train)
}

/// Encoded train and test samples for one input encoding.
pub fn samples(
    manifest: &Manifest,
    encoding: &InputEncoding,
    cache_dir: &Path,
) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let records = encode_records(manifest, &manifest.split_record_ids(), encoding, cache_dir)?;
    let train = encode_from_records(&manifest.train, manifest.window, &records, encoding)?;
    let test = encode_from_records(&manifest.test, manifest.window, &records, encoding)?;
    Ok((train, test))
}
