use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use ecgspike_core::ingest::BeatClass;
use ecgspike_core::snn::Network;
use ecgspike_core::train::{
    self, encode_from_records, evaluate, Checkpoint, Evaluation, InputEncoding, ModelKind,
    TrainConfig, TrainData, TrainOutcome, TRAINING_LOG_HEADER,
};

use super::{train_label, Run};
use crate::dataset::{encode_records, samples, Manifest};
use crate::output::{self, fmt, Meta};

/// One trained configuration: model, input encoding and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub model: ModelKind,
    pub encoding: InputEncoding,
    pub seed: u64,
}

impl Cell {
    pub fn name(&self) -> String {
        let model = match self.model {
            ModelKind::Scnn => "scnn",
            ModelKind::Cnn => "cnn",
        };
        format!("{model}_{}_seed{}", self.encoding.tag(), self.seed)
    }

    pub fn input_label(&self) -> &'static str {
        match self.encoding {
            InputEncoding::LcAdc { .. } => "lcadc",
            InputEncoding::Amplitude { .. } => "nyquist",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub cell: Cell,
    pub time_steps: usize,
    pub train_config: TrainConfig,
    pub epochs: usize,
    /// Epoch whose network scored highest on the test split.
    pub best_epoch: usize,
    /// Test accuracy of the best checkpoint.
    pub accuracy: f64,
    pub final_accuracy: f64,
    pub confusion: Vec<Vec<u64>>,
    pub final_firing_rates: Vec<f64>,
}

fn metrics_meta(run: &Run, command: &str, cell: &Cell, config: &TrainConfig) -> Meta {
    Meta::new(
        command,
        cell.seed,
        format!(
            "{};T={};{}",
            cell.name(),
            run.config.time_steps,
            train_label(config)
        ),
    )
}

fn write_evaluation(dir: &Path, meta: &Meta, evaluation: &Evaluation) -> Result<()> {
    let header: Vec<String> = std::iter::once("true_class".to_string())
        .chain(BeatClass::ALL.iter().map(|c| format!("pred_{c}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = BeatClass::ALL
        .iter()
        .zip(&evaluation.confusion)
        .map(|(c, row)| {
            std::iter::once(c.to_string())
                .chain(row.iter().map(u64::to_string))
                .collect::<Vec<_>>()
        });
    output::write_csv(&dir.join("confusion.csv"), meta, &header, rows)
}

/// Train one cell into `<out>/train/<cell name>/` and report its metrics.
pub fn run_cell(run: &Run, manifest: &Manifest, cell: &Cell, resume: bool) -> Result<CellMetrics> {
    let dir = run.dir("train").join(cell.name());
    let config = TrainConfig {
        seed: cell.seed,
        ..run.config.train.clone()
    };
    let (train_set, test_set) = samples(manifest, &cell.encoding, &run.cache_dir())
        .with_context(|| format!("encoding data for {}", cell.name()))?;
    let data = TrainData {
        train: &train_set,
        test: &test_set,
    };
    let mut on_epoch = |_: &train::EpochLog| {};
    let outcome = if resume && dir.join("last.ckpt").exists() {
        let state = TrainOutcome {
            best: Checkpoint::load(&dir.join("best.ckpt"))?,
            last: Checkpoint::load(&dir.join("last.ckpt"))?,
        };
        log::info!("{}: resuming after epoch {}", cell.name(), state.last.epoch);
        train::resume(state, data, &config, &mut on_epoch)
    } else {
        let spec = run
            .config
            .network_spec(cell.encoding.input_len(manifest.window.len()))?;
        let net = Network::init(spec, cell.seed)?;
        log::info!(
            "{}: {} train / {} test samples, {} parameters",
            cell.name(),
            train_set.len(),
            test_set.len(),
            net.spec.num_params()
        );
        train::train(
            cell.model,
            net,
            data,
            &config,
            Some(cell.encoding),
            &mut on_epoch,
        )
    }
    .with_context(|| format!("training {}", cell.name()))?;

    let evaluation = evaluate(cell.model, &outcome.best.network, &test_set)?;
    let last = outcome.last.history.last();
    let metrics = CellMetrics {
        cell: cell.clone(),
        time_steps: outcome.best.network.spec.time_steps,
        train_config: config.clone(),
        epochs: outcome.last.epoch,
        best_epoch: outcome.best.epoch,
        accuracy: evaluation.accuracy,
        final_accuracy: last.map_or(0.0, |h| h.test_acc),
        confusion: evaluation.confusion.clone(),
        final_firing_rates: last.map_or_else(Vec::new, |h| h.firing_rates.clone()),
    };

    let meta = metrics_meta(run, "train", cell, &config);
    output::create_dir(&dir)?;
    outcome.best.save(&dir.join("best.ckpt"))?;
    outcome.last.save(&dir.join("last.ckpt"))?;
    let log_body = outcome.last.training_log_csv();
    output::write_text(
        &dir.join("training_log.csv"),
        &(meta.csv_comment() + &log_body),
    )?;
    debug_assert!(log_body.starts_with(TRAINING_LOG_HEADER));
    write_evaluation(&dir, &meta, &evaluation)?;
    output::write_json(&dir.join("metrics.json"), &meta, &metrics)?;
    run.archive_config(&dir)?;
    log::info!(
        "{}: best test accuracy {:.4} at epoch {}, final {:.4}",
        cell.name(),
        metrics.accuracy,
        metrics.best_epoch,
        metrics.final_accuracy
    );
    Ok(metrics)
}

/// The cell `train` runs for the given model and input choice.
pub fn single_cell(run: &Run, model: ModelKind, nyquist: bool) -> Cell {
    let bin_factor = run.train_bin();
    Cell {
        model,
        encoding: if nyquist {
            InputEncoding::Amplitude { bin_factor }
        } else {
            run.config.lcadc_encoding(run.train_bits(), bin_factor)
        },
        seed: run.config.seed,
    }
}

pub fn run(run: &Run, model: ModelKind, nyquist: bool, resume: bool) -> Result<CellMetrics> {
    let manifest = Manifest::load(&run.out)?;
    run_cell(run, &manifest, &single_cell(run, model, nyquist), resume)
}

/// Evaluate a saved checkpoint on the test split into
/// `<out>/eval/<run>_<checkpoint>/`.
pub fn eval(run: &Run, checkpoint_path: &Path) -> Result<Evaluation> {
    let manifest = Manifest::load(&run.out)?;
    let checkpoint = Checkpoint::load(checkpoint_path)?;
    let encoding = checkpoint
        .encoding
        .context("checkpoint does not record its input encoding")?;
    let ids: Vec<String> = {
        let mut ids: Vec<String> = manifest.test.iter().map(|w| w.record_id.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    };
    let records = encode_records(&manifest, &ids, &encoding, &run.cache_dir())?;
    let test_set = encode_from_records(&manifest.test, manifest.window, &records, &encoding)?;
    let evaluation = evaluate(checkpoint.kind, &checkpoint.network, &test_set)?;

    let name = eval_name(checkpoint_path);
    let dir = run.dir("eval").join(&name);
    let meta = Meta::new(
        "eval",
        checkpoint.config.seed,
        format!(
            "{name};{};{}",
            encoding.tag(),
            train_label(&checkpoint.config)
        ),
    );
    write_evaluation(&dir, &meta, &evaluation)?;
    output::write_json(
        &dir.join("metrics.json"),
        &meta,
        &serde_json::json!({
            "checkpoint_epoch": checkpoint.epoch,
            "model": checkpoint.kind,
            "encoding": encoding,
            "test_samples": evaluation.total(),
            "accuracy": evaluation.accuracy,
            "confusion": evaluation.confusion,
        }),
    )?;
    log::info!(
        "{name}: accuracy {} on {} samples",
        fmt(evaluation.accuracy),
        evaluation.total()
    );
    Ok(evaluation)
}

fn eval_name(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map_or("checkpoint".into(), |s| s.to_string_lossy().into_owned());
    match path.parent().and_then(Path::file_name) {
        Some(parent) => format!("{}_{stem}", parent.to_string_lossy()),
        None => stem,
    }
}

pub fn cell_dir(run: &Run, cell: &Cell) -> PathBuf {
    run.dir("train").join(cell.name())
}
