use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ecgspike_cli::commands::{self, complexity, Run};
use ecgspike_cli::config::{ExperimentConfig, SweepConfig};
use ecgspike_cli::dataset::Manifest;
use ecgspike_cli::output::read_csv;
use ecgspike_core::ingest::corpus::{write_wfdb, RecordSource};
use ecgspike_core::ingest::{ChannelInfo, EcgRecord, MITBIH_ADC_GAIN, MITBIH_ADC_ZERO};
use ecgspike_core::synth::{write_synth_corpus, SynthConfig};
use ecgspike_core::train::{Checkpoint, ModelKind};
use tempfile::TempDir;

fn corpus(records: usize) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        duration_s: 90.0,
        seed: 5,
        ..SynthConfig::default()
    };
    write_synth_corpus(dir.path(), records, &cfg).unwrap();
    dir
}

fn small_config(data: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        data_dir: Some(data.to_path_buf()),
        per_class: 10,
        time_steps: 2,
        ..ExperimentConfig::default()
    };
    cfg.train.epochs = 2;
    cfg.train.batch_size = 8;
    cfg.sweep = SweepConfig {
        bits: vec![5],
        bin_factors: vec![4],
        seeds: vec![0],
        nyquist: false,
        cnn: false,
    };
    cfg.bin_factor = 4;
    cfg
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ecgspike"))
}

fn write_config(dir: &Path, cfg: &ExperimentConfig) -> PathBuf {
    let path = dir.join("experiment.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn run_bin(config: &Path, out: &Path, args: &[&str]) -> std::process::Output {
    bin()
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

/// Every report file under `dir` (the spike cache excluded), relative
/// path and contents.
fn report_files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                if path.file_name().unwrap() != "cache" {
                    stack.push(path);
                }
            } else if matches!(
                path.extension().and_then(|e| e.to_str()),
                Some("csv" | "json" | "md")
            ) {
                out.push((
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn every_command_is_byte_reproducible() {
    let data = corpus(6);
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), &small_config(data.path()));
    let outs = [work.path().join("a"), work.path().join("b")];
    for out in &outs {
        for args in [
            &["ingest"][..],
            &["compress", "--bits", "5,6"],
            &["train"],
            &["train", "--model", "cnn", "--input", "nyquist"],
            &["sweep"],
            &["complexity"],
            &["report"],
        ] {
            let o = run_bin(&config, out, args);
            assert!(
                o.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
        let ckpt = out.join("train/scnn_lcadc_m5_afs10_present_bin4_seed0/best.ckpt");
        let o = run_bin(&config, out, &["eval", ckpt.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (report_files(&outs[0]), report_files(&outs[1]));
    assert!(a.len() > 20, "only {} report files", a.len());
    assert_eq!(a.len(), b.len());
    for ((pa, ca), (pb, cb)) in a.iter().zip(&b) {
        assert_eq!(pa, pb);
        assert!(ca == cb, "{} differs between runs", pa.display());
    }
    for (path, contents) in &a {
        let text = String::from_utf8_lossy(contents);
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => assert!(
                text.starts_with("# tool=ecgspike version="),
                "{}",
                path.display()
            ),
            Some("json") if path.file_name().unwrap() != "config.json" => {
                assert!(text.contains("\"meta\""), "{}", path.display())
            }
            _ => {}
        }
    }
    for a in ["best.ckpt", "last.ckpt"] {
        let name = Path::new("train/cnn_amplitude_bin4_seed0").join(a);
        assert_eq!(
            fs::read(outs[0].join(&name)).unwrap(),
            fs::read(outs[1].join(&name)).unwrap()
        );
    }
}

#[test]
fn eval_agrees_with_training_and_with_itself() {
    let data = corpus(6);
    let out = tempfile::tempdir().unwrap();
    let run = Run::new(small_config(data.path()), out.path());
    commands::ingest::run(&run).unwrap();
    let metrics = commands::train::run(&run, ModelKind::Scnn, false, false).unwrap();
    let dir = commands::train::cell_dir(&run, &metrics.cell);
    let first = commands::train::eval(&run, &dir.join("best.ckpt")).unwrap();
    let second = commands::train::eval(&run, &dir.join("best.ckpt")).unwrap();
    assert_eq!(first, second);
    assert_eq!(first.accuracy, metrics.accuracy);
    assert_eq!(first.confusion, metrics.confusion);
    let trace: u64 = (0..4).map(|i| first.confusion[i][i]).sum();
    assert_eq!(first.accuracy, trace as f64 / first.total() as f64);
    assert_eq!(first.total(), 4 * 2);
}

#[test]
fn resume_matches_uninterrupted_training() {
    let data = corpus(6);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = small_config(data.path());
    cfg.train.epochs = 3;
    let full = Run::new(cfg.clone(), a.path());
    commands::ingest::run(&full).unwrap();
    let straight = commands::train::run(&full, ModelKind::Scnn, false, false).unwrap();

    cfg.train.epochs = 1;
    let mut split = Run::new(cfg, b.path());
    commands::ingest::run(&split).unwrap();
    commands::train::run(&split, ModelKind::Scnn, false, false).unwrap();
    split.config.train.epochs = 3;
    let resumed = commands::train::run(&split, ModelKind::Scnn, false, true).unwrap();
    assert_eq!(straight.accuracy, resumed.accuracy);
    assert_eq!(straight.final_accuracy, resumed.final_accuracy);
    let load = |run: &Run| {
        Checkpoint::load(&commands::train::cell_dir(run, &straight.cell).join("last.ckpt")).unwrap()
    };
    let (x, y) = (load(&full), load(&split));
    assert_eq!(x.network, y.network);
    assert_eq!(x.history, y.history);
}

#[test]
fn single_cell_sweep_equals_train() {
    let data = corpus(6);
    let out = tempfile::tempdir().unwrap();
    let run = Run::new(small_config(data.path()), out.path());
    commands::ingest::run(&run).unwrap();
    let trained = commands::train::run(&run, ModelKind::Scnn, false, false).unwrap();
    let summary = commands::sweep::run(&run).unwrap();
    assert_eq!(summary.cells, 1);
    assert_eq!(summary.failed, 0);
    assert_eq!(summary.groups[0].median_accuracy, trained.accuracy);
    assert_eq!(summary.bins[0].compression_optimal_bits, Some(5));
    let (header, rows) = read_csv(&out.path().join("sweep/sweep.csv")).unwrap();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col("status")], "ok");
    assert_eq!(rows[0][col("accuracy")], format!("{:.6}", trained.accuracy));
}

#[test]
fn failed_sweep_cells_are_reported_and_set_the_exit_code() {
    let data = corpus(6);
    let work = tempfile::tempdir().unwrap();
    let mut cfg = small_config(data.path());
    let spec = ecgspike_core::snn::NetworkSpec::default_for(80, 2);
    let spec_path = work.path().join("net.json");
    fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    cfg.network = Some(spec_path);
    cfg.sweep.bin_factors = vec![4, 2];
    let config = write_config(work.path(), &cfg);
    let out = work.path().join("out");
    assert!(run_bin(&config, &out, &["ingest"]).status.success());
    let o = run_bin(&config, &out, &["sweep"]);
    assert!(!o.status.success());
    let (header, rows) = read_csv(&out.join("sweep/sweep.csv")).unwrap();
    let status = header.iter().position(|h| h == "status").unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][status], "ok");
    assert!(
        rows[1][status].starts_with("failed:"),
        "{}",
        rows[1][status]
    );
}

#[test]
fn ingest_rejects_missing_and_empty_corpora() {
    let empty = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let run = Run::new(small_config(empty.path()), out.path());
    let err = commands::ingest::run(&run).unwrap_err().to_string();
    assert!(err.contains("0 records"), "{err}");

    let data = corpus(6);
    let list = data.path().join("RECORDS");
    let mut ids = fs::read_to_string(&list).unwrap();
    ids.push_str("s099\ns100\n");
    fs::write(&list, ids).unwrap();
    let err = format!(
        "{:#}",
        commands::ingest::run(&Run::new(small_config(data.path()), out.path())).unwrap_err()
    );
    assert!(err.contains("s099") && err.contains("s100"), "{err}");
    let mut partial = Run::new(small_config(data.path()), out.path());
    partial.allow_partial = true;
    let manifest = commands::ingest::run(&partial).unwrap();
    assert_eq!(manifest.missing_records, ["s099", "s100"]);
    assert_eq!(manifest.records.len(), 6);
}

#[test]
fn allow_partial_lowers_per_class_to_what_exists() {
    let data = corpus(2);
    let out = tempfile::tempdir().unwrap();
    let mut cfg = small_config(data.path());
    cfg.per_class = 100_000;
    assert!(commands::ingest::run(&Run::new(cfg.clone(), out.path())).is_err());
    let mut run = Run::new(cfg, out.path());
    run.allow_partial = true;
    let manifest = commands::ingest::run(&run).unwrap();
    assert!(manifest.per_class > 0 && manifest.per_class < 100_000);
    assert_eq!(
        manifest.train.len() + manifest.test.len(),
        4 * manifest.per_class
    );
}

#[test]
fn manifest_is_byte_identical_across_runs() {
    let data = corpus(4);
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), &small_config(data.path()));
    let (a, b) = (work.path().join("a"), work.path().join("b"));
    assert!(run_bin(&config, &a, &["ingest"]).status.success());
    assert!(run_bin(&config, &b, &["ingest"]).status.success());
    assert!(run_bin(&config, &b, &["ingest"]).status.success());
    assert_eq!(
        fs::read(a.join("manifest.json")).unwrap(),
        fs::read(b.join("manifest.json")).unwrap()
    );
}

fn constant_record(id: &str, len: usize) -> EcgRecord {
    let info = ChannelInfo {
        description: "MLII".into(),
        gain: MITBIH_ADC_GAIN,
        zero: MITBIH_ADC_ZERO,
    };
    EcgRecord {
        record_id: id.into(),
        sampling_rate_hz: 360,
        adc_resolution_bits: 11,
        channel_info: [info.clone(), info],
        channels: [vec![1100; len], vec![1100; len]],
        annotations: Vec::new(),
    }
}

#[test]
fn compression_reaches_the_limits() {
    let data = corpus(3);
    write_wfdb(&constant_record("flat", 5000), data.path()).unwrap();
    fs::remove_file(data.path().join("RECORDS")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let mut run = Run::new(small_config(data.path()), out.path());
    run.allow_partial = true;
    commands::ingest::run(&run).unwrap();
    run.bits = Some(vec![11]);
    commands::compress::run(&run).unwrap();

    let (header, rows) = read_csv(&out.path().join("compress/compression.csv")).unwrap();
    assert_eq!(
        header,
        [
            "record_id",
            "M",
            "nyquist_points",
            "spike_points",
            "reduction"
        ]
    );
    let flat = rows.iter().find(|r| r[0] == "flat").unwrap();
    assert_eq!(flat[3], "0");
    assert_eq!(flat[4], "1.000000");

    // With the LSB below one ADC count, exactly the ticks whose count
    // changes carry a spike.
    for row in rows.iter().filter(|r| r[0].starts_with('s')) {
        let record = ecgspike_core::ingest::corpus::load(&RecordSource::Wfdb {
            dir: data.path().to_path_buf(),
            id: row[0].clone(),
        })
        .unwrap();
        let changes = record.channels[0]
            .windows(2)
            .filter(|w| w[0] != w[1])
            .count();
        assert_eq!(row[3], changes.to_string());
        assert!(row[4].parse::<f64>().unwrap() < 0.2);
    }
}

#[test]
fn compression_falls_with_resolution() {
    let data = corpus(4);
    let out = tempfile::tempdir().unwrap();
    let mut run = Run::new(small_config(data.path()), out.path());
    commands::ingest::run(&run).unwrap();
    run.bits = Some(vec![4, 5, 6, 7, 8]);
    let report = commands::compress::run(&run).unwrap();
    let reductions: Vec<f64> = report.resolutions.iter().map(|r| r.reduction).collect();
    assert!(reductions.windows(2).all(|w| w[0] > w[1]), "{reductions:?}");

    let manifest = Manifest::load(out.path()).unwrap();
    let windows = (manifest.train.len() + manifest.test.len()) as u64;
    let len = manifest.window.len();
    for r in &report.resolutions {
        let beats = r.segments.unwrap();
        assert_eq!(beats.nyquist_points, windows * len as u64);
        let sources: std::collections::HashMap<String, Vec<f64>> = manifest
            .record_ids()
            .into_iter()
            .map(|id| {
                let record = ecgspike_core::ingest::corpus::load(&RecordSource::Wfdb {
                    dir: data.path().to_path_buf(),
                    id: id.clone(),
                })
                .unwrap();
                (id, record.channel_mv(manifest.channel))
            })
            .collect();
        let cfg = run.config.lcadc_encoding(r.resolution_bits, 1);
        let ecgspike_core::train::InputEncoding::LcAdc { config, .. } = cfg else {
            unreachable!()
        };
        let spikes: u64 = manifest
            .train
            .iter()
            .chain(&manifest.test)
            .map(|w| {
                let train = ecgspike_core::lcadc::encode(&sources[&w.record_id], &config).unwrap();
                let start = w.center_index - manifest.window.pre;
                train.values[start..start + len]
                    .iter()
                    .filter(|&&v| v != 0)
                    .count() as u64
            })
            .sum();
        assert_eq!(beats.spike_points, spikes);
    }
}

#[test]
fn complexity_csv_round_trips() {
    let out = tempfile::tempdir().unwrap();
    let run = Run::new(ExperimentConfig::default(), out.path());
    let report = complexity::run(&run).unwrap();
    let (header, rows) = read_csv(&out.path().join("complexity/complexity.csv")).unwrap();
    assert_eq!(header, complexity::CSV_HEADER);
    assert_eq!(rows.len(), report.rows.len());
    for (row, mem) in rows.iter().zip(&report.rows) {
        assert_eq!(*row, complexity::csv_row(mem));
        assert_eq!(row[6].parse::<u64>().unwrap(), mem.tc_cnn);
        assert_eq!(row[7].parse::<u64>().unwrap(), mem.tc_scnn);
        let reduction: f64 = row[8].parse().unwrap();
        assert!((reduction - mem.reduction).abs() < 1e-9);
    }
}

#[test]
fn report_lists_missing_sections() {
    let out = tempfile::tempdir().unwrap();
    let md = commands::report::run(&Run::new(ExperimentConfig::default(), out.path())).unwrap();
    assert!(md.contains("run `compress`"));
    assert!(md.contains("run `sweep`"));
}

#[test]
fn config_is_archived_verbatim() {
    let out = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        seed: 11,
        complexity_time_steps: vec![3],
        ..ExperimentConfig::default()
    };
    complexity::run(&Run::new(cfg.clone(), out.path())).unwrap();
    let archived = ExperimentConfig::load(&out.path().join("complexity/config.json")).unwrap();
    assert_eq!(archived, cfg);
}
