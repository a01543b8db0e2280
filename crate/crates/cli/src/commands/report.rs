use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use serde::de::DeserializeOwned;

use ecgspike_core::train::ModelKind;

use super::complexity::{ComplexityReport, TARGET_REDUCTION, TARGET_TOLERANCE};
use super::compress::CompressionReport;
use super::sweep::SweepSummary;
use super::{train_label, Run};
use crate::output::{self, fmt};

/// Corpus reductions the compression figure is compared against.
pub const REFERENCE_REDUCTIONS: [(u32, f64); 3] = [(5, 0.8864), (6, 0.7568), (7, 0.5102)];

fn load<T: DeserializeOwned>(path: &Path) -> Option<T> {
    let value = output::read_json(path).ok()?;
    match serde_json::from_value(value) {
        Ok(v) => Some(v),
        Err(e) => {
            log::warn!("ignoring {}: {e}", path.display());
            None
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn opt_pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), pct)
}

pub fn run(run: &Run) -> Result<String> {
    let compress: Option<CompressionReport> = load(&run.dir("compress").join("summary.json"));
    let sweep: Option<SweepSummary> = load(&run.dir("sweep").join("summary.json"));
    let complexity: Option<ComplexityReport> = load(&run.dir("complexity").join("summary.json"));
    let dir = run.dir("report");
    let meta = run.meta("report", "units=percent");
    let mut md = String::from("# ecgspike report\n\n");

    md.push_str("## Compression\n\n");
    match &compress {
        Some(c) => {
            writeln!(
                md,
                "{} records, channel {}, full scale {} mV. Reduction of data points relative to uniform sampling:\n",
                c.records, c.channel, c.a_fs_mv
            )?;
            md.push_str(
                "| M | reduction % | mean per record % | beat windows % | reference % |\n|---|---|---|---|---|\n",
            );
            let reference = |m: u32| REFERENCE_REDUCTIONS.iter().find(|r| r.0 == m).map(|r| r.1);
            for r in &c.resolutions {
                writeln!(
                    md,
                    "| {} | {} | {} | {} | {} |",
                    r.resolution_bits,
                    pct(r.reduction),
                    pct(r.mean_record_reduction),
                    opt_pct(r.segments.map(|s| s.reduction())),
                    opt_pct(reference(r.resolution_bits))
                )?;
            }
            output::write_csv(
                &dir.join("reduction_vs_bits.csv"),
                &meta,
                &["M", "reduction_pct", "reference_pct"],
                c.resolutions.iter().map(|r| {
                    vec![
                        r.resolution_bits.to_string(),
                        pct(r.reduction),
                        reference(r.resolution_bits).map_or_else(String::new, pct),
                    ]
                }),
            )?;
        }
        None => md.push_str("Not available; run `compress`.\n"),
    }

    md.push_str("\n## Detection accuracy\n\n");
    match &sweep {
        Some(s) => {
            writeln!(
                md,
                "{} cells, {} failed. T = {}; {}.\nAccuracy is the best-epoch test accuracy, median over seeds.\n",
                s.cells,
                s.failed,
                s.time_steps,
                train_label(&s.train_config).replace(';', ", ")
            )?;
            md.push_str(
                "| model | input | M | bin | seeds | accuracy % |\n|---|---|---|---|---|---|\n",
            );
            let model = |m: ModelKind| if m == ModelKind::Cnn { "cnn" } else { "scnn" };
            for g in &s.groups {
                writeln!(
                    md,
                    "| {} | {} | {} | {} | {} | {} |",
                    model(g.model),
                    g.input,
                    g.resolution_bits
                        .map_or_else(|| "-".into(), |b| b.to_string()),
                    g.bin_factor,
                    g.seeds,
                    pct(g.median_accuracy)
                )?;
            }
            md.push('\n');
            for b in &s.bins {
                writeln!(
                    md,
                    "Bin factor {}: LC-ADC band across M {} pp, LC-ADC mean {} %, Nyquist SCNN {} %, CNN {} % (gap {} pp), compression-optimal M {}.",
                    b.bin_factor,
                    opt_pct(b.lcadc_band),
                    opt_pct(b.lcadc_mean),
                    opt_pct(b.nyquist_median),
                    opt_pct(b.cnn_median),
                    opt_pct(b.cnn_gap),
                    b.compression_optimal_bits.map_or_else(|| "n/a".into(), |m| m.to_string())
                )?;
            }
            output::write_csv(
                &dir.join("accuracy_by_model.csv"),
                &meta,
                &["model", "input", "M", "bin_factor", "accuracy_pct"],
                s.groups.iter().map(|g| {
                    vec![
                        model(g.model).to_string(),
                        g.input.clone(),
                        g.resolution_bits
                            .map_or_else(String::new, |b| b.to_string()),
                        g.bin_factor.to_string(),
                        pct(g.median_accuracy),
                    ]
                }),
            )?;
            output::write_csv(
                &dir.join("accuracy_vs_bits.csv"),
                &meta,
                &["M", "bin_factor", "reduction_pct", "scnn_accuracy_pct"],
                s.groups
                    .iter()
                    .filter(|g| g.model == ModelKind::Scnn && g.input == "lcadc")
                    .map(|g| {
                        vec![
                            g.resolution_bits
                                .map_or_else(String::new, |b| b.to_string()),
                            g.bin_factor.to_string(),
                            g.reduction.map_or_else(String::new, pct),
                            pct(g.median_accuracy),
                        ]
                    }),
            )?;
        }
        None => md.push_str("Not available; run `sweep`.\n"),
    }

    md.push_str("\n## Computation complexity\n\n");
    match &complexity {
        Some(c) => {
            writeln!(
                md,
                "Default network at input length {}; CNN dataflow 32 bit, SCNN 1 bit.\n",
                c.input_len
            )?;
            md.push_str("| mode | t | TC_CNN | TC_SCNN | reduction % |\n|---|---|---|---|---|\n");
            for r in &c.rows {
                writeln!(
                    md,
                    "| {} | {} | {} | {} | {} |",
                    r.mode,
                    r.t,
                    r.tc_cnn,
                    r.tc_scnn,
                    pct(r.reduction)
                )?;
            }
            let hits: Vec<String> = c
                .within_target
                .iter()
                .map(|(m, t)| format!("{m} at t={t}"))
                .collect();
            writeln!(
                md,
                "\nWithin {} ± {} pp: {}.",
                pct(TARGET_REDUCTION),
                pct(TARGET_TOLERANCE),
                if hits.is_empty() {
                    "none".into()
                } else {
                    hits.join(", ")
                }
            )?;
            output::write_csv(
                &dir.join("relative_cycles.csv"),
                &meta,
                &["mode", "t", "cnn", "scnn"],
                c.rows.iter().map(|r| {
                    vec![
                        r.mode.clone(),
                        r.t.to_string(),
                        fmt(1.0),
                        fmt(r.tc_scnn as f64 / r.tc_cnn as f64),
                    ]
                }),
            )?;
        }
        None => md.push_str("Not available; run `complexity`.\n"),
    }

    output::write_text(&dir.join("report.md"), &md)?;
    run.archive_config(&dir)?;
    Ok(md)
}
