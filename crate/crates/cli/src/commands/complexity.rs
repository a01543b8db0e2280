use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use ecgspike_core::complexity::{interpretation_table, ConvDims, FcDims, InterpretationRow};

use super::Run;
use crate::output::{self, fmt};

/// Reduction the interpretation table is checked against, with tolerance.
pub const TARGET_REDUCTION: f64 = 0.968;
pub const TARGET_TOLERANCE: f64 = 0.02;

pub const CSV_HEADER: [&str; 9] = [
    "mode",
    "cnn_ops",
    "scnn_ops",
    "t",
    "cnn_bit",
    "scnn_bit",
    "tc_cnn",
    "tc_scnn",
    "reduction",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub input_len: usize,
    pub conv_layers: Vec<ConvDims>,
    pub fc_layers: Vec<FcDims>,
    pub rows: Vec<InterpretationRow>,
    /// `(mode, t)` pairs whose reduction lies within the target band.
    pub within_target: Vec<(String, u64)>,
}

pub fn csv_row(row: &InterpretationRow) -> Vec<String> {
    vec![
        row.mode.clone(),
        row.cnn_ops.label(),
        row.scnn_ops.label(),
        row.t.to_string(),
        row.cnn_bit.to_string(),
        row.scnn_bit.to_string(),
        row.tc_cnn.to_string(),
        row.tc_scnn.to_string(),
        format!("{:.9}", row.reduction),
    ]
}

pub fn run(run: &Run) -> Result<ComplexityReport> {
    let encoding = run.config.lcadc_encoding(run.train_bits(), run.train_bin());
    let input_len = encoding.input_len(run.config.window.len());
    let spec = run.config.network_spec(input_len)?;
    let (conv_layers, fc_layers) = spec.complexity_dims()?;
    let rows = interpretation_table(&conv_layers, &fc_layers, &run.config.complexity_time_steps)
        .context("evaluating the complexity model")?;
    let within_target = rows
        .iter()
        .filter(|r| (r.reduction - TARGET_REDUCTION).abs() <= TARGET_TOLERANCE)
        .map(|r| (r.mode.clone(), r.t))
        .collect();

    let dir = run.dir("complexity");
    let meta = run.meta(
        "complexity",
        format!("input_len={input_len};units=cycles;cnn_bit=32;scnn_bit=1"),
    );
    output::write_csv(
        &dir.join("complexity.csv"),
        &meta,
        &CSV_HEADER,
        rows.iter().map(csv_row),
    )?;
    output::write_csv(
        &dir.join("relative_cycles.csv"),
        &meta,
        &["mode", "t", "cnn", "scnn"],
        rows.iter().map(|r| {
            vec![
                r.mode.clone(),
                r.t.to_string(),
                fmt(1.0),
                fmt(r.tc_scnn as f64 / r.tc_cnn as f64),
            ]
        }),
    )?;
    let report = ComplexityReport {
        input_len,
        conv_layers,
        fc_layers,
        rows,
        within_target,
    };
    output::write_json(&dir.join("summary.json"), &meta, &report)?;
    run.archive_config(&dir)?;
    Ok(report)
}
