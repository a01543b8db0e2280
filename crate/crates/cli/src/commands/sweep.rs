use std::collections::BTreeMap;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use ecgspike_core::train::{InputEncoding, ModelKind};

use super::compress::{record_stats, summarize};
use super::train::{run_cell, Cell, CellMetrics};
use super::{mean, median, train_label, Run};
use crate::dataset::Manifest;
use crate::output::{self, fmt};

/// Largest accuracy shortfall from the best resolution still counted as
/// comparable, in accuracy units.
pub const COMPARABLE_ACCURACY: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub cell: Cell,
    /// `None` when the cell failed.
    pub metrics: Option<CellMetrics>,
    pub error: Option<String>,
}

/// Median accuracies over seeds, grouped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub model: ModelKind,
    pub input: String,
    pub resolution_bits: Option<u32>,
    pub bin_factor: usize,
    pub seeds: usize,
    pub median_accuracy: f64,
    pub reduction: Option<f64>,
}

/// The derived comparisons for one bin factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub bin_factor: usize,
    /// Spread of the LC-ADC SCNN medians across resolutions.
    pub lcadc_band: Option<f64>,
    /// Mean over resolutions of the LC-ADC SCNN medians.
    pub lcadc_mean: Option<f64>,
    pub nyquist_median: Option<f64>,
    pub cnn_median: Option<f64>,
    /// CNN median minus the LC-ADC SCNN median at the lowest resolution.
    pub cnn_gap: Option<f64>,
    /// Lowest resolution whose median is within [`COMPARABLE_ACCURACY`] of
    /// the best LC-ADC median.
    pub compression_optimal_bits: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub train_config: ecgspike_core::train::TrainConfig,
    pub time_steps: usize,
    pub cells: usize,
    pub failed: usize,
    pub groups: Vec<GroupSummary>,
    pub bins: Vec<BinSummary>,
}

/// Cells in execution order: per bin factor, every resolution, then the
/// Nyquist SCNN and the CNN baseline, each over all seeds.
pub fn grid(run: &Run) -> Vec<Cell> {
    let sweep = &run.config.sweep;
    let seeds = if sweep.seeds.is_empty() {
        vec![run.config.seed]
    } else {
        sweep.seeds.clone()
    };
    let mut cells = Vec::new();
    for bin_factor in run.sweep_bins() {
        for bits in run.sweep_bits() {
            for &seed in &seeds {
                cells.push(Cell {
                    model: ModelKind::Scnn,
                    encoding: run.config.lcadc_encoding(bits, bin_factor),
                    seed,
                });
            }
        }
        let amplitude = InputEncoding::Amplitude { bin_factor };
        for (enabled, model) in [
            (sweep.nyquist, ModelKind::Scnn),
            (sweep.cnn, ModelKind::Cnn),
        ] {
            if enabled {
                cells.extend(seeds.iter().map(|&seed| Cell {
                    model,
                    encoding: amplitude,
                    seed,
                }));
            }
        }
    }
    cells
}

pub fn run(run: &Run) -> Result<SweepSummary> {
    let manifest = Manifest::load(&run.out)?;
    let dir = run.dir("sweep");
    let mut reductions = BTreeMap::new();
    for bits in run.sweep_bits() {
        reductions.insert(
            bits,
            summarize(bits, &record_stats(run, &manifest, bits)?).reduction,
        );
    }

    let cells = grid(run);
    let mut outcomes = Vec::with_capacity(cells.len());
    for (i, cell) in cells.into_iter().enumerate() {
        log::info!("sweep cell {}: {}", i + 1, cell.name());
        let result = run_cell(run, &manifest, &cell, false);
        outcomes.push(match result {
            Ok(metrics) => CellOutcome {
                cell,
                metrics: Some(metrics),
                error: None,
            },
            Err(e) => {
                log::error!("{}: {e:#}", cell.name());
                CellOutcome {
                    cell,
                    metrics: None,
                    error: Some(format!("{e:#}")),
                }
            }
        });
    }

    let summary = summarize_grid(run, &outcomes, &reductions);
    let meta = run.meta(
        "sweep",
        format!(
            "T={};{}",
            run.config.time_steps,
            train_label(&run.config.train)
        ),
    );
    output::write_csv(
        &dir.join("sweep.csv"),
        &meta,
        &[
            "model",
            "input",
            "M",
            "bin_factor",
            "seed",
            "status",
            "best_epoch",
            "accuracy",
            "final_accuracy",
            "reduction",
        ],
        outcomes.iter().map(|o| csv_row(o, &reductions)),
    )?;
    output::write_json(&dir.join("summary.json"), &meta, &summary)?;
    run.archive_config(&dir)?;
    Ok(summary)
}

fn bits_of(cell: &Cell) -> Option<u32> {
    match cell.encoding {
        InputEncoding::LcAdc { config, .. } => Some(config.resolution_bits),
        InputEncoding::Amplitude { .. } => None,
    }
}

fn csv_row(o: &CellOutcome, reductions: &BTreeMap<u32, f64>) -> Vec<String> {
    let bits = bits_of(&o.cell);
    let (status, best_epoch, accuracy, final_accuracy) = match (&o.metrics, &o.error) {
        (Some(m), _) => (
            "ok".to_string(),
            m.best_epoch.to_string(),
            fmt(m.accuracy),
            fmt(m.final_accuracy),
        ),
        (None, e) => (
            format!("failed: {}", e.as_deref().unwrap_or("unknown")),
            String::new(),
            String::new(),
            String::new(),
        ),
    };
    vec![
        match o.cell.model {
            ModelKind::Scnn => "scnn".into(),
            ModelKind::Cnn => "cnn".into(),
        },
        o.cell.input_label().to_string(),
        bits.map_or_else(String::new, |b| b.to_string()),
        o.cell.encoding.bin_factor().to_string(),
        o.cell.seed.to_string(),
        status,
        best_epoch,
        accuracy,
        final_accuracy,
        bits.and_then(|b| reductions.get(&b))
            .map_or_else(String::new, |&r| fmt(r)),
    ]
}

fn summarize_grid(
    run: &Run,
    outcomes: &[CellOutcome],
    reductions: &BTreeMap<u32, f64>,
) -> SweepSummary {
    let mut grouped: BTreeMap<(u8, String, Option<u32>, usize), Vec<f64>> = BTreeMap::new();
    for o in outcomes {
        let key = (
            u8::from(o.cell.model == ModelKind::Cnn),
            o.cell.input_label().to_string(),
            bits_of(&o.cell),
            o.cell.encoding.bin_factor(),
        );
        let entry = grouped.entry(key).or_default();
        if let Some(m) = &o.metrics {
            entry.push(m.accuracy);
        }
    }
    let groups: Vec<GroupSummary> = grouped
        .into_iter()
        .filter_map(|((model, input, bits, bin_factor), accs)| {
            Some(GroupSummary {
                model: if model == 1 {
                    ModelKind::Cnn
                } else {
                    ModelKind::Scnn
                },
                input,
                resolution_bits: bits,
                bin_factor,
                seeds: accs.len(),
                median_accuracy: median(&accs)?,
                reduction: bits.and_then(|b| reductions.get(&b).copied()),
            })
        })
        .collect();

    let bins = run
        .sweep_bins()
        .into_iter()
        .map(|bin_factor| {
            let in_bin = |model: ModelKind, input: &'static str| {
                groups.iter().filter(move |g| {
                    g.bin_factor == bin_factor && g.model == model && g.input == input
                })
            };
            let lcadc: Vec<(u32, f64)> = in_bin(ModelKind::Scnn, "lcadc")
                .filter_map(|g| Some((g.resolution_bits?, g.median_accuracy)))
                .collect();
            let medians: Vec<f64> = lcadc.iter().map(|&(_, a)| a).collect();
            let best = medians.iter().copied().reduce(f64::max);
            let nyquist_median = in_bin(ModelKind::Scnn, "nyquist")
                .next()
                .map(|g| g.median_accuracy);
            let cnn_median = in_bin(ModelKind::Cnn, "nyquist")
                .next()
                .map(|g| g.median_accuracy);
            let lowest = lcadc.iter().min_by_key(|&&(b, _)| b).map(|&(_, a)| a);
            BinSummary {
                bin_factor,
                lcadc_band: best
                    .zip(medians.iter().copied().reduce(f64::min))
                    .map(|(hi, lo)| hi - lo),
                lcadc_mean: mean(&medians),
                nyquist_median,
                cnn_median,
                cnn_gap: cnn_median.zip(lowest).map(|(c, s)| c - s),
                compression_optimal_bits: best.and_then(|best| {
                    lcadc
                        .iter()
                        .filter(|&&(_, a)| a >= best - COMPARABLE_ACCURACY - 1e-12)
                        .map(|&(b, _)| b)
                        .min()
                }),
            }
        })
        .collect();

    SweepSummary {
        train_config: run.config.train.clone(),
        time_steps: run.config.time_steps,
        cells: outcomes.len(),
        failed: outcomes.iter().filter(|o| o.metrics.is_none()).count(),
        groups,
        bins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn grid_covers_resolutions_and_baselines() {
        let run = Run::new(ExperimentConfig::default(), "x");
        let cells = grid(&run);
        assert_eq!(cells.len(), 3 * 3 + 3 + 3);
        assert!(cells[..9]
            .iter()
            .all(|c| c.model == ModelKind::Scnn && c.input_label() == "lcadc"));
        assert!(cells[12..].iter().all(|c| c.model == ModelKind::Cnn));
        let mut names: Vec<_> = cells.iter().map(Cell::name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), cells.len());
    }
}
