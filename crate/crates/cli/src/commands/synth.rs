use std::path::Path;

use anyhow::Result;

use ecgspike_core::synth::{write_synth_corpus, SynthConfig};

use super::Run;

pub fn run(run: &Run, dir: &Path, records: usize, duration_s: f64) -> Result<Vec<String>> {
    let config = SynthConfig {
        duration_s,
        seed: run.config.seed,
        ..SynthConfig::default()
    };
    let ids = write_synth_corpus(dir, records, &config)?;
    log::info!("wrote {} synthetic records to {}", ids.len(), dir.display());
    Ok(ids)
}
