use anyhow::Result;

use ecgspike_core::ingest::{AamiClass, BeatClass};

use super::Run;
use crate::dataset::{build_manifest, Manifest, MANIFEST_FILE};
use crate::output;

pub fn run(run: &Run) -> Result<Manifest> {
    let manifest = build_manifest(&run.config, run.allow_partial)?;
    let meta = run.meta(
        "ingest",
        format!(
            "channel={};per_class={}",
            manifest.channel, manifest.per_class
        ),
    );
    output::write_json(&run.out.join(MANIFEST_FILE), &meta, &manifest)?;

    let classes = [
        AamiClass::N,
        AamiClass::Sveb,
        AamiClass::Veb,
        AamiClass::F,
        AamiClass::Q,
    ];
    let rows = classes.iter().map(|&class| {
        let split = |set: &[ecgspike_core::train::WindowRef]| {
            class.beat_class().map_or(0, |c: BeatClass| {
                set.iter().filter(|w| w.label == c).count()
            })
        };
        vec![
            class.to_string(),
            manifest
                .class_counts
                .get(&class)
                .copied()
                .unwrap_or(0)
                .to_string(),
            split(&manifest.train).to_string(),
            split(&manifest.test).to_string(),
        ]
    });
    output::write_csv(
        &run.dir("ingest").join("class_counts.csv"),
        &meta,
        &["class", "annotated", "train", "test"],
        rows,
    )?;
    run.archive_config(&run.dir("ingest"))?;
    log::info!(
        "{} records, {} train / {} test windows",
        manifest.records.len(),
        manifest.train.len(),
        manifest.test.len()
    );
    Ok(manifest)
}
