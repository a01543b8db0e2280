//! Event-driven ECG arrhythmia detection: MIT-BIH ingestion, a behavioural
//! level-crossing ADC, a spiking 1-D CNN with surrogate-gradient training,
//! and an operation-count complexity model.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod error;
pub mod ingest;
pub mod lcadc;
pub mod rng;
pub mod snn;
pub mod synth;
pub mod train;

pub use error::{Error, Result};
