//! Surrogate-gradient training of the spiking network and of its
//! conventional CNN twin.
//!
//! Training is deterministic for a given seed: every epoch shuffles the
//! training set with `SeededRng::derive(seed, epoch)`, per-sample gradients
//! of a batch are computed in parallel and summed in sample order, and a
//! single optimizer step follows each batch.

pub mod bptt;
mod checkpoint;
pub mod cnn;
pub mod data;
pub mod eval;
pub mod modulation;
pub mod optim;
pub mod surrogate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bptt::{sample_gradient, BackwardOptions, Gradients, SampleGrad};
pub use checkpoint::{Checkpoint, EpochLog, TRAINING_LOG_HEADER};
pub use data::{
    encode_from_records, encode_windows, EncodedRecord, InputEncoding, Sample, WindowRef,
};
pub use eval::{evaluate, predict, Evaluation};
pub use modulation::{self_modulation_penalty, RateBand};
pub use optim::{Optimizer, OptimizerKind};
pub use surrogate::{surrogate_grad, SurrogateKind, SurrogateSpec};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::snn::{spike_counter_classify, Frames, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Spiking network trained through time with surrogate gradients.
    Scnn,
    /// Same layers with ReLU units and a linear readout.
    Cnn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub surrogate: SurrogateSpec,
    pub self_mod_weight: f64,
    pub target_rate_range: (f64, f64),
    pub detach_reset: bool,
    /// Let the shared threshold, reset and leak follow their gradients.
    pub train_lif: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::AdaptiveMoment,
            seed: 0,
            surrogate: SurrogateSpec::default(),
            self_mod_weight: 1.0,
            target_rate_range: (0.02, 0.5),
            detach_reset: true,
            train_lif: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.target_rate_range;
        let problem = if self.epochs == 0 {
            Some("epochs must be positive")
        } else if self.batch_size == 0 {
            Some("batch_size must be positive")
        } else if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            Some("learning_rate must be positive and finite")
        } else if !(0.0 < lo && lo < hi && hi < 1.0) {
            Some("target_rate_range needs 0 < lo < hi < 1")
        } else if !(self.self_mod_weight >= 0.0) {
            Some("self_mod_weight must be non-negative")
        } else if !(self.surrogate.width > 0.0) {
            Some("surrogate width must be positive")
        } else {
            None
        };
        match problem {
            Some(p) => Err(Error::InvalidConfig(p.into())),
            None => Ok(()),
        }
    }

    pub fn rate_band(&self) -> RateBand {
        RateBand {
            weight: self.self_mod_weight,
            lo: self.target_rate_range.0,
            hi: self.target_rate_range.1,
        }
    }

    pub fn backward_options(&self) -> BackwardOptions {
        BackwardOptions {
            surrogate: self.surrogate,
            band: self.rate_band(),
            detach_reset: self.detach_reset,
            relaxed: false,
        }
    }
}

/// Training and test samples for one encoding.
#[derive(Debug, Clone, Copy)]
pub struct TrainData<'a> {
    pub train: &'a [Sample],
    pub test: &'a [Sample],
}

/// Best-test-accuracy and most recent checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub best: Checkpoint,
    pub last: Checkpoint,
}

/// Loss, readout and gradients of one sample for either model kind.
pub fn model_gradient(
    kind: ModelKind,
    net: &Network,
    sample: &Sample,
    opts: &BackwardOptions,
) -> Result<SampleGrad<f32>> {
    match kind {
        ModelKind::Scnn => sample_gradient(net, Frames::Static(&sample.input), sample.label, opts),
        ModelKind::Cnn => {
            let (loss, logits, grads) = cnn::cnn_sample_gradient(net, &sample.input, sample.label)?;
            Ok(SampleGrad {
                loss,
                counts: logits,
                rates: Vec::new(),
                grads,
            })
        }
    }
}

/// Mean loss and gradient over `batch`, reduced in batch order.
pub fn batch_gradient(
    kind: ModelKind,
    net: &Network,
    batch: &[&Sample],
    opts: &BackwardOptions,
) -> Result<BatchGrad> {
    let per_sample = batch
        .par_iter()
        .map(|s| model_gradient(kind, net, s, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut grads = Gradients::zeros_like(net);
    let mut loss = 0.0f64;
    let mut correct = 0usize;
    let mut rates: Vec<f64> = Vec::new();
    for (r, s) in per_sample.iter().zip(batch) {
        grads.add_assign(&r.grads);
        loss += f64::from(r.loss);
        correct += usize::from(spike_counter_classify(&r.counts) == s.label);
        if rates.is_empty() {
            rates = vec![0.0; r.rates.len()];
        }
        rates
            .iter_mut()
            .zip(&r.rates)
            .for_each(|(a, &b)| *a += f64::from(b));
    }
    let n = batch.len().max(1);
    grads.scale(1.0 / n as f32);
    rates.iter_mut().for_each(|r| *r /= n as f64);
    Ok(BatchGrad {
        loss: loss / n as f64,
        correct,
        rates,
        grads,
    })
}

#[derive(Debug, Clone)]
pub struct BatchGrad {
    pub loss: f64,
    /// Samples classified correctly before the update.
    pub correct: usize,
    pub rates: Vec<f64>,
    pub grads: Gradients<f32>,
}

/// Train `net` from scratch; see [`resume`].
pub fn train(
    kind: ModelKind,
    net: Network,
    data: TrainData<'_>,
    config: &TrainConfig,
    encoding: Option<InputEncoding>,
    on_epoch: &mut dyn FnMut(&EpochLog),
) -> Result<TrainOutcome> {
    config.validate()?;
    net.check_shapes()?;
    let start = Checkpoint::initial(kind, net, config, encoding);
    resume(
        TrainOutcome {
            best: start.clone(),
            last: start,
        },
        data,
        config,
        on_epoch,
    )
}

/// Continue training until `config.epochs` epochs are complete. Given the
/// same data and config, resuming from an intermediate outcome reproduces
/// an uninterrupted run exactly.
pub fn resume(
    state: TrainOutcome,
    data: TrainData<'_>,
    config: &TrainConfig,
    on_epoch: &mut dyn FnMut(&EpochLog),
) -> Result<TrainOutcome> {
    config.validate()?;
    if data.train.is_empty() || data.test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let TrainOutcome { mut best, last } = state;
    let Checkpoint {
        kind,
        mut network,
        mut epoch,
        mut history,
        mut optimizer,
        encoding,
        ..
    } = last;
    let opts = config.backward_options();
    let mut best_acc = best
        .history
        .last()
        .map_or(f64::NEG_INFINITY, |h| h.test_acc);

    while epoch < config.epochs {
        let mut order: Vec<usize> = (0..data.train.len()).collect();
        SeededRng::derive(config.seed, epoch as u64).shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut correct = 0;
        let mut rate_sum: Vec<f64> = Vec::new();
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &data.train[i]).collect();
            let g = batch_gradient(kind, &network, &batch, &opts)?;
            if !g.loss.is_finite() || !g.grads.is_finite() {
                return Err(Error::Numerical {
                    epoch: epoch + 1,
                    batch: b,
                    detail: format!("loss {} or gradient not finite", g.loss),
                });
            }
            optimizer.apply(
                &mut network,
                &g.grads,
                config.train_lif && kind == ModelKind::Scnn,
            );
            loss_sum += g.loss * batch.len() as f64;
            correct += g.correct;
            if rate_sum.is_empty() {
                rate_sum = vec![0.0; g.rates.len()];
            }
            rate_sum
                .iter_mut()
                .zip(&g.rates)
                .for_each(|(a, &r)| *a += r * batch.len() as f64);
        }
        epoch += 1;
        let n = data.train.len() as f64;
        let test = evaluate(kind, &network, data.test)?;
        let log = EpochLog {
            epoch,
            train_acc: correct as f64 / n,
            test_acc: test.accuracy,
            loss: loss_sum / n,
            firing_rates: rate_sum.iter().map(|r| r / n).collect(),
        };
        log::info!(
            "{kind:?} epoch {epoch}/{}: loss {:.4} train {:.4} test {:.4}",
            config.epochs,
            log.loss,
            log.train_acc,
            log.test_acc
        );
        on_epoch(&log);
        history.push(log);
        let snapshot = Checkpoint {
            kind,
            network: network.clone(),
            epoch,
            history: history.clone(),
            optimizer: optimizer.clone(),
            config: config.clone(),
            encoding,
        };
        if test.accuracy > best_acc {
            best_acc = test.accuracy;
            best = snapshot;
        }
    }
    let last = Checkpoint {
        kind,
        network,
        epoch,
        history,
        optimizer,
        config: config.clone(),
        encoding,
    };
    if best.epoch == 0 {
        best = last.clone();
    }
    Ok(TrainOutcome { best, last })
}
