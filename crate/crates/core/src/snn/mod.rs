//! Spiking 1-D CNN: LIF dynamics, layer kernels, network simulation and
//! spike-count classification.

pub mod engine;
pub mod layers;
mod lif;
pub mod spec;
pub mod weights;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

pub use engine::{simulate, Frames, Trace};
pub use lif::{lif_step, LeakMode, LifConsts, LifParams, LifState, LifUpdate};
pub use spec::{LayerSpec, NetworkSpec, Padding};

use crate::error::{Error, Result};
use crate::lcadc::TernarySpikeTrain;
use crate::rng::SeededRng;

/// Scalar type the kernels are generic over (`f32` in production, `f64`
/// for gradient checking).
pub trait Real: num_traits::Float + Debug + Send + Sync + std::iter::Sum + 'static {}
impl<T: num_traits::Float + Debug + Send + Sync + std::iter::Sum + 'static> Real for T {}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LayerParams<F> {
    pub weight: Vec<F>,
    pub bias: Vec<F>,
}

/// A network description plus its weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<F = f32> {
    pub spec: NetworkSpec,
    /// One entry per layer; empty for pooling and the counter.
    pub params: Vec<LayerParams<F>>,
}

impl<F: Real> Network<F> {
    pub fn lif(&self) -> LifParams {
        self.spec.lif
    }

    pub fn zeros(spec: NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let params = spec
            .layers
            .iter()
            .map(|l| {
                let (w, b) = l.param_counts();
                LayerParams {
                    weight: vec![F::zero(); w],
                    bias: vec![F::zero(); b],
                }
            })
            .collect();
        Ok(Self { spec, params })
    }

    pub fn cast<G: Real>(&self) -> Network<G> {
        Network {
            spec: self.spec.clone(),
            params: self
                .params
                .iter()
                .map(|p| LayerParams {
                    weight: p.weight.iter().map(|&w| G::from(w).unwrap()).collect(),
                    bias: p.bias.iter().map(|&b| G::from(b).unwrap()).collect(),
                })
                .collect(),
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        self.spec.validate()?;
        if self.params.len() != self.spec.layers.len() {
            return Err(Error::Shape(format!(
                "{} parameter sets for {} layers",
                self.params.len(),
                self.spec.layers.len()
            )));
        }
        for (i, (layer, p)) in self.spec.layers.iter().zip(&self.params).enumerate() {
            if (p.weight.len(), p.bias.len()) != layer.param_counts() {
                return Err(Error::Shape(format!(
                    "layer {i}: weights {}+{} do not match {:?}",
                    p.weight.len(),
                    p.bias.len(),
                    layer.param_counts()
                )));
            }
        }
        Ok(())
    }
}

impl Network<f32> {
    /// Weights uniform in `±sqrt(1/fan_in)` drawn layer by layer from a
    /// [`SeededRng`]; biases zero.
    pub fn init(spec: NetworkSpec, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(spec)?;
        let mut rng = SeededRng::new(seed);
        for (layer, p) in net.spec.layers.iter().zip(&mut net.params) {
            if !layer.has_weights() {
                continue;
            }
            let limit = (1.0 / layer.fan_in() as f32).sqrt();
            p.weight
                .iter_mut()
                .for_each(|w| *w = rng.symmetric_f32(limit));
        }
        Ok(net)
    }

    /// Spike counts per class for one input frame shown at every step.
    pub fn forward(&self, frame: &[f32]) -> Result<Vec<u32>> {
        let counts = simulate(self, Frames::Static(frame), None, None)?;
        Ok(counts.into_iter().map(|c| c as u32).collect())
    }

    /// Spike counts for a sequence of per-step frames.
    pub fn forward_sequence(&self, frames: &[Vec<f32>]) -> Result<Vec<u32>> {
        let counts = simulate(self, Frames::PerStep(frames), None, None)?;
        Ok(counts.into_iter().map(|c| c as u32).collect())
    }

    pub fn forward_train(&self, train: &TernarySpikeTrain) -> Result<Vec<u32>> {
        self.forward(&frame_from_train(train))
    }

    pub fn classify(&self, frame: &[f32]) -> Result<usize> {
        Ok(spike_counter_classify(&self.forward(frame)?))
    }
}

pub fn frame_from_train(train: &TernarySpikeTrain) -> Vec<f32> {
    train.values.iter().map(|&v| v as f32).collect()
}

/// Index of the largest count; ties go to the lowest index.
pub fn spike_counter_classify<T: PartialOrd + Copy>(counts: &[T]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_rules() {
        assert_eq!(spike_counter_classify(&[3, 9, 0, 1]), 1);
        assert_eq!(spike_counter_classify(&[0, 0, 0, 0]), 0);
        assert_eq!(spike_counter_classify(&[5, 5, 2, 5]), 0);
    }

    #[test]
    fn zero_network_is_silent() {
        let net = Network::<f32>::zeros(NetworkSpec::default_for(64, 10)).unwrap();
        let frame = vec![0.0; 64];
        assert_eq!(net.forward(&frame).unwrap(), [0, 0, 0, 0]);
    }

    fn single_fc(weight: f32) -> Network {
        let spec = NetworkSpec {
            input_channels: 1,
            input_len: 2,
            layers: vec![
                LayerSpec::SpikingFc {
                    in_features: 2,
                    out_features: 4,
                },
                LayerSpec::SpikeCounter { classes: 4 },
            ],
            lif: LifParams::default(),
            time_steps: 1,
            num_classes: 4,
        };
        let mut net = Network::zeros(spec).unwrap();
        // input 1 drives class 2
        net.params[0].weight[2 * 2 + 1] = weight;
        net
    }

    #[test]
    fn one_step_threshold_crossing() {
        let net = single_fc(1.5);
        assert_eq!(net.forward(&[0.0, 1.0]).unwrap(), [0, 0, 1, 0]);
        assert_eq!(net.classify(&[0.0, 1.0]).unwrap(), 2);
        assert_eq!(single_fc(0.5).forward(&[0.0, 1.0]).unwrap(), [0, 0, 0, 0]);
    }

    #[test]
    fn counts_bounded_by_steps_and_repeatable() {
        let mut spec = NetworkSpec::default_for(64, 12);
        spec.lif.v_threshold = 0.2;
        let net = Network::init(spec, 5).unwrap();
        let frame: Vec<f32> = (0..64).map(|i| [0.0, 1.0, -1.0][i % 3]).collect();
        let a = net.forward(&frame).unwrap();
        assert!(a.iter().all(|&c| c <= 12));
        assert_eq!(a, net.forward(&frame).unwrap());
    }

    #[test]
    fn wrong_frame_size() {
        let net = Network::<f32>::zeros(NetworkSpec::default_for(64, 2)).unwrap();
        assert!(matches!(net.forward(&[0.0; 63]), Err(Error::Shape(_))));
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let spec = NetworkSpec::default_for(64, 2);
        let a = Network::init(spec.clone(), 1).unwrap();
        assert_eq!(a, Network::init(spec.clone(), 1).unwrap());
        assert_ne!(a, Network::init(spec, 2).unwrap());
        let limit = (1.0f32 / 3.0).sqrt();
        assert!(a.params[0].weight.iter().all(|w| w.abs() <= limit));
    }
}
