//! Dense per-step simulation of a [`Network`], optionally recording what
//! backpropagation through time needs.

use super::layers::{conv1d_forward, fc_forward, maxpool_forward, ConvGeometry};
use super::lif::LifConsts;
use super::spec::LayerSpec;
use super::{Network, Real};
use crate::error::{Error, Result};

/// Resolved per-layer geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerPlan {
    Conv(ConvGeometry),
    Pool {
        channels: usize,
        in_len: usize,
        kernel: usize,
        stride: usize,
        out_len: usize,
    },
    Fc {
        in_features: usize,
        out_features: usize,
    },
    Counter,
}

impl LayerPlan {
    pub fn is_lif(&self) -> bool {
        matches!(self, Self::Conv(_) | Self::Fc { .. })
    }
}

pub fn plan(spec: &super::NetworkSpec) -> Result<(Vec<LayerPlan>, Vec<usize>)> {
    let shapes = spec.shapes()?;
    let mut prev = (spec.input_channels, spec.input_len);
    let mut plans = Vec::with_capacity(spec.layers.len());
    let mut sizes = Vec::with_capacity(spec.layers.len());
    for (layer, &shape) in spec.layers.iter().zip(&shapes) {
        plans.push(match *layer {
            LayerSpec::SpikingConv1d {
                in_channels,
                out_channels,
                kernel,
                stride,
                padding,
            } => LayerPlan::Conv(ConvGeometry {
                in_channels,
                out_channels,
                kernel,
                stride,
                padding,
                in_len: prev.1,
                out_len: shape.1,
            }),
            LayerSpec::MaxPool1d { kernel, stride } => LayerPlan::Pool {
                channels: prev.0,
                in_len: prev.1,
                kernel,
                stride,
                out_len: shape.1,
            },
            LayerSpec::SpikingFc {
                in_features,
                out_features,
            } => LayerPlan::Fc {
                in_features,
                out_features,
            },
            LayerSpec::SpikeCounter { .. } => LayerPlan::Counter,
        });
        sizes.push(shape.0 * shape.1);
        prev = shape;
    }
    Ok((plans, sizes))
}

/// Network input over the simulated steps.
#[derive(Debug, Clone, Copy)]
pub enum Frames<'a, F> {
    /// The same frame at every step.
    Static(&'a [F]),
    /// One frame per step.
    PerStep(&'a [Vec<F>]),
}

impl<'a, F> Frames<'a, F> {
    pub fn at(&self, t: usize) -> &'a [F] {
        match *self {
            Self::Static(f) => f,
            Self::PerStep(frames) => &frames[t],
        }
    }

    fn check(&self, size: usize, steps: usize) -> Result<()> {
        let ok = match self {
            Self::Static(f) => f.len() == size,
            Self::PerStep(frames) => {
                frames.len() == steps && frames.iter().all(|f| f.len() == size)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "network expects {steps} frames of {size} values"
            )))
        }
    }
}

/// Per-layer activations over all steps, laid out `[t][neuron]`.
#[derive(Debug, Clone, Default)]
pub struct LayerTrace<F> {
    pub out: Vec<F>,
    /// LIF layers: potential after integration, before the clamp.
    pub integrated: Vec<F>,
    /// LIF layers: whether the synaptic sum was nonzero.
    pub has_input: Vec<bool>,
    /// Pool layers: winning input index per output.
    pub argmax: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Trace<F> {
    pub layers: Vec<LayerTrace<F>>,
}

/// Run `net` for `spec.time_steps` steps and return per-class spike counts.
///
/// `spike_fn` replaces the hard threshold with a smooth function of
/// `v - threshold` (used only for gradient checking). States start at the
/// reset potential on every call.
pub fn simulate<F: Real>(
    net: &Network<F>,
    frames: Frames<'_, F>,
    spike_fn: Option<&dyn Fn(F) -> F>,
    mut trace: Option<&mut Trace<F>>,
) -> Result<Vec<F>> {
    let spec = &net.spec;
    let (plans, sizes) = plan(spec)?;
    let steps = spec.time_steps;
    frames.check(spec.input_channels * spec.input_len, steps)?;
    let lif = LifConsts::<F>::from_params(&net.lif());

    let mut membranes: Vec<Vec<F>> = plans
        .iter()
        .zip(&sizes)
        .map(|(p, &n)| {
            if p.is_lif() {
                vec![lif.v_reset; n]
            } else {
                Vec::new()
            }
        })
        .collect();
    let mut acts: Vec<Vec<F>> = sizes.iter().map(|&n| vec![F::zero(); n]).collect();
    let mut currents: Vec<Vec<F>> = plans
        .iter()
        .zip(&sizes)
        .map(|(p, &n)| {
            if p.is_lif() {
                vec![F::zero(); n]
            } else {
                Vec::new()
            }
        })
        .collect();
    let mut argmax: Vec<Vec<usize>> = plans
        .iter()
        .zip(&sizes)
        .map(|(p, &n)| {
            if matches!(p, LayerPlan::Pool { .. }) {
                vec![0; n]
            } else {
                Vec::new()
            }
        })
        .collect();

    if let Some(tr) = trace.as_deref_mut() {
        tr.layers = plans
            .iter()
            .zip(&sizes)
            .map(|(p, &n)| LayerTrace {
                out: Vec::with_capacity(n * steps),
                integrated: if p.is_lif() {
                    Vec::with_capacity(n * steps)
                } else {
                    Vec::new()
                },
                has_input: if p.is_lif() {
                    Vec::with_capacity(n * steps)
                } else {
                    Vec::new()
                },
                argmax: if matches!(p, LayerPlan::Pool { .. }) {
                    Vec::with_capacity(n * steps)
                } else {
                    Vec::new()
                },
            })
            .collect();
    }

    let counter_len = *sizes.last().unwrap_or(&0);
    let mut counts = vec![F::zero(); counter_len];

    for t in 0..steps {
        for (l, plan) in plans.iter().enumerate() {
            let (before, rest) = acts.split_at_mut(l);
            let input: &[F] = if l == 0 { frames.at(t) } else { &before[l - 1] };
            let out = &mut rest[0];
            match *plan {
                LayerPlan::Conv(ref g) => {
                    let current = &mut currents[l];
                    conv1d_forward(g, input, &net.params[l].weight, current);
                    lif_layer(
                        &lif,
                        current,
                        &net.params[l].bias,
                        g.out_len,
                        &mut membranes[l],
                        out,
                        spike_fn,
                        trace.as_deref_mut().map(|tr| &mut tr.layers[l]),
                    );
                }
                LayerPlan::Fc { in_features, .. } => {
                    let current = &mut currents[l];
                    fc_forward(in_features, input, &net.params[l].weight, current);
                    lif_layer(
                        &lif,
                        current,
                        &net.params[l].bias,
                        1,
                        &mut membranes[l],
                        out,
                        spike_fn,
                        trace.as_deref_mut().map(|tr| &mut tr.layers[l]),
                    );
                }
                LayerPlan::Pool {
                    channels,
                    in_len,
                    kernel,
                    stride,
                    ..
                } => {
                    maxpool_forward(channels, in_len, kernel, stride, input, out, &mut argmax[l]);
                    if let Some(tr) = trace.as_deref_mut() {
                        tr.layers[l].argmax.extend_from_slice(&argmax[l]);
                    }
                }
                LayerPlan::Counter => {
                    out.copy_from_slice(input);
                    for (c, &s) in counts.iter_mut().zip(input.iter()) {
                        *c = *c + s;
                    }
                }
            }
            if spike_fn.is_none() && l + 1 < plans.len() {
                debug_assert!(
                    out.iter().all(|&s| s == F::zero() || s == F::one()),
                    "layer {l} emitted non-binary activations"
                );
            }
            if let Some(tr) = trace.as_deref_mut() {
                tr.layers[l].out.extend_from_slice(out);
            }
        }
    }
    Ok(counts)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn lif_layer<F: Real>(
    lif: &LifConsts<F>,
    current: &[F],
    bias: &[F],
    positions: usize,
    membrane: &mut [F],
    out: &mut [F],
    spike_fn: Option<&dyn Fn(F) -> F>,
    trace: Option<&mut LayerTrace<F>>,
) {
    let mut trace = trace;
    for (i, ((v, &syn), s)) in membrane
        .iter_mut()
        .zip(current)
        .zip(out.iter_mut())
        .enumerate()
    {
        let b = bias[i / positions];
        let u = lif.update(*v, syn + b, syn != F::zero(), spike_fn);
        *v = u.next;
        *s = u.spike;
        if let Some(tr) = trace.as_deref_mut() {
            tr.integrated.push(u.integrated);
            tr.has_input.push(syn != F::zero());
        }
    }
}
