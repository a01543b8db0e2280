//! Backpropagation through time for the spiking network.
//!
//! The forward pass is recorded with [`simulate`]; the backward pass walks
//! layers from the counter down and, inside each LIF layer, steps from the
//! last time step to the first. Per neuron and step the recorded
//! quantities are the integrated potential `u` and the spike `s`:
//!
//! ```text
//! c      = max(u, v_reset)
//! s      = H(c - θ)                 (surrogate derivative σ')
//! v_next = c + s · (v_reset - c)
//! ```

use super::modulation::RateBand;
use super::surrogate::SurrogateSpec;
use crate::error::{Error, Result};
use crate::snn::engine::{plan, LayerPlan};
use crate::snn::layers::{conv1d_backward, fc_backward, maxpool_backward};
use crate::snn::{simulate, Frames, LayerParams, LeakMode, LifConsts, Network, Real, Trace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardOptions {
    pub surrogate: SurrogateSpec,
    pub band: RateBand,
    /// Block gradient flow through the reset branch of `v_next`.
    pub detach_reset: bool,
    /// Replace the hard threshold by the surrogate's smooth primitive in
    /// the forward pass, making the computed gradient exact.
    pub relaxed: bool,
}

/// Gradients of the shared LIF constants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LifGrads<F> {
    pub v_threshold: F,
    pub v_reset: F,
    pub delta_v: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<F> {
    pub params: Vec<LayerParams<F>>,
    pub lif: LifGrads<F>,
}

impl<F: Real> Gradients<F> {
    pub fn zeros_like(net: &Network<F>) -> Self {
        Self {
            params: net
                .params
                .iter()
                .map(|p| LayerParams {
                    weight: vec![F::zero(); p.weight.len()],
                    bias: vec![F::zero(); p.bias.len()],
                })
                .collect(),
            lif: LifGrads {
                v_threshold: F::zero(),
                v_reset: F::zero(),
                delta_v: F::zero(),
            },
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.params.iter_mut().zip(&other.params) {
            a.weight
                .iter_mut()
                .zip(&b.weight)
                .for_each(|(x, &y)| *x = *x + y);
            a.bias
                .iter_mut()
                .zip(&b.bias)
                .for_each(|(x, &y)| *x = *x + y);
        }
        self.lif.v_threshold = self.lif.v_threshold + other.lif.v_threshold;
        self.lif.v_reset = self.lif.v_reset + other.lif.v_reset;
        self.lif.delta_v = self.lif.delta_v + other.lif.delta_v;
    }

    pub fn scale(&mut self, factor: F) {
        for p in &mut self.params {
            p.weight
                .iter_mut()
                .chain(p.bias.iter_mut())
                .for_each(|x| *x = *x * factor);
        }
        self.lif.v_threshold = self.lif.v_threshold * factor;
        self.lif.v_reset = self.lif.v_reset * factor;
        self.lif.delta_v = self.lif.delta_v * factor;
    }

    pub fn is_finite(&self) -> bool {
        self.params
            .iter()
            .all(|p| p.weight.iter().chain(&p.bias).all(|x| x.is_finite()))
            && [self.lif.v_threshold, self.lif.v_reset, self.lif.delta_v]
                .iter()
                .all(|x| x.is_finite())
    }
}

/// Loss, readout and gradients for one sample.
#[derive(Debug, Clone)]
pub struct SampleGrad<F> {
    /// Cross-entropy plus rate penalty.
    pub loss: F,
    pub counts: Vec<F>,
    /// Firing rate of every LIF layer, in layer order.
    pub rates: Vec<F>,
    pub grads: Gradients<F>,
}

/// Softmax cross-entropy of `logits` against class `label`, and its
/// gradient with respect to the logits.
pub fn cross_entropy<F: Real>(logits: &[F], label: usize) -> (F, Vec<F>) {
    let max = logits.iter().copied().fold(F::neg_infinity(), F::max);
    let exps: Vec<F> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: F = exps.iter().copied().sum();
    let loss = sum.ln() + max - logits[label];
    let grad = exps
        .iter()
        .enumerate()
        .map(|(k, &e)| e / sum - if k == label { F::one() } else { F::zero() })
        .collect();
    (loss, grad)
}

/// Forward and backward pass for a single input/label pair.
pub fn sample_gradient<F: Real>(
    net: &Network<F>,
    frames: Frames<'_, F>,
    label: usize,
    opts: &BackwardOptions,
) -> Result<SampleGrad<F>> {
    let spec = &net.spec;
    if label >= spec.num_classes {
        return Err(Error::Shape(format!(
            "label {label} out of range for {} classes",
            spec.num_classes
        )));
    }
    let (plans, sizes) = plan(spec)?;
    let steps = spec.time_steps;
    let steps_f = F::from(steps).unwrap();
    let surrogate = opts.surrogate;
    let primitive = move |x: F| surrogate.primitive(x);
    let spike_fn: Option<&dyn Fn(F) -> F> = if opts.relaxed { Some(&primitive) } else { None };

    let mut trace = Trace { layers: Vec::new() };
    let counts = simulate(net, frames, spike_fn, Some(&mut trace))?;
    let logits: Vec<F> = counts.iter().map(|&c| c / steps_f).collect();
    let (ce, dlogits) = cross_entropy(&logits, label);

    let lif_rate = |l: usize| {
        let out = &trace.layers[l].out;
        out.iter().copied().sum::<F>() / F::from(out.len()).unwrap()
    };
    let rates: Vec<F> = (0..plans.len())
        .filter(|&l| plans[l].is_lif())
        .map(lif_rate)
        .collect();
    let loss = ce + opts.band.penalty(&rates);

    let lif = LifConsts::<F>::from_params(&net.lif());
    let mut grads = Gradients::zeros_like(net);
    let last = plans.len() - 1;
    debug_assert!(matches!(plans[last], LayerPlan::Counter));

    // Counter is the identity on every step, counts sum over steps.
    let below = last - 1;
    let mut grad: Vec<F> = (0..steps)
        .flat_map(|_| dlogits.iter().map(|&g| g / steps_f))
        .collect();
    debug_assert_eq!(grad.len(), steps * sizes[below]);

    for l in (0..=below).rev() {
        let n = sizes[l];
        let in_size = if l == 0 {
            spec.input_channels * spec.input_len
        } else {
            sizes[l - 1]
        };
        let mut grad_below = if l > 0 {
            vec![F::zero(); steps * in_size]
        } else {
            Vec::new()
        };
        match plans[l] {
            LayerPlan::Pool { .. } => {
                let argmax = &trace.layers[l].argmax;
                for t in 0..steps {
                    maxpool_backward(
                        &grad[t * n..(t + 1) * n],
                        &argmax[t * n..(t + 1) * n],
                        &mut grad_below[t * in_size..(t + 1) * in_size],
                    );
                }
            }
            LayerPlan::Conv(_) | LayerPlan::Fc { .. } => {
                let rate_grad = opts.band.rate_grad(lif_rate(l)) / F::from(n * steps).unwrap();
                if rate_grad != F::zero() {
                    grad.iter_mut().for_each(|g| *g = *g + rate_grad);
                }
                let positions = match plans[l] {
                    LayerPlan::Conv(g) => g.out_len,
                    _ => 1,
                };
                let layer = &trace.layers[l];
                let weight = &net.params[l].weight;
                let LayerParams {
                    weight: grad_w,
                    bias: grad_b,
                } = &mut grads.params[l];
                let mut gv = vec![F::zero(); n];
                let mut gi = vec![F::zero(); n];
                for t in (0..steps).rev() {
                    for i in 0..n {
                        let idx = t * n + i;
                        let u = layer.integrated[idx];
                        let s = layer.out[idx];
                        let c = u.max(lif.v_reset);
                        let sg = surrogate.grad(c - lif.v_threshold);
                        let mut gs = grad[idx];
                        if !opts.detach_reset {
                            gs = gs + gv[i] * (lif.v_reset - c);
                        }
                        let gc = gs * sg + gv[i] * (F::one() - s);
                        let above = u > lif.v_reset;
                        let gu = if above { gc } else { F::zero() };
                        grads.lif.v_threshold = grads.lif.v_threshold - gs * sg;
                        grads.lif.v_reset = grads.lif.v_reset + gv[i] * s;
                        if !above {
                            grads.lif.v_reset = grads.lif.v_reset + gc;
                        }
                        let leaked = match lif.leak {
                            LeakMode::Always => true,
                            LeakMode::WithoutInput => !layer.has_input[idx],
                        };
                        if leaked {
                            grads.lif.delta_v = grads.lif.delta_v - gu;
                        }
                        gi[i] = gu;
                        gv[i] = gu;
                        grad_b[i / positions] = grad_b[i / positions] + gu;
                    }
                    let input: &[F] = if l == 0 {
                        frames.at(t)
                    } else {
                        &trace.layers[l - 1].out[t * in_size..(t + 1) * in_size]
                    };
                    let gin = (l > 0).then(|| &mut grad_below[t * in_size..(t + 1) * in_size]);
                    match plans[l] {
                        LayerPlan::Conv(ref g) => {
                            conv1d_backward(g, input, weight, &gi, grad_w, gin)
                        }
                        LayerPlan::Fc { in_features, .. } => {
                            fc_backward(in_features, input, weight, &gi, grad_w, gin)
                        }
                        _ => unreachable!(),
                    }
                }
                // Every membrane starts at the reset potential.
                grads.lif.v_reset = grads.lif.v_reset + gv.iter().copied().sum();
            }
            LayerPlan::Counter => {
                return Err(Error::Shape("spike counter must be the last layer".into()));
            }
        }
        grad = grad_below;
    }

    Ok(SampleGrad {
        loss,
        counts,
        rates,
        grads,
    })
}
