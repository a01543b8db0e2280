//! Conventional CNN with the same layer shapes as a spiking network: every
//! LIF stage becomes ReLU, the last fully connected layer is a linear
//! readout and the counter passes its logits through unchanged.

use super::bptt::{cross_entropy, Gradients};
use crate::error::Result;
use crate::snn::engine::{plan, LayerPlan};
use crate::snn::layers::{
    conv1d_backward, conv1d_forward, fc_backward, fc_forward, maxpool_backward, maxpool_forward,
};
use crate::snn::{Network, Real};

/// Activations of one forward pass.
#[derive(Debug, Clone, Default)]
pub struct CnnTrace<F> {
    pub outputs: Vec<Vec<F>>,
    pub argmax: Vec<Vec<usize>>,
}

fn readout_layer(plans: &[LayerPlan]) -> Option<usize> {
    plans.iter().rposition(|p| p.is_lif())
}

/// Class logits for one input window.
pub fn cnn_forward<F: Real>(
    net: &Network<F>,
    input: &[F],
    trace: Option<&mut CnnTrace<F>>,
) -> Result<Vec<F>> {
    let spec = &net.spec;
    let (plans, sizes) = plan(spec)?;
    if input.len() != spec.input_channels * spec.input_len {
        return Err(crate::Error::Shape(format!(
            "CNN expects {} inputs, got {}",
            spec.input_channels * spec.input_len,
            input.len()
        )));
    }
    let readout = readout_layer(&plans);
    let mut outputs: Vec<Vec<F>> = Vec::with_capacity(plans.len());
    let mut argmax: Vec<Vec<usize>> = Vec::with_capacity(plans.len());
    for (l, p) in plans.iter().enumerate() {
        let x: &[F] = if l == 0 { input } else { &outputs[l - 1] };
        let mut out = vec![F::zero(); sizes[l]];
        let mut am = Vec::new();
        match *p {
            LayerPlan::Conv(ref g) => {
                conv1d_forward(g, x, &net.params[l].weight, &mut out);
                add_bias(&mut out, &net.params[l].bias, g.out_len);
            }
            LayerPlan::Fc { in_features, .. } => {
                fc_forward(in_features, x, &net.params[l].weight, &mut out);
                add_bias(&mut out, &net.params[l].bias, 1);
            }
            LayerPlan::Pool {
                channels,
                in_len,
                kernel,
                stride,
                ..
            } => {
                am = vec![0; sizes[l]];
                maxpool_forward(channels, in_len, kernel, stride, x, &mut out, &mut am);
            }
            LayerPlan::Counter => out.copy_from_slice(x),
        }
        if p.is_lif() && Some(l) != readout {
            out.iter_mut().for_each(|v| *v = v.max(F::zero()));
        }
        outputs.push(out);
        argmax.push(am);
    }
    let logits = outputs.last().cloned().unwrap_or_default();
    if let Some(tr) = trace {
        *tr = CnnTrace { outputs, argmax };
    }
    Ok(logits)
}

fn add_bias<F: Real>(out: &mut [F], bias: &[F], positions: usize) {
    for (i, v) in out.iter_mut().enumerate() {
        *v = *v + bias[i / positions];
    }
}

/// Cross-entropy loss, logits and parameter gradients for one sample.
pub fn cnn_sample_gradient<F: Real>(
    net: &Network<F>,
    input: &[F],
    label: usize,
) -> Result<(F, Vec<F>, Gradients<F>)> {
    let (plans, _) = plan(&net.spec)?;
    let mut trace = CnnTrace {
        outputs: Vec::new(),
        argmax: Vec::new(),
    };
    let logits = cnn_forward(net, input, Some(&mut trace))?;
    let (loss, mut grad) = cross_entropy(&logits, label);
    let readout = readout_layer(&plans);
    let mut grads = Gradients::zeros_like(net);

    for l in (0..plans.len()).rev() {
        let x: &[F] = if l == 0 { input } else { &trace.outputs[l - 1] };
        let mut grad_below = vec![F::zero(); x.len()];
        if plans[l].is_lif() && Some(l) != readout {
            for (g, &y) in grad.iter_mut().zip(&trace.outputs[l]) {
                if y <= F::zero() {
                    *g = F::zero();
                }
            }
        }
        match plans[l] {
            LayerPlan::Conv(ref g) => {
                let p = &mut grads.params[l];
                let gin = (l > 0).then_some(&mut grad_below[..]);
                conv1d_backward(g, x, &net.params[l].weight, &grad, &mut p.weight, gin);
                for (i, &go) in grad.iter().enumerate() {
                    p.bias[i / g.out_len] = p.bias[i / g.out_len] + go;
                }
            }
            LayerPlan::Fc { in_features, .. } => {
                let p = &mut grads.params[l];
                let gin = (l > 0).then_some(&mut grad_below[..]);
                fc_backward(
                    in_features,
                    x,
                    &net.params[l].weight,
                    &grad,
                    &mut p.weight,
                    gin,
                );
                p.bias
                    .iter_mut()
                    .zip(&grad)
                    .for_each(|(b, &go)| *b = *b + go);
            }
            LayerPlan::Pool { .. } => maxpool_backward(&grad, &trace.argmax[l], &mut grad_below),
            LayerPlan::Counter => grad_below.copy_from_slice(&grad),
        }
        grad = grad_below;
    }
    Ok((loss, logits, grads))
}
