//! Random small networks and central finite differences.

use ecgspike_core::rng::SeededRng;
use ecgspike_core::snn::{
    simulate, Frames, LayerSpec, LeakMode, LifParams, Network, NetworkSpec, Padding, Trace,
};
use ecgspike_core::train::{
    sample_gradient, BackwardOptions, Gradients, RateBand, SurrogateKind, SurrogateSpec,
};

pub const STEP: f64 = 1e-6;
pub const TOLERANCE: f64 = 1e-4;

pub struct Case {
    pub net: Network<f64>,
    pub input: Vec<f64>,
    pub label: usize,
    pub opts: BackwardOptions,
}

pub fn random_case(seed: u64) -> Case {
    let mut rng = SeededRng::new(seed);
    let mut pick = |n: u64| rng.below(n) as usize;
    let in_channels = 1 + pick(2);
    let input_len = 6 + pick(6);
    let conv_out = 2 + pick(2);
    let kernel = [1, 3, 5][pick(3)];
    let stride = 1 + pick(2);
    let padding = if pick(2) == 0 {
        Padding::Same
    } else {
        Padding::Valid
    };
    let with_pool = pick(2) == 0;
    let time_steps = 1 + pick(4);
    let leak = if pick(2) == 0 {
        LeakMode::Always
    } else {
        LeakMode::WithoutInput
    };
    let surrogate = if pick(2) == 0 {
        SurrogateSpec {
            kind: SurrogateKind::FastSigmoid,
            width: 1.0 + pick(4) as f64,
        }
    } else {
        SurrogateSpec {
            kind: SurrogateKind::Arctan,
            width: 1.0 + pick(3) as f64,
        }
    };
    let amplitude_input = pick(2) == 0;
    let label = pick(4);

    let mut layers = vec![LayerSpec::SpikingConv1d {
        in_channels,
        out_channels: conv_out,
        kernel,
        stride,
        padding,
    }];
    let spec_probe = NetworkSpec {
        input_channels: in_channels,
        input_len,
        layers: layers.clone(),
        lif: LifParams::default(),
        time_steps,
        num_classes: 4,
    };
    let mut shape = *spec_probe.shapes().unwrap().last().unwrap();
    if with_pool && shape.1 >= 2 {
        layers.push(LayerSpec::MaxPool1d {
            kernel: 2,
            stride: 2,
        });
        shape.1 /= 2;
    }
    layers.push(LayerSpec::SpikingFc {
        in_features: shape.0 * shape.1,
        out_features: 4,
    });
    layers.push(LayerSpec::SpikeCounter { classes: 4 });
    let spec = NetworkSpec {
        input_channels: in_channels,
        input_len,
        layers,
        lif: LifParams {
            v_threshold: 1.0,
            v_reset: 0.0,
            delta_v: 0.05,
            leak,
        },
        time_steps,
        num_classes: 4,
    };
    let mut net = Network::<f64>::zeros(spec).unwrap();
    for p in &mut net.params {
        for w in p.weight.iter_mut() {
            *w = (rng.unit_f64() - 0.3) * 1.5;
        }
        for b in p.bias.iter_mut() {
            *b = (rng.unit_f64() - 0.5) * 0.4;
        }
    }
    let input = (0..in_channels * input_len)
        .map(|_| {
            if amplitude_input {
                rng.unit_f64() * 2.0 - 1.0
            } else {
                [-1.0, 0.0, 1.0][rng.below(3) as usize]
            }
        })
        .collect();
    Case {
        net,
        input,
        label,
        opts: BackwardOptions {
            surrogate,
            band: RateBand {
                weight: 0.7,
                lo: 0.3,
                hi: 0.6,
            },
            detach_reset: false,
            relaxed: true,
        },
    }
}

pub fn loss(case: &Case, net: &Network<f64>) -> f64 {
    sample_gradient(net, Frames::Static(&case.input), case.label, &case.opts)
        .unwrap()
        .loss
}

/// Distance of the closest membrane potential from the clamp at the reset
/// potential, where the relaxed forward function has a kink.
pub fn clamp_margin(case: &Case) -> f64 {
    let mut trace = Trace { layers: Vec::new() };
    let primitive = |x: f64| case.opts.surrogate.primitive(x);
    simulate(
        &case.net,
        Frames::Static(&case.input),
        Some(&primitive),
        Some(&mut trace),
    )
    .unwrap();
    let v_reset = f64::from(case.net.spec.lif.v_reset);
    trace
        .layers
        .iter()
        .flat_map(|l| &l.integrated)
        .map(|u| (u - v_reset).abs())
        .fold(f64::INFINITY, f64::min)
}

pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt()
        + numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    if scale < 1e-12 {
        0.0
    } else {
        diff / scale
    }
}

pub fn numeric_weight_grads(case: &Case, eval: impl Fn(&Network<f64>) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    for l in 0..case.net.params.len() {
        for which in 0..2 {
            let len = if which == 0 {
                case.net.params[l].weight.len()
            } else {
                case.net.params[l].bias.len()
            };
            for i in 0..len {
                let mut plus = case.net.clone();
                let mut minus = case.net.clone();
                let (p, m) = if which == 0 {
                    (
                        &mut plus.params[l].weight[i],
                        &mut minus.params[l].weight[i],
                    )
                } else {
                    (&mut plus.params[l].bias[i], &mut minus.params[l].bias[i])
                };
                *p += STEP;
                *m -= STEP;
                out.push((eval(&plus) - eval(&minus)) / (2.0 * STEP));
            }
        }
    }
    out
}

pub fn flatten(g: &Gradients<f64>) -> Vec<f64> {
    g.params
        .iter()
        .flat_map(|p| p.weight.iter().chain(&p.bias).copied())
        .collect()
}

/// Relative error between the surrogate weight gradient and finite
/// differences of the relaxed loss, for the network drawn from `seed`.
pub fn scnn_weight_error(seed: u64) -> f64 {
    let case = random_case(seed);
    let analytic = sample_gradient(
        &case.net,
        Frames::Static(&case.input),
        case.label,
        &case.opts,
    )
    .unwrap();
    let numeric = numeric_weight_grads(&case, |n| loss(&case, n));
    relative_error(&flatten(&analytic.grads), &numeric)
}
