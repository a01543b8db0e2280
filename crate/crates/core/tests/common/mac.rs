//! Reference kernels for the event-driven layers.

use ecgspike_core::rng::SeededRng;
use ecgspike_core::snn::layers::ConvGeometry;
use ecgspike_core::snn::Padding;

/// Textbook multiply-accumulate over the padded input.
pub fn dense_conv(g: &ConvGeometry, input: &[f32], weight: &[f32]) -> Vec<f32> {
    let pad = match g.padding {
        Padding::Same => (g.kernel - 1) / 2,
        Padding::Valid => 0,
    };
    let mut out = vec![0.0f32; g.out_channels * g.out_len];
    for co in 0..g.out_channels {
        for o in 0..g.out_len {
            let mut acc = 0.0f32;
            for ci in 0..g.in_channels {
                for k in 0..g.kernel {
                    let Some(p) = (o * g.stride + k).checked_sub(pad) else {
                        continue;
                    };
                    if p >= g.in_len {
                        continue;
                    }
                    let x = input[ci * g.in_len + p];
                    if x != 0.0 {
                        acc += weight[(co * g.in_channels + ci) * g.kernel + k] * x;
                    }
                }
            }
            out[co * g.out_len + o] = acc;
        }
    }
    out
}

pub fn ternary(rng: &mut SeededRng, n: usize, density: f64) -> Vec<f32> {
    (0..n)
        .map(|_| {
            if rng.unit_f64() < density {
                if rng.below(2) == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        })
        .collect()
}

/// Dense fully connected layer over the nonzero inputs.
pub fn dense_fc(n_in: usize, input: &[f32], weight: &[f32]) -> Vec<f32> {
    (0..weight.len() / n_in)
        .map(|o| {
            input
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .fold(0.0f32, |acc, (i, &x)| acc + weight[o * n_in + i] * x)
        })
        .collect()
}
