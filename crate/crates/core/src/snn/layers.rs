//! Layer kernels shared by inference and training.
//!
//! Activations are flat `[channel][position]` slices. Conv weights are
//! `[out][in][k]`, FC weights `[out][in]`.
//!
//! The forward kernels walk the *input* and skip zeros. A `+1` input adds
//! the weight, `-1` subtracts it; only non-spike (amplitude) inputs reach
//! the multiply. On spike data this is exactly multiply-accumulate without
//! multiplications.

use super::spec::{left_pad, Padding};
use super::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeometry {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: Padding,
    pub in_len: usize,
    pub out_len: usize,
}

impl ConvGeometry {
    /// Output position fed by input `p` through tap `k`, if any.
    #[inline]
    fn out_pos(&self, p: usize, k: usize) -> Option<usize> {
        let shifted = (p + left_pad(self.kernel, self.padding)).checked_sub(k)?;
        if shifted % self.stride != 0 {
            return None;
        }
        let o = shifted / self.stride;
        (o < self.out_len).then_some(o)
    }
}

#[inline]
fn accumulate<F: Real>(acc: &mut F, w: F, x: F) {
    if x == F::one() {
        *acc = *acc + w;
    } else if x == -F::one() {
        *acc = *acc - w;
    } else {
        *acc = *acc + w * x;
    }
}

/// Synaptic sums (no bias) into `out`, which is overwritten.
pub fn conv1d_forward<F: Real>(g: &ConvGeometry, input: &[F], weight: &[F], out: &mut [F]) {
    debug_assert_eq!(input.len(), g.in_channels * g.in_len);
    debug_assert_eq!(weight.len(), g.out_channels * g.in_channels * g.kernel);
    debug_assert_eq!(out.len(), g.out_channels * g.out_len);
    out.fill(F::zero());
    for ci in 0..g.in_channels {
        let row = &input[ci * g.in_len..(ci + 1) * g.in_len];
        for (p, &x) in row.iter().enumerate() {
            if x == F::zero() {
                continue;
            }
            for k in 0..g.kernel {
                let Some(o) = g.out_pos(p, k) else { continue };
                for co in 0..g.out_channels {
                    let w = weight[(co * g.in_channels + ci) * g.kernel + k];
                    accumulate(&mut out[co * g.out_len + o], w, x);
                }
            }
        }
    }
}

/// Given `grad_out` (d loss / d synaptic sum), add weight gradients into
/// `grad_w` and, when requested, write input gradients into `grad_in`.
pub fn conv1d_backward<F: Real>(
    g: &ConvGeometry,
    input: &[F],
    weight: &[F],
    grad_out: &[F],
    grad_w: &mut [F],
    grad_in: Option<&mut [F]>,
) {
    for ci in 0..g.in_channels {
        let row = &input[ci * g.in_len..(ci + 1) * g.in_len];
        for (p, &x) in row.iter().enumerate() {
            if x == F::zero() {
                continue;
            }
            for k in 0..g.kernel {
                let Some(o) = g.out_pos(p, k) else { continue };
                for co in 0..g.out_channels {
                    let go = grad_out[co * g.out_len + o];
                    accumulate(&mut grad_w[(co * g.in_channels + ci) * g.kernel + k], go, x);
                }
            }
        }
    }
    if let Some(grad_in) = grad_in {
        grad_in.fill(F::zero());
        let pad = left_pad(g.kernel, g.padding);
        for co in 0..g.out_channels {
            for o in 0..g.out_len {
                let go = grad_out[co * g.out_len + o];
                if go == F::zero() {
                    continue;
                }
                for k in 0..g.kernel {
                    let Some(p) = (o * g.stride + k)
                        .checked_sub(pad)
                        .filter(|&p| p < g.in_len)
                    else {
                        continue;
                    };
                    for ci in 0..g.in_channels {
                        let gi = &mut grad_in[ci * g.in_len + p];
                        *gi = *gi + weight[(co * g.in_channels + ci) * g.kernel + k] * go;
                    }
                }
            }
        }
    }
}

/// Max over each window; `argmax` receives the input index of the first
/// maximum. On binary spikes this is a logical OR.
pub fn maxpool_forward<F: Real>(
    channels: usize,
    in_len: usize,
    kernel: usize,
    stride: usize,
    input: &[F],
    out: &mut [F],
    argmax: &mut [usize],
) {
    let out_len = (in_len - kernel) / stride + 1;
    for c in 0..channels {
        for o in 0..out_len {
            let start = c * in_len + o * stride;
            let mut best = start;
            for i in start + 1..start + kernel {
                if input[i] > input[best] {
                    best = i;
                }
            }
            out[c * out_len + o] = input[best];
            argmax[c * out_len + o] = best;
        }
    }
}

pub fn maxpool_backward<F: Real>(grad_out: &[F], argmax: &[usize], grad_in: &mut [F]) {
    grad_in.fill(F::zero());
    for (&g, &i) in grad_out.iter().zip(argmax) {
        grad_in[i] = grad_in[i] + g;
    }
}

pub fn fc_forward<F: Real>(in_features: usize, input: &[F], weight: &[F], out: &mut [F]) {
    out.fill(F::zero());
    for (i, &x) in input.iter().enumerate() {
        if x == F::zero() {
            continue;
        }
        for (o, acc) in out.iter_mut().enumerate() {
            accumulate(acc, weight[o * in_features + i], x);
        }
    }
}

pub fn fc_backward<F: Real>(
    in_features: usize,
    input: &[F],
    weight: &[F],
    grad_out: &[F],
    grad_w: &mut [F],
    grad_in: Option<&mut [F]>,
) {
    for (o, &go) in grad_out.iter().enumerate() {
        if go == F::zero() {
            continue;
        }
        let gw = &mut grad_w[o * in_features..(o + 1) * in_features];
        for (g, &x) in gw.iter_mut().zip(input) {
            if x != F::zero() {
                accumulate(g, go, x);
            }
        }
    }
    if let Some(grad_in) = grad_in {
        grad_in.fill(F::zero());
        for (o, &go) in grad_out.iter().enumerate() {
            if go == F::zero() {
                continue;
            }
            let w = &weight[o * in_features..(o + 1) * in_features];
            for (gi, &wi) in grad_in.iter_mut().zip(w) {
                *gi = *gi + wi * go;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(cin: usize, cout: usize, k: usize, len: usize, padding: Padding) -> ConvGeometry {
        let out_len = super::super::spec::conv_out_len(len, k, 1, padding).unwrap();
        ConvGeometry {
            in_channels: cin,
            out_channels: cout,
            kernel: k,
            stride: 1,
            padding,
            in_len: len,
            out_len,
        }
    }

    #[test]
    fn single_spike_selects_one_weight() {
        let g = geom(1, 1, 3, 3, Padding::Valid);
        let mut out = [0.0f32];
        conv1d_forward(&g, &[0.0, 1.0, 0.0], &[2.0, 3.0, 5.0], &mut out);
        assert_eq!(out, [3.0]);
        conv1d_forward(&g, &[0.0, -1.0, 0.0], &[2.0, 3.0, 5.0], &mut out);
        assert_eq!(out, [-3.0]);
    }

    #[test]
    fn zero_input_zero_output() {
        let g = geom(2, 3, 3, 8, Padding::Same);
        let mut out = vec![1.0f32; 24];
        conv1d_forward(&g, &[0.0; 16], &[0.7; 18], &mut out);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn same_padding_edges() {
        // kernel [a,b,c] at position 0 sees [pad, x0, x1]
        let g = geom(1, 1, 3, 4, Padding::Same);
        let mut out = [0.0f64; 4];
        conv1d_forward(&g, &[1.0, 0.0, 0.0, 1.0], &[1.0, 10.0, 100.0], &mut out);
        assert_eq!(out, [10.0, 1.0, 100.0, 10.0]);
    }

    #[test]
    fn pool_is_or_on_spikes() {
        let mut out = [0.0f32; 2];
        let mut am = [0usize; 2];
        maxpool_forward(1, 4, 2, 2, &[1.0, 0.0, 0.0, 1.0], &mut out, &mut am);
        assert_eq!(out, [1.0, 1.0]);
        assert_eq!(am, [0, 3]);
        maxpool_forward(1, 4, 2, 2, &[0.0; 4], &mut out, &mut am);
        assert_eq!(out, [0.0, 0.0]);
    }

    #[test]
    fn fc_matches_dot_products() {
        let mut out = [0.0f32; 2];
        fc_forward(
            3,
            &[1.0, 0.0, -1.0],
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &mut out,
        );
        assert_eq!(out, [1.0 - 3.0, 4.0 - 6.0]);
    }
}
