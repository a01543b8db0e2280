use serde::{Deserialize, Serialize};

use super::LifParams;
use crate::complexity::{ConvDims, FcDims};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Padding {
    /// `(kernel - 1) / 2` zeros on the left, the rest on the right; keeps
    /// length at stride 1.
    #[default]
    Same,
    Valid,
}

/// One layer. Every conv and FC layer is followed by a LIF activation (or
/// ReLU in the conventional baseline).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LayerSpec {
    SpikingConv1d {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        stride: usize,
        padding: Padding,
    },
    MaxPool1d {
        kernel: usize,
        stride: usize,
    },
    SpikingFc {
        in_features: usize,
        out_features: usize,
    },
    SpikeCounter {
        classes: usize,
    },
}

impl LayerSpec {
    pub fn has_weights(&self) -> bool {
        matches!(self, Self::SpikingConv1d { .. } | Self::SpikingFc { .. })
    }

    /// `(weights, biases)`.
    pub fn param_counts(&self) -> (usize, usize) {
        match *self {
            Self::SpikingConv1d {
                in_channels,
                out_channels,
                kernel,
                ..
            } => (out_channels * in_channels * kernel, out_channels),
            Self::SpikingFc {
                in_features,
                out_features,
            } => (out_features * in_features, out_features),
            _ => (0, 0),
        }
    }

    pub fn fan_in(&self) -> usize {
        match *self {
            Self::SpikingConv1d {
                in_channels,
                kernel,
                ..
            } => in_channels * kernel,
            Self::SpikingFc { in_features, .. } => in_features,
            _ => 0,
        }
    }
}

/// Activation shape `(channels, length)`. FC outputs are `(features, 1)`.
pub type Shape = (usize, usize);

pub fn conv_out_len(len: usize, kernel: usize, stride: usize, padding: Padding) -> Option<usize> {
    let padded = match padding {
        Padding::Same => len + kernel - 1,
        Padding::Valid => len,
    };
    (padded >= kernel && stride > 0).then(|| (padded - kernel) / stride + 1)
}

pub fn left_pad(kernel: usize, padding: Padding) -> usize {
    match padding {
        Padding::Same => (kernel - 1) / 2,
        Padding::Valid => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_channels: usize,
    pub input_len: usize,
    pub layers: Vec<LayerSpec>,
    pub lif: LifParams,
    pub time_steps: usize,
    pub num_classes: usize,
}

impl NetworkSpec {
    /// Five conv layers (8, 16, 16, 32, 32 channels, kernel 3, same padding),
    /// 2x max-pooling after conv 2 and conv 4, FC 64 -> `num_classes`.
    pub fn default_for(input_len: usize, time_steps: usize) -> Self {
        Self::conv_stack(input_len, time_steps, &[8, 16, 16, 32, 32], 64)
    }

    /// Same topology with caller-chosen widths.
    pub fn conv_stack(
        input_len: usize,
        time_steps: usize,
        channels: &[usize; 5],
        hidden: usize,
    ) -> Self {
        let conv = |i: usize, o: usize| LayerSpec::SpikingConv1d {
            in_channels: i,
            out_channels: o,
            kernel: 3,
            stride: 1,
            padding: Padding::Same,
        };
        let pool = LayerSpec::MaxPool1d {
            kernel: 2,
            stride: 2,
        };
        let flat = channels[4] * (input_len / 2 / 2);
        Self {
            input_channels: 1,
            input_len,
            layers: vec![
                conv(1, channels[0]),
                conv(channels[0], channels[1]),
                pool,
                conv(channels[1], channels[2]),
                conv(channels[2], channels[3]),
                pool,
                conv(channels[3], channels[4]),
                LayerSpec::SpikingFc {
                    in_features: flat,
                    out_features: hidden,
                },
                LayerSpec::SpikingFc {
                    in_features: hidden,
                    out_features: 4,
                },
                LayerSpec::SpikeCounter { classes: 4 },
            ],
            lif: LifParams::default(),
            time_steps,
            num_classes: 4,
        }
    }

    /// Output shape of every layer, checking that consecutive layers fit.
    pub fn shapes(&self) -> Result<Vec<Shape>> {
        let mut shape: Shape = (self.input_channels, self.input_len);
        let mut out = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let err = |msg: String| Error::Shape(format!("layer {i} ({layer:?}): {msg}"));
            shape = match *layer {
                LayerSpec::SpikingConv1d {
                    in_channels,
                    out_channels,
                    kernel,
                    stride,
                    padding,
                } => {
                    if shape.0 != in_channels {
                        return Err(err(format!("input has {} channels", shape.0)));
                    }
                    if kernel == 0 {
                        return Err(err("zero kernel".into()));
                    }
                    let len = conv_out_len(shape.1, kernel, stride, padding)
                        .ok_or_else(|| err(format!("input length {} too short", shape.1)))?;
                    (out_channels, len)
                }
                LayerSpec::MaxPool1d { kernel, stride } => {
                    if kernel == 0 || stride == 0 || shape.1 < kernel {
                        return Err(err(format!("cannot pool length {}", shape.1)));
                    }
                    (shape.0, (shape.1 - kernel) / stride + 1)
                }
                LayerSpec::SpikingFc {
                    in_features,
                    out_features,
                } => {
                    if shape.0 * shape.1 != in_features {
                        return Err(err(format!("input has {} features", shape.0 * shape.1)));
                    }
                    (out_features, 1)
                }
                LayerSpec::SpikeCounter { classes } => {
                    if shape.0 * shape.1 != classes {
                        return Err(err(format!("input has {} outputs", shape.0 * shape.1)));
                    }
                    shape
                }
            };
            out.push(shape);
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.lif.validate()?;
        if self.time_steps == 0 {
            return Err(Error::InvalidConfig("time_steps must be positive".into()));
        }
        self.shapes()?;
        match self.layers.split_last() {
            Some((LayerSpec::SpikeCounter { classes }, rest)) if *classes == self.num_classes => {
                if rest
                    .iter()
                    .any(|l| matches!(l, LayerSpec::SpikeCounter { .. }))
                {
                    return Err(Error::Shape(
                        "spike counter must be the last layer only".into(),
                    ));
                }
                if !matches!(rest.last(), Some(LayerSpec::SpikingFc { .. })) {
                    return Err(Error::Shape("spike counter must follow an FC layer".into()));
                }
                Ok(())
            }
            _ => Err(Error::Shape(format!(
                "last layer must be a spike counter with {} classes",
                self.num_classes
            ))),
        }
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| {
                let (w, b) = l.param_counts();
                w + b
            })
            .sum()
    }

    /// Layer dimensions in the vocabulary of the complexity model. Conv
    /// layers are 1-D, so `M_H = K_H = 1`.
    pub fn complexity_dims(&self) -> Result<(Vec<ConvDims>, Vec<FcDims>)> {
        let shapes = self.shapes()?;
        let mut conv = Vec::new();
        let mut fc = Vec::new();
        for (layer, shape) in self.layers.iter().zip(&shapes) {
            match *layer {
                LayerSpec::SpikingConv1d {
                    in_channels,
                    out_channels,
                    kernel,
                    ..
                } => conv.push(ConvDims {
                    m_h: 1,
                    m_w: shape.1 as u64,
                    k_h: 1,
                    k_w: kernel as u64,
                    c_in: in_channels as u64,
                    c_out: out_channels as u64,
                }),
                LayerSpec::SpikingFc {
                    in_features,
                    out_features,
                } => fc.push(FcDims {
                    n_in: in_features as u64,
                    n_out: out_features as u64,
                }),
                _ => {}
            }
        }
        Ok((conv, fc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shapes() {
        let spec = NetworkSpec::default_for(320, 16);
        spec.validate().unwrap();
        let shapes = spec.shapes().unwrap();
        assert_eq!(
            shapes,
            vec![
                (8, 320),
                (16, 320),
                (16, 160),
                (16, 160),
                (32, 160),
                (32, 80),
                (32, 80),
                (64, 1),
                (4, 1),
                (4, 1)
            ]
        );
        assert_eq!(
            spec.layers
                .iter()
                .filter(|l| matches!(l, LayerSpec::SpikingConv1d { .. }))
                .count(),
            5
        );
        assert_eq!(
            spec.layers
                .iter()
                .filter(|l| matches!(l, LayerSpec::MaxPool1d { .. }))
                .count(),
            2
        );
        assert_eq!(
            spec.layers
                .iter()
                .filter(|l| matches!(l, LayerSpec::SpikingFc { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn conv_lengths() {
        assert_eq!(conv_out_len(3, 3, 1, Padding::Valid), Some(1));
        assert_eq!(conv_out_len(10, 3, 1, Padding::Same), Some(10));
        assert_eq!(conv_out_len(10, 4, 2, Padding::Valid), Some(4));
        assert_eq!(conv_out_len(2, 3, 1, Padding::Valid), None);
    }

    #[test]
    fn rejects_mismatched_layers() {
        let mut spec = NetworkSpec::default_for(320, 4);
        spec.layers[7] = LayerSpec::SpikingFc {
            in_features: 10,
            out_features: 64,
        };
        assert!(matches!(spec.validate(), Err(Error::Shape(_))));

        let mut spec = NetworkSpec::default_for(320, 4);
        spec.layers.pop();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn complexity_dims_of_default() {
        let (conv, fc) = NetworkSpec::default_for(320, 1).complexity_dims().unwrap();
        assert_eq!(
            conv.iter().map(|c| c.m_w).collect::<Vec<_>>(),
            [320, 320, 160, 160, 80]
        );
        assert_eq!(fc.len(), 2);
        assert_eq!(fc[0].n_in, 2560);
    }

    #[test]
    fn json_roundtrip() {
        let spec = NetworkSpec::default_for(160, 8);
        let back: NetworkSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
