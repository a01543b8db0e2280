//! Pseudo-derivatives for the spike nonlinearity.
//!
//! Each surrogate is the derivative of a smooth step `S(x)` of
//! `x = v - v_threshold` that rises from 0 to 1, so every derivative is
//! non-negative, peaks at the threshold and integrates to 1:
//!
//! | kind        | S(x)                                   | S'(0)   |
//! |-------------|----------------------------------------|---------|
//! | rectangular | clamp((x + w) / 2w, 0, 1)              | 1 / 2w  |
//! | fast-sigmoid| 1/2 + k·x / (2(1 + k·abs(x)))          | k / 2   |
//! | arctan      | 1/2 + atan(π·k·x / 2) / π              | k / 2   |

use serde::{Deserialize, Serialize};

use crate::snn::{LifParams, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateKind {
    #[default]
    Rectangular,
    FastSigmoid,
    Arctan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    /// Half-width `w` for rectangular, steepness `k` otherwise.
    pub width: f64,
}

impl Default for SurrogateSpec {
    fn default() -> Self {
        Self {
            kind: SurrogateKind::Rectangular,
            width: 1.0,
        }
    }
}

impl SurrogateSpec {
    pub fn grad<F: Real>(&self, x: F) -> F {
        let w = F::from(self.width).unwrap();
        let half = F::from(0.5).unwrap();
        match self.kind {
            SurrogateKind::Rectangular => {
                if x.abs() < w {
                    half / w
                } else {
                    F::zero()
                }
            }
            SurrogateKind::FastSigmoid => {
                let d = F::one() + w * x.abs();
                half * w / (d * d)
            }
            SurrogateKind::Arctan => {
                let a = F::from(std::f64::consts::FRAC_PI_2).unwrap() * w * x;
                half * w / (F::one() + a * a)
            }
        }
    }

    /// The smooth step whose derivative is [`Self::grad`].
    pub fn primitive<F: Real>(&self, x: F) -> F {
        let w = F::from(self.width).unwrap();
        let half = F::from(0.5).unwrap();
        match self.kind {
            SurrogateKind::Rectangular => ((x + w) / (w + w)).max(F::zero()).min(F::one()),
            SurrogateKind::FastSigmoid => half + half * w * x / (F::one() + w * x.abs()),
            SurrogateKind::Arctan => {
                let a = F::from(std::f64::consts::FRAC_PI_2).unwrap() * w * x;
                half + a.atan() / F::from(std::f64::consts::PI).unwrap()
            }
        }
    }
}

/// Surrogate derivative of the spike function at membrane potential `v`.
pub fn surrogate_grad(v: f64, params: &LifParams, spec: &SurrogateSpec) -> f64 {
    spec.grad(v - f64::from(params.v_threshold))
}
