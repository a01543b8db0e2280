use serde::{Deserialize, Serialize};

use super::Real;

/// When the per-step leak is subtracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeakMode {
    /// Every step, as in `V(t) = V(t-1) + Σ w·δ - ΔV`.
    #[default]
    Always,
    /// Only on steps where the neuron receives no synaptic input.
    WithoutInput,
}

/// Neuron constants shared by every LIF unit of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    pub v_threshold: f32,
    pub v_reset: f32,
    /// Leak per time step.
    pub delta_v: f32,
    #[serde(default)]
    pub leak: LeakMode,
}

impl Default for LifParams {
    fn default() -> Self {
        Self {
            v_threshold: 1.0,
            v_reset: 0.0,
            delta_v: 0.01,
            leak: LeakMode::Always,
        }
    }
}

impl LifParams {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.v_threshold > self.v_reset) || !(self.delta_v >= 0.0) {
            return Err(crate::Error::InvalidConfig(format!(
                "LIF parameters need v_threshold > v_reset and delta_v >= 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Membrane potentials of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LifState {
    pub v_mem: Vec<f32>,
}

impl LifState {
    pub fn new(neurons: usize, params: &LifParams) -> Self {
        Self {
            v_mem: vec![params.v_reset; neurons],
        }
    }
}

/// Intermediate values of one neuron update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifUpdate<F> {
    /// Integrated potential before the clamp.
    pub integrated: F,
    /// After clamping at the reset potential; this is what is compared
    /// against the threshold.
    pub clamped: F,
    pub spike: F,
    /// Potential carried to the next step.
    pub next: F,
}

/// Scalar constants of [`LifParams`] in the working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifConsts<F> {
    pub v_threshold: F,
    pub v_reset: F,
    pub delta_v: F,
    pub leak: LeakMode,
}

impl<F: Real> LifConsts<F> {
    pub fn from_params(p: &LifParams) -> Self {
        Self {
            v_threshold: F::from(p.v_threshold).unwrap(),
            v_reset: F::from(p.v_reset).unwrap(),
            delta_v: F::from(p.delta_v).unwrap(),
            leak: p.leak,
        }
    }

    /// One step. `spike_fn` maps `clamped - threshold` to a spike value;
    /// `None` is the hard threshold (fire iff `clamped >= threshold`).
    #[inline]
    pub fn update(
        &self,
        v: F,
        current: F,
        has_input: bool,
        spike_fn: Option<&dyn Fn(F) -> F>,
    ) -> LifUpdate<F> {
        let leak = match self.leak {
            LeakMode::Always => self.delta_v,
            LeakMode::WithoutInput if has_input => F::zero(),
            LeakMode::WithoutInput => self.delta_v,
        };
        let integrated = v + current - leak;
        let clamped = integrated.max(self.v_reset);
        let spike = match spike_fn {
            None => {
                if clamped >= self.v_threshold {
                    F::one()
                } else {
                    F::zero()
                }
            }
            Some(f) => f(clamped - self.v_threshold),
        };
        let next = if spike_fn.is_none() {
            if spike > F::zero() {
                self.v_reset
            } else {
                clamped
            }
        } else {
            clamped + spike * (self.v_reset - clamped)
        };
        LifUpdate {
            integrated,
            clamped,
            spike,
            next,
        }
    }
}

/// Advance a layer by one step with hard thresholding. `weighted_input`
/// already includes synaptic weights (and bias); a zero entry counts as
/// "no input" for [`LeakMode::WithoutInput`].
pub fn lif_step(state: &mut LifState, weighted_input: &[f32], params: &LifParams) -> Vec<u8> {
    assert_eq!(
        state.v_mem.len(),
        weighted_input.len(),
        "one input per neuron"
    );
    let consts = LifConsts::<f32>::from_params(params);
    state
        .v_mem
        .iter_mut()
        .zip(weighted_input)
        .map(|(v, &i)| {
            let u = consts.update(*v, i, i != 0.0, None);
            *v = u.next;
            u.spike as u8
        })
        .collect()
}
