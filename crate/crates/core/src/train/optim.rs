use serde::{Deserialize, Serialize};

use super::bptt::Gradients;
use crate::snn::{LifParams, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    Sgd,
    #[default]
    AdaptiveMoment,
}

const BETA1: f32 = 0.9;
const BETA2: f32 = 0.999;
const EPSILON: f32 = 1e-8;
/// Smallest gap kept between a trainable threshold and reset potential.
const MIN_THRESHOLD_GAP: f32 = 1e-3;

/// Optimizer with its moment estimates (unused by SGD).
#[derive(Debug, Clone, PartialEq)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    pub learning_rate: f32,
    pub step: u64,
    pub first_moment: Gradients<f32>,
    pub second_moment: Gradients<f32>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f32, net: &Network<f32>) -> Self {
        Self {
            kind,
            learning_rate,
            step: 0,
            first_moment: Gradients::zeros_like(net),
            second_moment: Gradients::zeros_like(net),
        }
    }

    /// Apply one update. LIF constants move only when `train_lif` is set.
    pub fn apply(&mut self, net: &mut Network<f32>, grads: &Gradients<f32>, train_lif: bool) {
        self.step += 1;
        let rule = Rule {
            kind: self.kind,
            lr: self.learning_rate,
            correction1: 1.0 - BETA1.powi(self.step.min(i32::MAX as u64) as i32),
            correction2: 1.0 - BETA2.powi(self.step.min(i32::MAX as u64) as i32),
        };
        for (((p, g), m), v) in net
            .params
            .iter_mut()
            .zip(&grads.params)
            .zip(&mut self.first_moment.params)
            .zip(&mut self.second_moment.params)
        {
            rule.update_slice(&mut p.weight, &g.weight, &mut m.weight, &mut v.weight);
            rule.update_slice(&mut p.bias, &g.bias, &mut m.bias, &mut v.bias);
        }
        if train_lif {
            let lif = &mut net.spec.lif;
            let (m, v) = (&mut self.first_moment.lif, &mut self.second_moment.lif);
            rule.update(
                &mut lif.v_threshold,
                grads.lif.v_threshold,
                &mut m.v_threshold,
                &mut v.v_threshold,
            );
            rule.update(
                &mut lif.v_reset,
                grads.lif.v_reset,
                &mut m.v_reset,
                &mut v.v_reset,
            );
            rule.update(
                &mut lif.delta_v,
                grads.lif.delta_v,
                &mut m.delta_v,
                &mut v.delta_v,
            );
            project_lif(lif);
        }
    }
}

fn project_lif(lif: &mut LifParams) {
    lif.delta_v = lif.delta_v.max(0.0);
    if lif.v_threshold < lif.v_reset + MIN_THRESHOLD_GAP {
        lif.v_threshold = lif.v_reset + MIN_THRESHOLD_GAP;
    }
}

struct Rule {
    kind: OptimizerKind,
    lr: f32,
    correction1: f32,
    correction2: f32,
}

impl Rule {
    #[inline]
    fn update(&self, p: &mut f32, g: f32, m: &mut f32, v: &mut f32) {
        match self.kind {
            OptimizerKind::Sgd => *p -= self.lr * g,
            OptimizerKind::AdaptiveMoment => {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                let m_hat = *m / self.correction1;
                let v_hat = *v / self.correction2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + EPSILON);
            }
        }
    }

    fn update_slice(&self, p: &mut [f32], g: &[f32], m: &mut [f32], v: &mut [f32]) {
        for (((p, &g), m), v) in p.iter_mut().zip(g).zip(m).zip(v) {
            self.update(p, g, m, v);
        }
    }
}
