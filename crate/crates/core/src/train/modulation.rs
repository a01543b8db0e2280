//! Firing-rate band penalty that keeps LIF layers from going silent or
//! saturating: `λ · Σ_layers (max(0, lo - r)² + max(0, r - hi)²)`.

use crate::snn::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBand {
    pub weight: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RateBand {
    pub fn penalty<F: Real>(&self, rates: &[F]) -> F {
        rates.iter().map(|&r| self.layer_penalty(r)).sum()
    }

    fn layer_penalty<F: Real>(&self, rate: F) -> F {
        let (lo, hi) = (F::from(self.lo).unwrap(), F::from(self.hi).unwrap());
        let below = (lo - rate).max(F::zero());
        let above = (rate - hi).max(F::zero());
        F::from(self.weight).unwrap() * (below * below + above * above)
    }

    /// d penalty / d rate for one layer.
    pub fn rate_grad<F: Real>(&self, rate: F) -> F {
        let (lo, hi) = (F::from(self.lo).unwrap(), F::from(self.hi).unwrap());
        let two = F::from(2.0).unwrap();
        let below = (lo - rate).max(F::zero());
        let above = (rate - hi).max(F::zero());
        F::from(self.weight).unwrap() * two * (above - below)
    }
}

/// Penalty for per-layer firing rates under a training configuration.
pub fn self_modulation_penalty(firing_rates: &[f64], config: &super::TrainConfig) -> f64 {
    config.rate_band().penalty(firing_rates)
}
