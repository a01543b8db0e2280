//! Analytic gradients against central finite differences.

mod common;

use common::gradcheck::{
    clamp_margin, flatten, loss, numeric_weight_grads, random_case, relative_error,
    scnn_weight_error, TOLERANCE,
};
use ecgspike_core::snn::{Frames, LifParams, Network, NetworkSpec};
use ecgspike_core::train::cnn::cnn_sample_gradient;
use ecgspike_core::train::{sample_gradient, BackwardOptions, RateBand, SurrogateSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn scnn_weight_gradients_match_finite_differences(seed in any::<u64>()) {
        let err = scnn_weight_error(seed);
        prop_assert!(err < TOLERANCE, "relative error {err}");
    }

    #[test]
    fn lif_constant_gradients_match_finite_differences(seed in any::<u64>()) {
        let case = random_case(seed);
        prop_assume!(clamp_margin(&case) > 1e-3);
        let analytic = sample_gradient(&case.net, Frames::Static(&case.input), case.label, &case.opts).unwrap();
        let shifted = |f: &dyn Fn(&mut LifParams)| {
            let mut n = case.net.clone();
            f(&mut n.spec.lif);
            loss(&case, &n)
        };
        // LIF constants are stored as f32, so step by an exactly representable amount.
        let hf = 1.0f32 / 262_144.0;
        let h = f64::from(hf);
        let numeric = [
            (shifted(&|p| p.v_threshold += hf) - shifted(&|p| p.v_threshold -= hf)) / (2.0 * h),
            (shifted(&|p| p.v_reset += hf) - shifted(&|p| p.v_reset -= hf)) / (2.0 * h),
            (shifted(&|p| p.delta_v += hf) - shifted(&|p| p.delta_v -= hf)) / (2.0 * h),
        ];
        let g = analytic.grads.lif;
        let err = relative_error(&[g.v_threshold, g.v_reset, g.delta_v], &numeric);
        prop_assert!(err < TOLERANCE, "relative error {err}: {g:?} vs {numeric:?}");
    }

    #[test]
    fn cnn_gradients_match_finite_differences(seed in any::<u64>()) {
        let case = random_case(seed);
        let (_, _, grads) = cnn_sample_gradient(&case.net, &case.input, case.label).unwrap();
        let numeric = numeric_weight_grads(&case, |n| cnn_sample_gradient(n, &case.input, case.label).unwrap().0);
        let err = relative_error(&flatten(&grads), &numeric);
        prop_assert!(err < TOLERANCE, "relative error {err}");
    }
}

#[test]
fn zero_network_output_bias_gradient_is_softmax_minus_one_hot() {
    let spec = NetworkSpec::conv_stack(16, 4, &[2, 2, 2, 2, 2], 6);
    let net = Network::<f64>::zeros(spec).unwrap();
    let readout = net.params.len() - 2;
    let input = vec![0.0; 16];
    let opts = BackwardOptions {
        surrogate: SurrogateSpec::default(),
        band: RateBand {
            weight: 0.0,
            lo: 0.1,
            hi: 0.9,
        },
        detach_reset: true,
        relaxed: false,
    };
    for label in 0..4 {
        let (_, _, g) = cnn_sample_gradient(&net, &input, label).unwrap();
        for (k, &b) in g.params[readout].bias.iter().enumerate() {
            let expected = 0.25 - if k == label { 1.0 } else { 0.0 };
            assert!((b - expected).abs() < 1e-12);
        }
        // The spiking readout sees the same logit gradient, spread over the
        // steps and gated by the surrogate at the resting potential.
        let s = sample_gradient(&net, Frames::Static(&input), label, &opts).unwrap();
        assert!((s.loss - 4f64.ln()).abs() < 1e-12);
        assert!(s.grads.params[readout].bias.iter().all(|&b| b == 0.0));
    }
}
