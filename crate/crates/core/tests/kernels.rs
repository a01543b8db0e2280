mod common;

use common::mac::{dense_conv, dense_fc, ternary};
use ecgspike_core::ingest::wfdb::{decode_212, encode_212};
use ecgspike_core::rng::SeededRng;
use ecgspike_core::snn::layers::{conv1d_forward, fc_forward, ConvGeometry};
use ecgspike_core::snn::spec::conv_out_len;
use ecgspike_core::snn::Padding;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spike_conv_equals_dense_mac(
        seed in any::<u64>(),
        in_channels in 1usize..4,
        out_channels in 1usize..5,
        kernel in 1usize..6,
        stride in 1usize..3,
        in_len in 1usize..40,
        same in any::<bool>(),
        density in 0.0f64..1.0,
    ) {
        let padding = if same { Padding::Same } else { Padding::Valid };
        let Some(out_len) = conv_out_len(in_len, kernel, stride, padding) else {
            return Ok(());
        };
        let g = ConvGeometry { in_channels, out_channels, kernel, stride, padding, in_len, out_len };
        let mut rng = SeededRng::new(seed);
        let input = ternary(&mut rng, in_channels * in_len, density);
        let weight: Vec<f32> = (0..out_channels * in_channels * kernel).map(|_| rng.symmetric_f32(1.0)).collect();
        let mut out = vec![f32::NAN; out_channels * out_len];
        conv1d_forward(&g, &input, &weight, &mut out);
        prop_assert_eq!(out, dense_conv(&g, &input, &weight));
    }

    #[test]
    fn spike_fc_equals_dense_mac(seed in any::<u64>(), n_in in 1usize..60, n_out in 1usize..8, density in 0.0f64..1.0) {
        let mut rng = SeededRng::new(seed);
        let input = ternary(&mut rng, n_in, density);
        let weight: Vec<f32> = (0..n_in * n_out).map(|_| rng.symmetric_f32(1.0)).collect();
        let mut out = vec![f32::NAN; n_out];
        fc_forward(n_in, &input, &weight, &mut out);
        prop_assert_eq!(out, dense_fc(n_in, &input, &weight));
    }
}

#[test]
fn format_212_round_trips_a_million_groups() {
    let mut rng = SeededRng::new(212);
    for _ in 0..1_000_000 {
        let word = rng.next_u64();
        let group = [word as u8, (word >> 8) as u8, (word >> 16) as u8];
        let (s0, s1) = decode_212(group);
        assert!((-2048..=2047).contains(&s0) && (-2048..=2047).contains(&s1));
        assert_eq!(encode_212(s0, s1), group);

        let a = (word >> 24) as i16 & 0x0FFF;
        let b = (word >> 40) as i16 & 0x0FFF;
        let (a, b) = (a - 2048, b - 2048);
        assert_eq!(decode_212(encode_212(a, b)), (a, b));
    }
}

#[test]
fn format_212_extremes() {
    for (s0, s1) in [(-2048, 2047), (2047, -2048), (0, -1), (-1, 0), (0, 0)] {
        assert_eq!(decode_212(encode_212(s0, s1)), (s0, s1));
    }
}
