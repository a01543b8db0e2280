//! Synthetic two-lead ECG with beat annotations, used as a stand-in when
//! the MIT-BIH corpus is not available.
//!
//! Each beat is a sum of Gaussian waves (P, Q, R, S, T) placed around the
//! R peak. The four beat classes differ the way their clinical
//! counterparts do:
//!
//! * `N`: regular rhythm, upright P wave, narrow QRS.
//! * `A` (SVEB): premature, inverted early P wave, narrow QRS.
//! * `V` (VEB): premature, no P wave, wide QRS, inverted T wave, followed
//!   by a compensatory pause.
//! * `F`: a blend of the normal and ventricular shapes at near-normal timing.
//!
//! Records also carry amplitude and width variation, baseline wander and
//! white noise, so the classes overlap somewhat.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::corpus::write_wfdb;
use crate::ingest::{
    BeatAnnotation, ChannelInfo, EcgRecord, MITBIH_ADC_GAIN, MITBIH_ADC_RESOLUTION_BITS,
    MITBIH_ADC_ZERO, MITBIH_SAMPLING_RATE_HZ,
};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub duration_s: f64,
    /// Relative frequency of N, SVEB, VEB and F beats.
    pub class_mix: [f64; 4],
    /// Standard deviation of additive white noise.
    pub noise_mv: f64,
    /// Peak amplitude of the sinusoidal baseline wander.
    pub wander_mv: f64,
    /// Standard deviation of low-pass (first-order autoregressive) noise,
    /// standing in for muscle and motion artefacts.
    pub artefact_mv: f64,
    pub artefact_corner_hz: f64,
    /// Range of the per-record amplitude scale.
    pub amplitude_range: (f64, f64),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            duration_s: 300.0,
            class_mix: [0.55, 0.15, 0.15, 0.15],
            noise_mv: 0.03,
            wander_mv: 0.15,
            artefact_mv: 0.0,
            artefact_corner_hz: 8.0,
            amplitude_range: (0.75, 1.25),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Wave {
    offset_s: f64,
    amplitude_mv: f64,
    width_s: f64,
}

const fn w(offset_s: f64, amplitude_mv: f64, width_s: f64) -> Wave {
    Wave {
        offset_s,
        amplitude_mv,
        width_s,
    }
}

const NORMAL: [Wave; 5] = [
    w(-0.20, 0.15, 0.025),
    w(-0.035, -0.12, 0.009),
    w(0.0, 1.2, 0.011),
    w(0.035, -0.25, 0.010),
    w(0.28, 0.30, 0.050),
];
const SUPRAVENTRICULAR: [Wave; 5] = [
    w(-0.12, -0.35, 0.018),
    w(-0.035, -0.12, 0.009),
    w(0.0, 1.15, 0.011),
    w(0.035, -0.25, 0.010),
    w(0.26, 0.28, 0.050),
];
const VENTRICULAR: [Wave; 5] = [
    w(-0.20, 0.0, 0.025),
    w(-0.06, -0.25, 0.022),
    w(0.0, 1.45, 0.032),
    w(0.08, -0.45, 0.030),
    w(0.34, -0.40, 0.070),
];

fn blend(a: &[Wave; 5], b: &[Wave; 5], t: f64) -> [Wave; 5] {
    let mut out = *a;
    for (o, (x, y)) in out.iter_mut().zip(a.iter().zip(b)) {
        *o = w(
            x.offset_s + t * (y.offset_s - x.offset_s),
            x.amplitude_mv + t * (y.amplitude_mv - x.amplitude_mv),
            x.width_s + t * (y.width_s - x.width_s),
        );
    }
    out
}

/// Beat symbol, prematurity factor applied to the preceding RR interval,
/// and the factor applied to the following one.
fn rhythm(class: usize) -> (char, f64, f64) {
    match class {
        0 => ('N', 1.0, 1.0),
        1 => ('A', 0.62, 1.0),
        2 => ('V', 0.68, 1.35),
        _ => ('F', 0.92, 1.05),
    }
}

fn pick_class(rng: &mut SeededRng, mix: &[f64; 4]) -> usize {
    let total: f64 = mix.iter().sum();
    let mut x = rng.unit_f64() * total;
    for (i, &m) in mix.iter().enumerate() {
        if x < m {
            return i;
        }
        x -= m;
    }
    0
}

/// Generate one record at MIT-BIH geometry (360 Hz, 11 bits, gain 200).
pub fn synth_record(record_id: &str, config: &SynthConfig) -> Result<EcgRecord> {
    let (amp_lo, amp_hi) = config.amplitude_range;
    if !(config.duration_s > 2.0)
        || config.class_mix.iter().any(|&m| !(m >= 0.0))
        || !(0.0 < amp_lo && amp_lo <= amp_hi)
        || !(config.artefact_mv >= 0.0 && config.artefact_corner_hz > 0.0)
    {
        return Err(Error::InvalidConfig(
            "synthetic record needs duration > 2 s, non-negative class mix and artefact level, \
             a positive corner frequency and 0 < amplitude_range.0 <= amplitude_range.1"
                .into(),
        ));
    }
    let fs = f64::from(MITBIH_SAMPLING_RATE_HZ);
    let len = (config.duration_s * fs) as usize;
    let mut rng = SeededRng::new(config.seed);
    let amp_scale = amp_lo + (amp_hi - amp_lo) * rng.unit_f64();
    let width_scale = 0.85 + 0.3 * rng.unit_f64();
    let base_rr = 0.65 + 0.35 * rng.unit_f64();
    let fusion = 0.35 + 0.3 * rng.unit_f64();
    let lead2_gain = 0.4 + 0.3 * rng.unit_f64();
    let wander_hz = 0.15 + 0.2 * rng.unit_f64();
    let wander_phase = rng.unit_f64() * std::f64::consts::TAU;

    let mut lead1 = vec![0.0f64; len];
    let mut lead2 = vec![0.0f64; len];
    let mut annotations = Vec::new();
    let mut t_peak = 0.5 + 0.3 * rng.unit_f64();
    let mut next_factor = 1.0;
    loop {
        let class = pick_class(&mut rng, &config.class_mix);
        let (symbol, premature, after) = rhythm(class);
        let rr = base_rr * (1.0 + 0.06 * rng.normal()) * next_factor * premature;
        t_peak += rr.max(0.3);
        next_factor = after;
        let peak = (t_peak * fs).round() as usize;
        if peak + (0.6 * fs) as usize >= len {
            break;
        }
        let shape = match class {
            0 => NORMAL,
            1 => SUPRAVENTRICULAR,
            2 => VENTRICULAR,
            _ => blend(&NORMAL, &VENTRICULAR, fusion),
        };
        let beat_amp = amp_scale * (1.0 + 0.08 * rng.normal());
        let beat_width = width_scale * (1.0 + 0.05 * rng.normal());
        for wave in &shape {
            let centre = t_peak + wave.offset_s * beat_width;
            let sigma = wave.width_s * beat_width;
            let lo = ((centre - 4.0 * sigma) * fs).floor().max(0.0) as usize;
            let hi = (((centre + 4.0 * sigma) * fs).ceil() as usize).min(len - 1);
            for (i, (a, b)) in lead1[lo..=hi]
                .iter_mut()
                .zip(&mut lead2[lo..=hi])
                .enumerate()
            {
                let dt = (lo + i) as f64 / fs - centre;
                let g = wave.amplitude_mv * beat_amp * (-0.5 * (dt / sigma).powi(2)).exp();
                *a += g;
                *b += g * lead2_gain;
            }
        }
        annotations.push(BeatAnnotation::new(peak, symbol));
    }

    let to_counts = |mv: f64| -> i16 {
        let c = (mv * MITBIH_ADC_GAIN).round() as i64 + i64::from(MITBIH_ADC_ZERO);
        c.clamp(0, (1 << MITBIH_ADC_RESOLUTION_BITS) - 1) as i16
    };
    let pole = (-std::f64::consts::TAU * config.artefact_corner_hz / fs).exp();
    let innovation = config.artefact_mv * (1.0 - pole * pole).sqrt();
    let mut artefact = [0.0f64; 2];
    let mut channels = [Vec::with_capacity(len), Vec::with_capacity(len)];
    for i in 0..len {
        let t = i as f64 / fs;
        let wander =
            config.wander_mv * (std::f64::consts::TAU * wander_hz * t + wander_phase).sin();
        for a in &mut artefact {
            *a = pole * *a + innovation * rng.normal();
        }
        channels[0].push(to_counts(
            lead1[i] + wander + artefact[0] + config.noise_mv * rng.normal(),
        ));
        channels[1].push(to_counts(
            lead2[i] + 0.5 * wander + artefact[1] + config.noise_mv * rng.normal(),
        ));
    }
    let info = |description: &str| ChannelInfo {
        description: description.into(),
        gain: MITBIH_ADC_GAIN,
        zero: MITBIH_ADC_ZERO,
    };
    let record = EcgRecord {
        record_id: record_id.to_string(),
        sampling_rate_hz: MITBIH_SAMPLING_RATE_HZ,
        adc_resolution_bits: MITBIH_ADC_RESOLUTION_BITS,
        channel_info: [info("MLII"), info("V1")],
        channels,
        annotations,
    };
    record.validate()?;
    Ok(record)
}

/// Record identifiers of a synthetic corpus of `count` records.
pub fn synth_record_ids(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("s{:03}", i + 1)).collect()
}

/// Generate `count` records into `dir` as WFDB files plus a `RECORDS`
/// list. Record `i` uses seed `SeededRng::derive(config.seed, i)`.
pub fn write_synth_corpus(dir: &Path, count: usize, config: &SynthConfig) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ids = synth_record_ids(count);
    for (i, id) in ids.iter().enumerate() {
        let cfg = SynthConfig {
            seed: SeededRng::derive(config.seed, i as u64).next_u64(),
            ..config.clone()
        };
        write_wfdb(&synth_record(id, &cfg)?, dir)?;
    }
    let list = dir.join("RECORDS");
    fs::write(&list, ids.join("\n") + "\n").map_err(|e| Error::io(list, e))?;
    Ok(ids)
}
