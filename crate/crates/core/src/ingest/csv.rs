//! Plain-text fallback for records without the binary WFDB files.
//!
//! * `<id>.csv`: one row per sample, columns `ch0,ch1` or `index,ch0,ch1`,
//!   integer ADC counts. A non-numeric first row is taken as a header.
//! * `<id>.ann.csv`: rows of `sample,symbol`.
//!
//! Calibration is assumed to be MIT-BIH's (360 Hz, 11 bits, 200 counts/mV,
//! zero 1024).

use super::{
    BeatAnnotation, ChannelInfo, EcgRecord, MITBIH_ADC_GAIN, MITBIH_ADC_RESOLUTION_BITS,
    MITBIH_ADC_ZERO, MITBIH_SAMPLING_RATE_HZ,
};
use crate::error::{Error, Result};

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            (
                i + 1,
                l.split(',')
                    .map(|f| f.trim().trim_matches('\'').trim_matches('"'))
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, f)| !(f.len() == 1 && f[0].is_empty()))
}

fn is_header(fields: &[&str]) -> bool {
    fields.first().is_some_and(|f| f.parse::<f64>().is_err())
}

pub fn parse_signal_csv(record_id: &str, text: &str) -> Result<EcgRecord> {
    let mut ch0 = Vec::new();
    let mut ch1 = Vec::new();
    for (n, (line, fields)) in rows(text).enumerate() {
        if n == 0 && is_header(&fields) {
            continue;
        }
        let (a, b) = match fields.as_slice() {
            [a, b] | [_, a, b] => (a, b),
            _ => {
                return Err(Error::parse(format!(
                    "{record_id}.csv line {line}: expected 2 or 3 columns, got {}",
                    fields.len()
                )))
            }
        };
        let parse = |s: &str| {
            s.parse::<i16>()
                .map_err(|_| Error::parse(format!("{record_id}.csv line {line}: bad sample {s:?}")))
        };
        ch0.push(parse(a)?);
        ch1.push(parse(b)?);
    }
    let info = |d: &str| ChannelInfo {
        description: d.into(),
        gain: MITBIH_ADC_GAIN,
        zero: MITBIH_ADC_ZERO,
    };
    Ok(EcgRecord {
        record_id: record_id.to_string(),
        sampling_rate_hz: MITBIH_SAMPLING_RATE_HZ,
        adc_resolution_bits: MITBIH_ADC_RESOLUTION_BITS,
        channel_info: [info("ch0"), info("ch1")],
        channels: [ch0, ch1],
        annotations: Vec::new(),
    })
}

pub fn parse_annotation_csv(text: &str) -> Result<Vec<BeatAnnotation>> {
    let mut out = Vec::new();
    for (n, (line, fields)) in rows(text).enumerate() {
        if n == 0 && is_header(&fields) {
            continue;
        }
        let [index, symbol] = fields.as_slice() else {
            return Err(Error::parse(format!(
                "annotation csv line {line}: expected sample,symbol"
            )));
        };
        let index: usize = index.parse().map_err(|_| {
            Error::parse(format!("annotation csv line {line}: bad index {index:?}"))
        })?;
        let mut chars = symbol.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(Error::parse(format!(
                "annotation csv line {line}: bad symbol {symbol:?}"
            )));
        };
        out.push(BeatAnnotation::new(index, c));
    }
    Ok(out)
}

pub fn write_signal_csv(record: &EcgRecord) -> String {
    let mut out = String::from("ch0,ch1\n");
    for (a, b) in record.channels[0].iter().zip(&record.channels[1]) {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}

pub fn write_annotation_csv(annotations: &[BeatAnnotation]) -> String {
    let mut out = String::from("sample,symbol\n");
    for a in annotations {
        out.push_str(&format!("{},{}\n", a.sample_index, a.symbol));
    }
    out
}
