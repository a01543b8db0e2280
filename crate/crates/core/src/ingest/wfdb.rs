//! WFDB header (`.hea`) and format-212 signal (`.dat`) reading and writing.
//!
//! Format 212 packs two 12-bit two's-complement samples into three bytes:
//!
//! ```text
//! byte 0: s0 bits 0..8
//! byte 1: low nibble = s0 bits 8..12, high nibble = s1 bits 8..12
//! byte 2: s1 bits 0..8
//! ```

use super::{ChannelInfo, EcgRecord, MITBIH_ADC_GAIN};
use crate::error::{Error, Result};

/// WFDB's default when a header leaves the gain at zero.
const DEFAULT_GAIN: f64 = MITBIH_ADC_GAIN;

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: u16,
    pub gain: f64,
    pub adc_resolution_bits: u32,
    pub adc_zero: i32,
    pub initial_value: Option<i32>,
    pub checksum: Option<i32>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub record_name: String,
    pub sampling_rate_hz: f64,
    pub num_samples: Option<usize>,
    pub signals: Vec<SignalSpec>,
}

fn leading_number(field: &str) -> &str {
    let end = field
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || ((c == '-' || c == '+') && i == 0)))
        .map_or(field.len(), |(i, _)| i);
    &field[..end]
}

fn parse_num<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    leading_number(field)
        .parse()
        .map_err(|_| Error::parse(format!("header: bad {what} field {field:?}")))
}

pub fn parse_header(text: &str) -> Result<Header> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let record_line = lines
        .next()
        .ok_or_else(|| Error::parse("header: missing record line"))?;
    let mut fields = record_line.split_whitespace();
    let record_name = fields
        .next()
        .ok_or_else(|| Error::parse("header: missing record name"))?;
    if record_name.contains('/') {
        return Err(Error::UnsupportedFormat("multi-segment record".into()));
    }
    let nsig: usize = parse_num(
        fields
            .next()
            .ok_or_else(|| Error::parse("header: missing signal count"))?,
        "signal count",
    )?;
    let sampling_rate_hz = match fields.next() {
        // "360", "360/1", "360(0)" all start with the frame rate
        Some(f) => parse_num::<f64>(f, "sampling frequency")?,
        None => 250.0,
    };
    let num_samples = fields
        .next()
        .map(|f| parse_num::<usize>(f, "sample count"))
        .transpose()?
        .filter(|&n| n > 0);

    let mut signals = Vec::with_capacity(nsig);
    for _ in 0..nsig {
        let line = lines
            .next()
            .ok_or_else(|| Error::parse(format!("header: expected {nsig} signal lines")))?;
        signals.push(parse_signal_line(line)?);
    }

    Ok(Header {
        record_name: record_name.to_string(),
        sampling_rate_hz,
        num_samples,
        signals,
    })
}

fn parse_signal_line(line: &str) -> Result<SignalSpec> {
    let mut fields = line.split_whitespace();
    let file_name = fields
        .next()
        .ok_or_else(|| Error::parse("header: empty signal line"))?
        .to_string();
    let format: u16 = parse_num(
        fields
            .next()
            .ok_or_else(|| Error::parse("header: missing signal format"))?,
        "format",
    )?;
    let gain = fields
        .next()
        .map(|f| parse_num::<f64>(f, "gain"))
        .transpose()?
        .filter(|&g| g != 0.0)
        .unwrap_or(DEFAULT_GAIN);
    let adc_resolution_bits = fields
        .next()
        .map(|f| parse_num::<u32>(f, "ADC resolution"))
        .transpose()?
        .filter(|&b| b > 0)
        .unwrap_or(12);
    let adc_zero = fields
        .next()
        .map(|f| parse_num::<i32>(f, "ADC zero"))
        .transpose()?
        .unwrap_or(0);
    let initial_value = fields
        .next()
        .map(|f| parse_num::<i32>(f, "initial value"))
        .transpose()?;
    let checksum = fields
        .next()
        .map(|f| parse_num::<i32>(f, "checksum"))
        .transpose()?;
    let _block_size = fields.next();
    let description = fields.collect::<Vec<_>>().join(" ");

    Ok(SignalSpec {
        file_name,
        format,
        gain,
        adc_resolution_bits,
        adc_zero,
        initial_value,
        checksum,
        description,
    })
}

/// Decode one 212 group into its two samples.
pub fn decode_212(group: [u8; 3]) -> (i16, i16) {
    let [b0, b1, b2] = group.map(u16::from);
    let raw0 = ((b1 & 0x0F) << 8) | b0;
    let raw1 = ((b1 & 0xF0) << 4) | b2;
    (sign_extend_12(raw0), sign_extend_12(raw1))
}

fn sign_extend_12(raw: u16) -> i16 {
    ((raw << 4) as i16) >> 4
}

/// Inverse of [`decode_212`]. Samples must lie in `[-2048, 2047]`.
pub fn encode_212(s0: i16, s1: i16) -> [u8; 3] {
    debug_assert!((-2048..=2047).contains(&s0) && (-2048..=2047).contains(&s1));
    let u0 = s0 as u16 & 0x0FFF;
    let u1 = s1 as u16 & 0x0FFF;
    [
        (u0 & 0xFF) as u8,
        ((u0 >> 8) | ((u1 >> 8) << 4)) as u8,
        (u1 & 0xFF) as u8,
    ]
}

/// Parse a two-signal format-212 record. Annotations are left empty.
pub fn parse_wfdb_212(header_bytes: &[u8], signal_bytes: &[u8]) -> Result<EcgRecord> {
    let text = std::str::from_utf8(header_bytes)
        .map_err(|_| Error::parse("header: not valid UTF-8/ASCII"))?;
    let header = parse_header(text)?;
    if header.signals.len() != 2 {
        return Err(Error::parse(format!(
            "header declares {} signals, expected 2",
            header.signals.len()
        )));
    }
    for s in &header.signals {
        if s.format != 212 {
            return Err(Error::UnsupportedFormat(s.format.to_string()));
        }
    }
    if header.signals[0].file_name != header.signals[1].file_name {
        return Err(Error::UnsupportedFormat(
            "format-212 signals split across files".into(),
        ));
    }
    if !signal_bytes.len().is_multiple_of(3) {
        return Err(Error::parse(format!(
            "signal length {} is not a multiple of 3 (truncated 212 group)",
            signal_bytes.len()
        )));
    }
    let available = signal_bytes.len() / 3;
    let frames = match header.num_samples {
        Some(n) if n > available => {
            return Err(Error::parse(format!(
                "signal truncated: header declares {n} samples, file holds {available}"
            )))
        }
        Some(n) => n,
        None => available,
    };

    let mut ch0 = Vec::with_capacity(frames);
    let mut ch1 = Vec::with_capacity(frames);
    for chunk in signal_bytes.chunks_exact(3).take(frames) {
        let (a, b) = decode_212([chunk[0], chunk[1], chunk[2]]);
        ch0.push(a);
        ch1.push(b);
    }

    for (spec, samples) in header.signals.iter().zip([&ch0, &ch1]) {
        if let Some(init) = spec.initial_value {
            if samples.first().is_some_and(|&s| i32::from(s) != init) {
                return Err(Error::parse(format!(
                    "{}: first sample {} disagrees with header initial value {init}",
                    spec.description, samples[0]
                )));
            }
        }
        if let Some(expected) = spec.checksum {
            let sum = samples
                .iter()
                .fold(0u16, |acc, &s| acc.wrapping_add(s as u16)) as i16;
            if i32::from(sum) != expected {
                return Err(Error::parse(format!(
                    "{}: checksum {sum} disagrees with header {expected}",
                    spec.description
                )));
            }
        }
    }

    let info = |s: &SignalSpec| ChannelInfo {
        description: s.description.clone(),
        gain: s.gain,
        zero: s.adc_zero,
    };
    Ok(EcgRecord {
        record_id: header.record_name.clone(),
        sampling_rate_hz: header.sampling_rate_hz.round() as u32,
        adc_resolution_bits: header.signals[0].adc_resolution_bits,
        channel_info: [info(&header.signals[0]), info(&header.signals[1])],
        channels: [ch0, ch1],
        annotations: Vec::new(),
    })
}

/// Render a header that [`parse_header`] reads back, with checksums.
pub fn write_header(record: &EcgRecord) -> String {
    let dat = format!("{}.dat", record.record_id);
    let mut out = format!(
        "{} 2 {} {}\n",
        record.record_id,
        record.sampling_rate_hz,
        record.len()
    );
    for (info, samples) in record.channel_info.iter().zip(&record.channels) {
        let checksum = samples
            .iter()
            .fold(0u16, |acc, &s| acc.wrapping_add(s as u16)) as i16;
        out.push_str(&format!(
            "{dat} 212 {} {} {} {} {checksum} 0 {}\n",
            info.gain,
            record.adc_resolution_bits,
            info.zero,
            samples.first().copied().unwrap_or(0),
            info.description
        ));
    }
    out
}

pub fn write_signal_212(record: &EcgRecord) -> Vec<u8> {
    record.channels[0]
        .iter()
        .zip(&record.channels[1])
        .flat_map(|(&a, &b)| encode_212(a, b))
        .collect()
}
