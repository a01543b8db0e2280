//! Portable network/checkpoint file.
//!
//! ```text
//! offset  size  content
//! 0       8     magic "ECGSPIKE"
//! 8       4     format version, u32 little-endian (currently 1)
//! 12      4     header length H in bytes, u32 little-endian
//! 16      H     UTF-8 JSON header
//! 16+H    ...   tensor blob: f32 little-endian values
//! ```
//!
//! The header carries a `"tensors"` array of `{"name", "len"}` objects; the
//! blob is those tensors concatenated in that order. Network weights are
//! named `layer{i}.weight` / `layer{i}.bias` with conv weights laid out
//! `[out][in][k]` and FC weights `[out][in]`. All other header keys are
//! free-form metadata.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{LayerParams, Network, NetworkSpec};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"ECGSPIKE";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    len: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightFile {
    /// Metadata, without the `tensors` table.
    pub header: Map<String, Value>,
    pub tensors: Vec<(String, Vec<f32>)>,
}

impl WeightFile {
    pub fn tensor(&self, name: &str) -> Option<&[f32]> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut header = self.header.clone();
        let table: Vec<TensorEntry> = self
            .tensors
            .iter()
            .map(|(name, v)| TensorEntry {
                name: name.clone(),
                len: v.len(),
            })
            .collect();
        header.insert(
            "tensors".into(),
            serde_json::to_value(table).expect("table serializes"),
        );
        let json = serde_json::to_vec(&Value::Object(header)).expect("header serializes");

        let blob_len: usize = self.tensors.iter().map(|(_, v)| v.len() * 4).sum();
        let mut out = Vec::with_capacity(16 + json.len() + blob_len);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, values) in &self.tensors {
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(Error::parse("weight file: bad magic"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::parse(format!(
                "weight file: unsupported version {version}"
            )));
        }
        let header_len = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let header_end = 16usize
            .checked_add(header_len)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| Error::parse("weight file: header runs past end"))?;
        let mut header: Map<String, Value> = serde_json::from_slice(&bytes[16..header_end])?;
        let table: Vec<TensorEntry> = serde_json::from_value(
            header
                .remove("tensors")
                .ok_or_else(|| Error::parse("weight file: header lacks tensor table"))?,
        )?;

        let mut blob = bytes[header_end..].chunks_exact(4);
        if !blob.remainder().is_empty() || blob.len() != table.iter().map(|t| t.len).sum::<usize>()
        {
            return Err(Error::parse(
                "weight file: blob size disagrees with tensor table",
            ));
        }
        let tensors = table
            .into_iter()
            .map(|t| {
                let values = blob
                    .by_ref()
                    .take(t.len)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                (t.name, values)
            })
            .collect();
        Ok(Self { header, tensors })
    }
}

pub fn network_tensors(net: &Network) -> Vec<(String, Vec<f32>)> {
    net.params
        .iter()
        .enumerate()
        .filter(|(i, _)| net.spec.layers[*i].has_weights())
        .flat_map(|(i, p)| {
            [
                (format!("layer{i}.weight"), p.weight.clone()),
                (format!("layer{i}.bias"), p.bias.clone()),
            ]
        })
        .collect()
}

/// Rebuild a network from a file whose header has a `"network"` key.
pub fn network_from_file(file: &WeightFile) -> Result<Network> {
    let spec: NetworkSpec = serde_json::from_value(
        file.header
            .get("network")
            .cloned()
            .ok_or_else(|| Error::parse("weight file: header lacks \"network\""))?,
    )?;
    let mut net = Network::zeros(spec)?;
    for (i, layer) in net.spec.layers.iter().enumerate() {
        if !layer.has_weights() {
            continue;
        }
        let get = |suffix: &str| {
            file.tensor(&format!("layer{i}.{suffix}"))
                .map(<[f32]>::to_vec)
                .ok_or_else(|| Error::parse(format!("weight file: missing layer{i}.{suffix}")))
        };
        net.params[i] = LayerParams {
            weight: get("weight")?,
            bias: get("bias")?,
        };
    }
    net.check_shapes()?;
    Ok(net)
}

pub fn network_to_file(net: &Network) -> WeightFile {
    let mut header = Map::new();
    header.insert(
        "network".into(),
        serde_json::to_value(&net.spec).expect("spec serializes"),
    );
    WeightFile {
        header,
        tensors: network_tensors(net),
    }
}
