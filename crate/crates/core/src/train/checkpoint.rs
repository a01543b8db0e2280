use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::bptt::{Gradients, LifGrads};
use super::data::InputEncoding;
use super::optim::{Optimizer, OptimizerKind};
use super::{ModelKind, TrainConfig};
use crate::error::{Error, Result};
use crate::snn::weights::{network_from_file, network_tensors, WeightFile};
use crate::snn::{LayerParams, Network};

/// One row of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 1-based.
    pub epoch: usize,
    /// Running accuracy over the epoch, measured before each batch update.
    pub train_acc: f64,
    pub test_acc: f64,
    pub loss: f64,
    /// Mean firing rate of each LIF layer (empty for the CNN).
    pub firing_rates: Vec<f64>,
}

pub const TRAINING_LOG_HEADER: &str = "epoch,train_acc,test_acc,loss,mean_firing_rates";

impl EpochLog {
    /// CSV row matching [`TRAINING_LOG_HEADER`]; rates are `;`-separated.
    pub fn csv_row(&self) -> String {
        let rates: Vec<String> = self
            .firing_rates
            .iter()
            .map(|r| format!("{r:.6}"))
            .collect();
        format!(
            "{},{:.6},{:.6},{:.6},{}",
            self.epoch,
            self.train_acc,
            self.test_acc,
            self.loss,
            rates.join(";")
        )
    }
}

/// Complete training state after `epoch` epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: ModelKind,
    pub network: Network,
    pub epoch: usize,
    pub history: Vec<EpochLog>,
    pub optimizer: Optimizer,
    pub config: TrainConfig,
    pub encoding: Option<InputEncoding>,
}

#[derive(Serialize, Deserialize)]
struct OptimizerHeader {
    kind: OptimizerKind,
    learning_rate: f32,
    step: u64,
}

#[derive(Serialize, Deserialize)]
struct RngState {
    seed: u64,
    /// Index of the next epoch's shuffle stream.
    next_stream: u64,
}

impl Checkpoint {
    pub fn initial(
        kind: ModelKind,
        network: Network,
        config: &TrainConfig,
        encoding: Option<InputEncoding>,
    ) -> Self {
        let optimizer = Optimizer::new(config.optimizer, config.learning_rate as f32, &network);
        Self {
            kind,
            network,
            epoch: 0,
            history: Vec::new(),
            optimizer,
            config: config.clone(),
            encoding,
        }
    }

    pub fn best_test_accuracy(&self) -> Option<f64> {
        self.history.iter().map(|h| h.test_acc).reduce(f64::max)
    }

    pub fn to_weight_file(&self) -> WeightFile {
        let mut header = Map::new();
        header.insert("format".into(), json!("ecgspike-checkpoint"));
        header.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        header.insert("model".into(), json!(self.kind));
        header.insert(
            "network".into(),
            serde_json::to_value(&self.network.spec).expect("spec"),
        );
        header.insert("epoch".into(), json!(self.epoch));
        header.insert(
            "history".into(),
            serde_json::to_value(&self.history).expect("history"),
        );
        header.insert(
            "rng_state".into(),
            serde_json::to_value(RngState {
                seed: self.config.seed,
                next_stream: self.epoch as u64,
            })
            .expect("rng"),
        );
        header.insert(
            "train_config".into(),
            serde_json::to_value(&self.config).expect("config"),
        );
        header.insert(
            "encoding".into(),
            serde_json::to_value(self.encoding).expect("encoding"),
        );
        header.insert(
            "optimizer".into(),
            serde_json::to_value(OptimizerHeader {
                kind: self.optimizer.kind,
                learning_rate: self.optimizer.learning_rate,
                step: self.optimizer.step,
            })
            .expect("optimizer"),
        );
        let mut tensors = network_tensors(&self.network);
        for (prefix, moments) in [
            ("moment1", &self.optimizer.first_moment),
            ("moment2", &self.optimizer.second_moment),
        ] {
            for (i, p) in moments.params.iter().enumerate() {
                if self.network.spec.layers[i].has_weights() {
                    tensors.push((format!("{prefix}.layer{i}.weight"), p.weight.clone()));
                    tensors.push((format!("{prefix}.layer{i}.bias"), p.bias.clone()));
                }
            }
            let l = moments.lif;
            tensors.push((
                format!("{prefix}.lif"),
                vec![l.v_threshold, l.v_reset, l.delta_v],
            ));
        }
        WeightFile { header, tensors }
    }

    pub fn from_weight_file(file: &WeightFile) -> Result<Self> {
        let field = |key: &str| -> Result<Value> {
            file.header
                .get(key)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("checkpoint header lacks \"{key}\"")))
        };
        if field("format")? != json!("ecgspike-checkpoint") {
            return Err(Error::Parse("not a checkpoint file".into()));
        }
        let network = network_from_file(file)?;
        let opt: OptimizerHeader = serde_json::from_value(field("optimizer")?)?;
        let moments = |prefix: &str| -> Result<Gradients<f32>> {
            let mut g = Gradients::zeros_like(&network);
            for (i, p) in g.params.iter_mut().enumerate() {
                if network.spec.layers[i].has_weights() {
                    *p = LayerParams {
                        weight: tensor(file, &format!("{prefix}.layer{i}.weight"), p.weight.len())?,
                        bias: tensor(file, &format!("{prefix}.layer{i}.bias"), p.bias.len())?,
                    };
                }
            }
            let l = tensor(file, &format!("{prefix}.lif"), 3)?;
            g.lif = LifGrads {
                v_threshold: l[0],
                v_reset: l[1],
                delta_v: l[2],
            };
            Ok(g)
        };
        let optimizer = Optimizer {
            kind: opt.kind,
            learning_rate: opt.learning_rate,
            step: opt.step,
            first_moment: moments("moment1")?,
            second_moment: moments("moment2")?,
        };
        Ok(Self {
            kind: serde_json::from_value(field("model")?)?,
            epoch: serde_json::from_value(field("epoch")?)?,
            history: serde_json::from_value(field("history")?)?,
            config: serde_json::from_value(field("train_config")?)?,
            encoding: serde_json::from_value(field("encoding")?)?,
            network,
            optimizer,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_weight_file().to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_weight_file(&WeightFile::from_bytes(bytes)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn training_log_csv(&self) -> String {
        let mut out = String::from(TRAINING_LOG_HEADER);
        out.push('\n');
        for h in &self.history {
            out.push_str(&h.csv_row());
            out.push('\n');
        }
        out
    }
}

fn tensor(file: &WeightFile, name: &str, len: usize) -> Result<Vec<f32>> {
    match file.tensor(name) {
        Some(t) if t.len() == len => Ok(t.to_vec()),
        Some(t) => Err(Error::Parse(format!(
            "tensor {name}: {} values, expected {len}",
            t.len()
        ))),
        None => Err(Error::Parse(format!("checkpoint lacks tensor {name}"))),
    }
}
