//! Cycle-count model comparing a conventional CNN with its spiking twin.
//!
//! For a conv layer with output map `M_H x M_W`, kernel `K_H x K_W` and
//! `C_in -> C_out` channels, and an FC layer `N_in -> N_out`:
//!
//! ```text
//! TC_CNN  = Σ M_H·M_W·(K_H·K_W + K_H + K_W - 1)·C_in·C_out·Ops·bit + Σ N_in·N_out·Ops·bit
//! TC_SCNN = Σ M_H·M_W·(K_H + K_W - 1)·C_in·C_out·Ops·bit·t        + Σ N_in·N_out·Ops·bit·t
//! ```
//!
//! `Ops` is the cycle cost of one operation (add 1, branch 1, multiply 10).
//! The model applies it as one factor; [`OpCosts`] offers that literal
//! reading and a decomposed one that charges the `K_H·K_W` products as
//! multiplies and the rest as adds.
//!
//! The `K_H·K_W + K_H + K_W - 1` per-output count differs from the
//! `K_H·K_W` multiplies and `K_H·K_W - 1` adds of a plain 2-D kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvDims {
    pub m_h: u64,
    pub m_w: u64,
    pub k_h: u64,
    pub k_w: u64,
    pub c_in: u64,
    pub c_out: u64,
}

impl ConvDims {
    fn map_channels(&self) -> u64 {
        self.m_h * self.m_w * self.c_in * self.c_out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcDims {
    pub n_in: u64,
    pub n_out: u64,
}

/// How `Ops` is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum OpCosts {
    /// One factor for every operation of the network.
    StrictLiteral { ops: u64 },
    /// CNN: `K_H·K_W` products at `mul`, `K_H + K_W - 1` at `add`; FC weights
    /// at `mul + add` when `fc_mac`, else at `mul`. SCNN: every operation
    /// costs `add + branch`.
    Decomposition {
        mul: u64,
        add: u64,
        branch: u64,
        fc_mac: bool,
    },
}

impl OpCosts {
    pub const STANDARD_DECOMPOSITION: OpCosts = OpCosts::Decomposition {
        mul: 10,
        add: 1,
        branch: 1,
        fc_mac: true,
    };

    pub fn label(&self) -> String {
        match *self {
            Self::StrictLiteral { ops } => format!("strict(ops={ops})"),
            Self::Decomposition {
                mul,
                add,
                branch,
                fc_mac,
            } => format!(
                "decomposition(mul={mul},add={add},branch={branch},fc={})",
                if fc_mac { "mac" } else { "mul" }
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    pub conv_layers: Vec<ConvDims>,
    pub fc_layers: Vec<FcDims>,
    pub ops: OpCosts,
    /// Width of the inter-layer dataflow in bits.
    pub bit: u64,
    /// Simulation time steps (spiking network only).
    pub t: u64,
}

fn warn_if_empty(params: &ComplexityParams) {
    if params.conv_layers.is_empty() && params.fc_layers.is_empty() {
        log::warn!("complexity: no conv or FC layers; cycle count is 0");
    }
}

pub fn tc_cnn(params: &ComplexityParams) -> u64 {
    warn_if_empty(params);
    let conv_cost = |c: &ConvDims| match params.ops {
        OpCosts::StrictLiteral { ops } => (c.k_h * c.k_w + c.k_h + c.k_w - 1) * ops,
        OpCosts::Decomposition { mul, add, .. } => c.k_h * c.k_w * mul + (c.k_h + c.k_w - 1) * add,
    };
    let fc_cost = match params.ops {
        OpCosts::StrictLiteral { ops } => ops,
        OpCosts::Decomposition {
            mul, add, fc_mac, ..
        } => {
            if fc_mac {
                mul + add
            } else {
                mul
            }
        }
    };
    let conv: u64 = params
        .conv_layers
        .iter()
        .map(|c| c.map_channels() * conv_cost(c) * params.bit)
        .sum();
    let fc: u64 = params
        .fc_layers
        .iter()
        .map(|f| f.n_in * f.n_out * fc_cost * params.bit)
        .sum();
    conv + fc
}

pub fn tc_scnn(params: &ComplexityParams) -> u64 {
    warn_if_empty(params);
    let per_op = match params.ops {
        OpCosts::StrictLiteral { ops } => ops,
        OpCosts::Decomposition { add, branch, .. } => add + branch,
    };
    let conv: u64 = params
        .conv_layers
        .iter()
        .map(|c| c.map_channels() * (c.k_h + c.k_w - 1) * per_op * params.bit * params.t)
        .sum();
    let fc: u64 = params
        .fc_layers
        .iter()
        .map(|f| f.n_in * f.n_out * per_op * params.bit * params.t)
        .sum();
    conv + fc
}

/// `1 - scnn / cnn`.
pub fn reduction_ratio(cnn: u64, scnn: u64) -> Result<f64> {
    if cnn == 0 {
        return Err(Error::Division);
    }
    Ok(1.0 - scnn as f64 / cnn as f64)
}

/// One CNN-vs-SCNN comparison under a named cost interpretation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationRow {
    pub mode: String,
    pub cnn_ops: OpCosts,
    pub scnn_ops: OpCosts,
    pub t: u64,
    pub cnn_bit: u64,
    pub scnn_bit: u64,
    pub tc_cnn: u64,
    pub tc_scnn: u64,
    pub reduction: f64,
}

/// The cost readings reported side by side: (name, CNN costs, SCNN costs).
pub fn interpretations() -> Vec<(&'static str, OpCosts, OpCosts)> {
    vec![
        (
            // CNN charged as multiplies, SCNN as adds, one factor each
            "strict-mul-vs-add",
            OpCosts::StrictLiteral { ops: 10 },
            OpCosts::StrictLiteral { ops: 1 },
        ),
        (
            "decomposition",
            OpCosts::STANDARD_DECOMPOSITION,
            OpCosts::STANDARD_DECOMPOSITION,
        ),
        (
            // only kernel-term, bit-width and t differ
            "equal-cost",
            OpCosts::StrictLiteral { ops: 1 },
            OpCosts::StrictLiteral { ops: 1 },
        ),
    ]
}

/// Evaluate every interpretation at every `t`, CNN at 32-bit dataflow and
/// SCNN at 1-bit.
pub fn interpretation_table(
    conv_layers: &[ConvDims],
    fc_layers: &[FcDims],
    time_steps: &[u64],
) -> Result<Vec<InterpretationRow>> {
    let mut rows = Vec::new();
    for (mode, cnn_ops, scnn_ops) in interpretations() {
        for &t in time_steps {
            let cnn = ComplexityParams {
                conv_layers: conv_layers.to_vec(),
                fc_layers: fc_layers.to_vec(),
                ops: cnn_ops,
                bit: 32,
                t,
            };
            let scnn = ComplexityParams {
                ops: scnn_ops,
                bit: 1,
                ..cnn.clone()
            };
            let (tc_cnn, tc_scnn) = (tc_cnn(&cnn), tc_scnn(&scnn));
            rows.push(InterpretationRow {
                mode: mode.to_string(),
                cnn_ops,
                scnn_ops,
                t,
                cnn_bit: 32,
                scnn_bit: 1,
                tc_cnn,
                tc_scnn,
                reduction: reduction_ratio(tc_cnn, tc_scnn)?,
            });
        }
    }
    Ok(rows)
}
