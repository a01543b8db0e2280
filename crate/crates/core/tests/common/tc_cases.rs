//! Cycle counts substituted by hand into the two complexity formulas.

use ecgspike_core::complexity::{ComplexityParams, ConvDims, FcDims, OpCosts};

pub struct TcCase {
    /// `[M_H, M_W, K_H, K_W, C_in, C_out]` per conv layer.
    pub conv: &'static [[u64; 6]],
    /// `[N_in, N_out]` per FC layer.
    pub fc: &'static [[u64; 2]],
    pub ops: OpCosts,
    pub bit: u64,
    pub t: u64,
    pub tc_cnn: u64,
    pub tc_scnn: u64,
}

impl TcCase {
    pub fn params(&self) -> ComplexityParams {
        ComplexityParams {
            conv_layers: self
                .conv
                .iter()
                .map(|&[m_h, m_w, k_h, k_w, c_in, c_out]| ConvDims {
                    m_h,
                    m_w,
                    k_h,
                    k_w,
                    c_in,
                    c_out,
                })
                .collect(),
            fc_layers: self
                .fc
                .iter()
                .map(|&[n_in, n_out]| FcDims { n_in, n_out })
                .collect(),
            ops: self.ops,
            bit: self.bit,
            t: self.t,
        }
    }
}

pub const TC_CASES: &[TcCase] = &[
    TcCase {
        conv: &[[1, 4, 1, 3, 1, 2]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 32,
        t: 10,
        tc_cnn: 15360,
        tc_scnn: 76800,
    },
    TcCase {
        conv: &[],
        fc: &[[10, 4]],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 32,
        t: 3,
        tc_cnn: 12800,
        tc_scnn: 38400,
    },
    TcCase {
        conv: &[[1, 4, 1, 3, 1, 2]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 1 },
        bit: 1,
        t: 10,
        tc_cnn: 48,
        tc_scnn: 240,
    },
    TcCase {
        conv: &[[1, 4, 1, 3, 1, 2]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 1 },
        bit: 1,
        t: 20,
        tc_cnn: 48,
        tc_scnn: 480,
    },
    TcCase {
        conv: &[[1, 4, 1, 3, 1, 2]],
        fc: &[[10, 4]],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: true,
        },
        bit: 32,
        t: 5,
        tc_cnn: 22528,
        tc_scnn: 20480,
    },
    TcCase {
        conv: &[],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 32,
        t: 5,
        tc_cnn: 0,
        tc_scnn: 0,
    },
    TcCase {
        conv: &[
            [1, 320, 1, 3, 1, 8],
            [1, 320, 1, 3, 8, 16],
            [1, 160, 1, 3, 16, 16],
            [1, 160, 1, 3, 16, 32],
            [1, 80, 1, 3, 32, 32],
        ],
        fc: &[[2560, 64], [64, 4]],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: true,
        },
        bit: 32,
        t: 8,
        tc_cnn: 319987712,
        tc_scnn: 465436672,
    },
    TcCase {
        conv: &[
            [1, 320, 1, 3, 1, 8],
            [1, 320, 1, 3, 8, 16],
            [1, 160, 1, 3, 16, 16],
            [1, 160, 1, 3, 16, 32],
            [1, 80, 1, 3, 32, 32],
        ],
        fc: &[[2560, 64], [64, 4]],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 32,
        t: 8,
        tc_cnn: 529285120,
        tc_scnn: 2327183360,
    },
    TcCase {
        conv: &[[28, 28, 5, 5, 1, 6]],
        fc: &[[120, 84]],
        ops: OpCosts::StrictLiteral { ops: 1 },
        bit: 1,
        t: 1,
        tc_cnn: 170016,
        tc_scnn: 52416,
    },
    TcCase {
        conv: &[[3, 3, 3, 3, 2, 2]],
        fc: &[],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 8,
        t: 2,
        tc_cnn: 27360,
        tc_scnn: 5760,
    },
    TcCase {
        conv: &[[3, 45, 5, 1, 8, 4], [1, 11, 1, 5, 8, 4]],
        fc: &[[70, 2]],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 8,
        t: 0,
        tc_cnn: 2066880,
        tc_scnn: 0,
    },
    TcCase {
        conv: &[[4, 18, 1, 7, 3, 2]],
        fc: &[],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 32,
        t: 8,
        tc_cnn: 1064448,
        tc_scnn: 1548288,
    },
    TcCase {
        conv: &[[1, 1, 1, 3, 3, 3]],
        fc: &[[41, 4]],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 8,
        t: 11,
        tc_cnn: 15496,
        tc_scnn: 33616,
    },
    TcCase {
        conv: &[[4, 20, 1, 5, 7, 3]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 3 },
        bit: 1,
        t: 21,
        tc_cnn: 50400,
        tc_scnn: 529200,
    },
    TcCase {
        conv: &[[1, 39, 5, 5, 2, 5], [3, 20, 3, 5, 3, 8]],
        fc: &[[91, 3]],
        ops: OpCosts::StrictLiteral { ops: 1 },
        bit: 16,
        t: 1,
        tc_cnn: 723408,
        tc_scnn: 221808,
    },
    TcCase {
        conv: &[[4, 2, 5, 7, 6, 7], [1, 29, 1, 3, 4, 2]],
        fc: &[],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: true,
        },
        bit: 16,
        t: 32,
        tc_cnn: 2063232,
        tc_scnn: 4497408,
    },
    TcCase {
        conv: &[[3, 50, 3, 1, 6, 5], [1, 28, 1, 3, 6, 6]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 3 },
        bit: 16,
        t: 34,
        tc_cnn: 1586304,
        tc_scnn: 26967168,
    },
    TcCase {
        conv: &[],
        fc: &[[88, 6]],
        ops: OpCosts::StrictLiteral { ops: 3 },
        bit: 8,
        t: 5,
        tc_cnn: 12672,
        tc_scnn: 63360,
    },
    TcCase {
        conv: &[[3, 31, 1, 1, 2, 7]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 16,
        t: 16,
        tc_cnn: 416640,
        tc_scnn: 3333120,
    },
    TcCase {
        conv: &[[4, 10, 1, 1, 8, 6], [2, 9, 5, 3, 7, 2], [2, 28, 3, 3, 1, 7]],
        fc: &[[19, 8]],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 8,
        t: 33,
        tc_cnn: 795552,
        tc_scnn: 3060288,
    },
    TcCase {
        conv: &[
            [4, 45, 5, 5, 8, 5],
            [3, 31, 3, 3, 2, 7],
            [2, 41, 3, 5, 3, 2],
        ],
        fc: &[[35, 9]],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 16,
        t: 4,
        tc_cnn: 33102144,
        tc_scnn: 9608832,
    },
    TcCase {
        conv: &[[1, 49, 3, 5, 5, 8], [3, 50, 5, 5, 6, 3]],
        fc: &[[2, 8], [71, 5]],
        ops: OpCosts::StrictLiteral { ops: 3 },
        bit: 16,
        t: 29,
        tc_cnn: 6493968,
        tc_scnn: 53440272,
    },
    TcCase {
        conv: &[[3, 23, 3, 5, 7, 6], [2, 45, 3, 5, 6, 3]],
        fc: &[[22, 4], [47, 8]],
        ops: OpCosts::StrictLiteral { ops: 3 },
        bit: 1,
        t: 26,
        tc_cnn: 299580,
        tc_scnn: 2503020,
    },
    TcCase {
        conv: &[[4, 20, 5, 5, 1, 4]],
        fc: &[],
        ops: OpCosts::Decomposition {
            mul: 10,
            add: 1,
            branch: 1,
            fc_mac: false,
        },
        bit: 32,
        t: 39,
        tc_cnn: 2652160,
        tc_scnn: 7188480,
    },
    TcCase {
        conv: &[[2, 49, 5, 3, 1, 8]],
        fc: &[],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 1,
        t: 8,
        tc_cnn: 172480,
        tc_scnn: 439040,
    },
    TcCase {
        conv: &[],
        fc: &[[24, 8]],
        ops: OpCosts::StrictLiteral { ops: 10 },
        bit: 1,
        t: 26,
        tc_cnn: 1920,
        tc_scnn: 49920,
    },
];
