use std::fmt;

use serde::{Deserialize, Serialize};

/// AAMI beat grouping of MIT-BIH annotation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AamiClass {
    N,
    Sveb,
    Veb,
    F,
    Q,
    NonBeat,
}

impl AamiClass {
    /// The four-way classification target, if this class is one.
    pub fn beat_class(self) -> Option<BeatClass> {
        match self {
            Self::N => Some(BeatClass::N),
            Self::Sveb => Some(BeatClass::Sveb),
            Self::Veb => Some(BeatClass::Veb),
            Self::F => Some(BeatClass::F),
            Self::Q | Self::NonBeat => None,
        }
    }
}

impl fmt::Display for AamiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::N => "N",
            Self::Sveb => "SVEB",
            Self::Veb => "VEB",
            Self::F => "F",
            Self::Q => "Q",
            Self::NonBeat => "non-beat",
        };
        f.write_str(s)
    }
}

/// The classes a beat window can carry (Q and non-beats are dropped).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BeatClass {
    N,
    Sveb,
    Veb,
    F,
}

impl BeatClass {
    pub const ALL: [BeatClass; 4] = [Self::N, Self::Sveb, Self::Veb, Self::F];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn aami(self) -> AamiClass {
        match self {
            Self::N => AamiClass::N,
            Self::Sveb => AamiClass::Sveb,
            Self::Veb => AamiClass::Veb,
            Self::F => AamiClass::F,
        }
    }
}

impl fmt::Display for BeatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.aami().fmt(f)
    }
}

/// Standard AAMI EC57 grouping. Total over every annotation mnemonic.
pub fn map_to_aami(symbol: char) -> AamiClass {
    match symbol {
        'N' | 'L' | 'R' | 'e' | 'j' => AamiClass::N,
        'A' | 'a' | 'J' | 'S' => AamiClass::Sveb,
        'V' | 'E' => AamiClass::Veb,
        'F' => AamiClass::F,
        'Q' | '/' | 'f' => AamiClass::Q,
        _ => AamiClass::NonBeat,
    }
}
