//! MIT-format annotation files (`.atr`).
//!
//! The file is a stream of little-endian 16-bit words. The top 6 bits hold
//! the annotation type, the low 10 bits a time increment (or an argument
//! for pseudo-annotations):
//!
//! | type | meaning                                                        |
//! |------|----------------------------------------------------------------|
//! | 0, increment 0 | end of file                                          |
//! | 59 SKIP | next 4 bytes: signed 32-bit increment, high word first      |
//! | 60 NUM, 61 SUB, 62 CHN | attribute of the next annotation (ignored)   |
//! | 63 AUX | increment field is a byte count; that many bytes follow, padded to even |
//! | other | an annotation of that type, `increment` ticks after the last  |

use super::BeatAnnotation;
use crate::error::{Error, Result};

const SKIP: u16 = 59;
const NUM: u16 = 60;
const SUB: u16 = 61;
const CHN: u16 = 62;
const AUX: u16 = 63;

/// Mnemonics for annotation codes 0..=49 (`ecgcodes.h`).
const MNEMONICS: [char; 50] = [
    ' ', 'N', 'L', 'R', 'a', 'V', 'F', 'J', 'A', 'S', // 0-9
    'E', 'j', '/', 'Q', '~', ' ', '|', ' ', 's', 'T', // 10-19
    '*', 'D', '"', '=', 'p', 'B', '^', 't', '+', 'u', // 20-29
    '?', '!', '[', ']', 'e', 'n', '@', 'x', 'f', '(', // 30-39
    ')', 'r', ' ', ' ', ' ', ' ', ' ', ' ', ' ', ' ', // 40-49
];

pub fn code_to_symbol(code: u16) -> char {
    MNEMONICS.get(usize::from(code)).copied().unwrap_or(' ')
}

/// Reverse lookup; `None` for characters that are not annotation mnemonics.
pub fn symbol_to_code(symbol: char) -> Option<u16> {
    if symbol == ' ' {
        return None;
    }
    MNEMONICS
        .iter()
        .position(|&c| c == symbol)
        .map(|p| p as u16)
}

struct Words<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Words<'_> {
    fn word(&mut self) -> Option<Result<u16>> {
        match self.bytes.len() - self.pos {
            0 => None,
            1 => Some(Err(Error::parse(format!(
                "annotation: dangling byte at offset {}",
                self.pos
            )))),
            _ => {
                let w = u16::from_le_bytes([self.bytes[self.pos], self.bytes[self.pos + 1]]);
                self.pos += 2;
                Some(Ok(w))
            }
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::parse(format!(
                "annotation: {what} escape at offset {} runs past end of file",
                self.pos - 2
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

pub fn parse_annotations(annotation_bytes: &[u8]) -> Result<Vec<BeatAnnotation>> {
    let mut words = Words {
        bytes: annotation_bytes,
        pos: 0,
    };
    let mut time: i64 = 0;
    let mut out = Vec::new();

    while let Some(word) = words.word() {
        let word = word?;
        let code = word >> 10;
        let arg = word & 0x03FF;
        match code {
            0 if arg == 0 => break,
            SKIP => {
                let b = words.take(4, "SKIP")?;
                let hi = u16::from_le_bytes([b[0], b[1]]);
                let lo = u16::from_le_bytes([b[2], b[3]]);
                time += i64::from(((u32::from(hi) << 16) | u32::from(lo)) as i32);
            }
            NUM | SUB | CHN => {}
            AUX => {
                let n = usize::from(arg);
                words.take(n + (n & 1), "AUX")?;
            }
            _ => {
                time += i64::from(arg);
                let index = usize::try_from(time).map_err(|_| {
                    Error::parse(format!("annotation: negative sample index {time}"))
                })?;
                out.push(BeatAnnotation::new(index, code_to_symbol(code)));
            }
        }
    }
    Ok(out)
}

/// Encode `(sample_index, code)` pairs, sorted by index, into MIT format.
/// Increments above 1023 use a SKIP escape.
pub fn encode_annotations(annotations: &[(usize, u16)]) -> Vec<u8> {
    let mut out = Vec::with_capacity(annotations.len() * 2 + 2);
    let mut last = 0usize;
    for &(index, code) in annotations {
        debug_assert!(index >= last && (1..SKIP).contains(&code));
        let mut delta = index - last;
        if delta > 0x03FF {
            let d = delta as u32;
            out.extend((SKIP << 10).to_le_bytes());
            out.extend(((d >> 16) as u16).to_le_bytes());
            out.extend((d as u16).to_le_bytes());
            delta = 0;
        }
        out.extend(((code << 10) | delta as u16).to_le_bytes());
        last = index;
    }
    out.extend([0, 0]);
    out
}
