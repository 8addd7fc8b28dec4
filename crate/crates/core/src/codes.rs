//! Hamming codes Ham(2^r - 1, 2^r - r - 1) with 1-based bit positions.
//!
//! Parity bits sit at the power-of-two positions and data bits fill the
//! remaining positions in ascending order. Column `j` of the parity-check
//! matrix is the binary representation of `j + 1`, so the syndrome of a
//! single flipped bit is that bit's position.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest redundancy supported: codewords (plus the extended parity bit)
/// must fit in a `u64`.
pub const MAX_R: u32 = 6;

/// A fixed-width bit string. Index 0 is the leftmost bit when printed, which
/// for a codeword is position 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitWord {
    bits: u64,
    len: u32,
}

impl BitWord {
    pub fn zeros(len: u32) -> Self {
        assert!(len <= 64, "BitWord holds at most 64 bits");
        Self { bits: 0, len }
    }

    /// Builds a word from the low `len` bits of `bits`, bit `i` of the integer
    /// becoming index `i`.
    pub fn from_u64(bits: u64, len: u32) -> Result<Self> {
        if len > 64 {
            return Err(invalid(format!("word length {len} exceeds 64")));
        }
        if len < 64 && bits >> len != 0 {
            return Err(invalid(format!("value {bits:#x} does not fit in {len} bits")));
        }
        Ok(Self { bits, len })
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_u64(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: u32) -> bool {
        assert!(i < self.len, "bit index {i} out of range for width {}", self.len);
        self.bits >> i & 1 == 1
    }

    pub fn set(&mut self, i: u32, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for width {}", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn flip(&mut self, i: u32) {
        assert!(i < self.len, "bit index {i} out of range for width {}", self.len);
        self.bits ^= 1 << i;
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = BitWord::zeros(s.len().min(64) as u32);
        if s.len() > 64 {
            return Err(invalid("bit string longer than 64"));
        }
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => w.set(i as u32, true),
                other => return Err(invalid(format!("not a bit: {other:?}"))),
            }
        }
        Ok(w)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

/// How the decoder treats the received word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    /// The perfect Hamming code: corrects one error, never detects more.
    Plain,
    /// One overall parity bit appended after position n (SECDED). Not part of
    /// the memory layouts; used by the physical-decoder diagnostic only.
    Extended,
}

impl FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Self::Plain),
            "extended" => Ok(Self::Extended),
            other => Err(invalid(format!("unknown decode mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CodeRepr", into = "CodeRepr")]
pub struct CodeSpec {
    r: u32,
    n: u32,
    k: u32,
    /// Row `i` has bit `j` set when column `j` (position `j + 1`) has bit `i`.
    parity_check: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    r: u32,
    n: u32,
    k: u32,
}

impl TryFrom<CodeRepr> for CodeSpec {
    type Error = Error;

    fn try_from(c: CodeRepr) -> Result<Self> {
        let spec = make_code(c.r)?;
        if (spec.n, spec.k) != (c.n, c.k) {
            return Err(invalid(format!("inconsistent code parameters r={} n={} k={}", c.r, c.n, c.k)));
        }
        Ok(spec)
    }
}

impl From<CodeSpec> for CodeRepr {
    fn from(c: CodeSpec) -> Self {
        CodeRepr { r: c.r, n: c.n, k: c.k }
    }
}

impl CodeSpec {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn name(&self) -> String {
        format!("Ham({},{})", self.n, self.k)
    }

    /// Rows of the r x n parity-check matrix as bit masks over positions.
    pub fn parity_check_rows(&self) -> &[u64] {
        &self.parity_check
    }

    /// Column `j` (0-based) of the parity-check matrix as an r-bit value.
    pub fn column(&self, j: u32) -> u32 {
        (0..self.r)
            .map(|i| ((self.parity_check[i as usize] >> j & 1) as u32) << i)
            .sum()
    }

    /// Width of a codeword in the given mode.
    pub fn width(&self, mode: DecodeMode) -> u32 {
        match mode {
            DecodeMode::Plain => self.n,
            DecodeMode::Extended => self.n + 1,
        }
    }

    pub fn is_parity_position(position: u32) -> bool {
        position.is_power_of_two()
    }

    /// 1-based positions carrying data, ascending.
    pub fn data_positions(&self) -> impl Iterator<Item = u32> {
        (1..=self.n).filter(|p| !Self::is_parity_position(*p))
    }

    /// Syndrome of an n-bit word, as computed by H * w over GF(2).
    pub fn syndrome(&self, word: &BitWord) -> Result<u32> {
        if word.len() != self.n && word.len() != self.n + 1 {
            return Err(invalid(format!(
                "{} expects {} bits, got {}",
                self.name(),
                self.n,
                word.len()
            )));
        }
        let inner = word.as_u64() & low_mask(self.n);
        Ok((0..self.r)
            .map(|i| ((self.parity_check[i as usize] & inner).count_ones() & 1) << i)
            .sum())
    }
}

fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn make_code(r: u32) -> Result<CodeSpec> {
    if r < 2 {
        return Err(invalid(format!("Hamming codes need r >= 2, got {r}")));
    }
    if r > MAX_R {
        return Err(invalid(format!("r = {r} exceeds the supported maximum {MAX_R}")));
    }
    let n = (1u32 << r) - 1;
    let k = n - r;
    let parity_check = (0..r)
        .map(|i| {
            (0..n)
                .filter(|j| (j + 1) >> i & 1 == 1)
                .fold(0u64, |row, j| row | 1 << j)
        })
        .collect();
    Ok(CodeSpec { r, n, k, parity_check })
}

/// Encodes k data bits into an n-bit codeword (plain mode) or n+1 bits with
/// the overall parity bit last (extended mode).
pub fn encode_with(spec: &CodeSpec, data: &BitWord, mode: DecodeMode) -> Result<BitWord> {
    if data.len() != spec.k {
        return Err(invalid(format!(
            "{} expects {} data bits, got {}",
            spec.name(),
            spec.k,
            data.len()
        )));
    }
    let mut word = BitWord::zeros(spec.width(mode));
    for (i, p) in spec.data_positions().enumerate() {
        if data.get(i as u32) {
            word.set(p - 1, true);
        }
    }
    let s = spec.syndrome(&word)?;
    for i in 0..spec.r {
        if s >> i & 1 == 1 {
            word.flip((1 << i) - 1);
        }
    }
    if mode == DecodeMode::Extended && word.count_ones() % 2 == 1 {
        word.set(spec.n, true);
    }
    Ok(word)
}

pub fn encode(spec: &CodeSpec, data: &BitWord) -> Result<BitWord> {
    encode_with(spec, data, DecodeMode::Plain)
}

pub fn extract_data(spec: &CodeSpec, word: &BitWord) -> BitWord {
    let mut data = BitWord::zeros(spec.k);
    for (i, p) in spec.data_positions().enumerate() {
        data.set(i as u32, word.get(p - 1));
    }
    data
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecodeOutcome {
    NoError,
    CorrectedSingle,
    DetectedUncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub outcome: DecodeOutcome,
    /// 1-based; `n + 1` denotes the extended parity bit.
    pub corrected_position: Option<u32>,
    pub decoded_data: BitWord,
}

pub fn decode_with(spec: &CodeSpec, received: &BitWord, mode: DecodeMode) -> Result<DecodeReport> {
    let width = spec.width(mode);
    if received.len() != width {
        return Err(invalid(format!(
            "{} ({mode:?}) expects {width} bits, got {}",
            spec.name(),
            received.len()
        )));
    }
    let s = spec.syndrome(received)?;
    let mut word = *received;
    let (outcome, corrected_position) = match mode {
        DecodeMode::Plain => {
            if s == 0 {
                (DecodeOutcome::NoError, None)
            } else {
                word.flip(s - 1);
                (DecodeOutcome::CorrectedSingle, Some(s))
            }
        }
        DecodeMode::Extended => {
            let odd = received.count_ones() % 2 == 1;
            match (s, odd) {
                (0, false) => (DecodeOutcome::NoError, None),
                (0, true) => (DecodeOutcome::CorrectedSingle, Some(spec.n + 1)),
                (s, true) => {
                    word.flip(s - 1);
                    (DecodeOutcome::CorrectedSingle, Some(s))
                }
                (_, false) => (DecodeOutcome::DetectedUncorrectable, None),
            }
        }
    };
    Ok(DecodeReport {
        outcome,
        corrected_position,
        decoded_data: extract_data(spec, &word),
    })
}

pub fn decode(spec: &CodeSpec, received: &BitWord) -> Result<DecodeReport> {
    decode_with(spec, received, DecodeMode::Plain)
}
