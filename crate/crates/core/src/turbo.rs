//! Parallel turbo encoder, interleavers and puncturing.
//!
//! The mother codeword interleaves the three streams step by step,
//! `s_0, p1_0, p2_0, s_1, p1_1, p2_1, ...`; the transmitted codeword is the
//! mother codeword with punctured parity positions removed. Both constituent
//! encoders are terminated in the zero state but the tail labels are not
//! transmitted.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::trellis::{Constituent, RscOutput, RscSpec};
use crate::{Error, Rate, Result};

/// How an interleaver was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterleaverKind {
    Identity,
    PseudoRandom { seed: u64 },
    File { path: String },
    Custom,
}

impl fmt::Display for InterleaverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterleaverKind::Identity => f.write_str("identity"),
            InterleaverKind::PseudoRandom { seed } => write!(f, "pr:{seed}"),
            InterleaverKind::File { path } => write!(f, "file:{path}"),
            InterleaverKind::Custom => f.write_str("custom"),
        }
    }
}

/// A permutation `pi` of `0..K`: information bit `i` of the first trellis
/// sits at step `pi[i]` of the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interleaver {
    forward: Vec<usize>,
    inverse: Vec<usize>,
    kind: InterleaverKind,
}

impl Interleaver {
    pub fn identity(k: usize) -> Interleaver {
        let forward: Vec<usize> = (0..k).collect();
        Interleaver {
            inverse: forward.clone(),
            forward,
            kind: InterleaverKind::Identity,
        }
    }

    /// Uniform permutation from a Fisher-Yates shuffle driven by ChaCha8 seeded with `seed`.
    pub fn pseudo_random(k: usize, seed: u64) -> Interleaver {
        let mut forward: Vec<usize> = (0..k).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        forward.shuffle(&mut rng);
        Interleaver::from_permutation(forward, InterleaverKind::PseudoRandom { seed })
            .expect("a shuffle is a permutation")
    }

    pub fn from_permutation(forward: Vec<usize>, kind: InterleaverKind) -> Result<Interleaver> {
        let k = forward.len();
        let mut inverse = vec![usize::MAX; k];
        for (i, &j) in forward.iter().enumerate() {
            if j >= k {
                return Err(Error::InvalidPermutation(format!(
                    "entry {j} at line {} is out of range for K = {k}",
                    i + 1
                )));
            }
            if inverse[j] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "duplicate image {j} at lines {} and {}",
                    inverse[j] + 1,
                    i + 1
                )));
            }
            inverse[j] = i;
        }
        Ok(Interleaver {
            forward,
            inverse,
            kind,
        })
    }

    /// Parses whitespace-separated indices; `#` starts a comment.
    pub fn parse(text: &str, kind: InterleaverKind) -> Result<Interleaver> {
        let mut forward = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for token in line.split_whitespace() {
                let v = token.parse().map_err(|_| {
                    Error::InvalidPermutation(format!(
                        "line {}: `{token}` is not an index",
                        lineno + 1
                    ))
                })?;
                forward.push(v);
            }
        }
        if forward.is_empty() {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        Interleaver::from_permutation(forward, kind)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Interleaver> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Interleaver::parse(
            &text,
            InterleaverKind::File {
                path: path.display().to_string(),
            },
        )
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// `pi(i)`
    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    /// `pi^-1(j)`
    pub fn invert(&self, j: usize) -> usize {
        self.inverse[j]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.forward
    }

    pub fn kind(&self) -> &InterleaverKind {
        &self.kind
    }

    /// Reorders `bits` so that `out[pi(i)] = bits[i]`.
    pub fn scramble<T: Copy>(&self, bits: &[T]) -> Vec<T> {
        self.inverse.iter().map(|&i| bits[i]).collect()
    }

    /// First 16 hex digits of the SHA-256 of the permutation, for audit output.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for &j in &self.forward {
            h.update((j as u64).to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// One of the three mother-code streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Systematic,
    Parity1,
    Parity2,
}

/// Periodic puncturing of the two parity streams; systematic bits are always kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctureMap {
    parity1: Vec<bool>,
    parity2: Vec<bool>,
}

impl PunctureMap {
    pub fn new(parity1: Vec<bool>, parity2: Vec<bool>) -> Result<PunctureMap> {
        if parity1.is_empty() || parity1.len() != parity2.len() {
            return Err(Error::InvalidPuncture(format!(
                "pattern lengths {} and {} must be equal and nonzero",
                parity1.len(),
                parity2.len()
            )));
        }
        Ok(PunctureMap { parity1, parity2 })
    }

    /// The shipped pattern for `rate`.
    ///
    /// - 1/3: nothing punctured.
    /// - 1/2: `p1` at even steps, `p2` at odd steps.
    /// - 2/3: `p1` at steps 0 mod 4, `p2` at steps 2 mod 4.
    pub fn for_rate(rate: Rate) -> Result<PunctureMap> {
        let pat = |s: &str| s.bytes().map(|b| b == b'1').collect::<Vec<_>>();
        let (p1, p2) = match (rate.numer(), rate.denom()) {
            (1, 3) => ("1", "1"),
            (1, 2) => ("10", "01"),
            (2, 3) => ("1000", "0010"),
            _ => return Err(Error::UnsupportedRate(rate.to_string())),
        };
        PunctureMap::new(pat(p1), pat(p2))
    }

    /// Same as [`for_rate`](Self::for_rate) but also checks `K` against the period.
    pub fn make(rate: Rate, k: usize) -> Result<PunctureMap> {
        let map = PunctureMap::for_rate(rate)?;
        map.check_len(k)?;
        Ok(map)
    }

    /// Parses `"p1=1010,p2=0101"`.
    pub fn parse(s: &str) -> Result<PunctureMap> {
        let bad = |why: &str| Error::InvalidPuncture(format!("`{s}`: {why}"));
        let mut p1 = None;
        let mut p2 = None;
        for part in s.split(',') {
            let (name, pattern) = part
                .split_once('=')
                .ok_or_else(|| bad("expected name=pattern"))?;
            let bits = pattern
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad("patterns are strings of 0 and 1")),
                })
                .collect::<Result<Vec<_>>>()?;
            match name.trim() {
                "p1" => p1 = Some(bits),
                "p2" => p2 = Some(bits),
                other => return Err(bad(&format!("unknown stream `{other}`"))),
            }
        }
        match (p1, p2) {
            (Some(a), Some(b)) => PunctureMap::new(a, b),
            _ => Err(bad("both p1 and p2 are required")),
        }
    }

    pub fn period(&self) -> usize {
        self.parity1.len()
    }

    pub fn check_len(&self, k: usize) -> Result<()> {
        if k == 0 || !k.is_multiple_of(self.period()) {
            return Err(Error::PeriodMismatch {
                k,
                period: self.period(),
            });
        }
        Ok(())
    }

    pub fn keeps(&self, stream: Stream, step: usize) -> bool {
        let p = self.period();
        match stream {
            Stream::Systematic => true,
            Stream::Parity1 => self.parity1[step % p],
            Stream::Parity2 => self.parity2[step % p],
        }
    }

    /// Number of transmitted symbols for `k` information bits.
    pub fn kept_count(&self, k: usize) -> usize {
        (0..k)
            .map(|t| {
                1 + self.keeps(Stream::Parity1, t) as usize
                    + self.keeps(Stream::Parity2, t) as usize
            })
            .sum()
    }
}

impl fmt::Display for PunctureMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: &[bool]| {
            v.iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        };
        write!(f, "p1={},p2={}", s(&self.parity1), s(&self.parity2))
    }
}

/// A transmitted symbol's origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub stream: Stream,
    pub step: usize,
}

/// The three unpunctured streams plus both termination tails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurboStreams {
    pub systematic: Vec<bool>,
    pub first: RscOutput,
    pub second: RscOutput,
}

/// A parallel turbo code with two identical RSC constituents.
#[derive(Clone, Debug)]
pub struct TurboCode {
    constituent: Constituent,
    info_len: usize,
    interleaver: Interleaver,
    puncture: PunctureMap,
    layout: Vec<Symbol>,
}

impl TurboCode {
    pub fn new(
        rsc: RscSpec,
        info_len: usize,
        interleaver: Interleaver,
        puncture: PunctureMap,
    ) -> Result<TurboCode> {
        if interleaver.len() != info_len {
            return Err(Error::InvalidPermutation(format!(
                "interleaver has length {} but K = {info_len}",
                interleaver.len()
            )));
        }
        puncture.check_len(info_len)?;
        let mut layout = Vec::with_capacity(3 * info_len);
        for step in 0..info_len {
            for stream in [Stream::Systematic, Stream::Parity1, Stream::Parity2] {
                if puncture.keeps(stream, step) {
                    layout.push(Symbol { stream, step });
                }
            }
        }
        Ok(TurboCode {
            constituent: Constituent::new(rsc),
            info_len,
            interleaver,
            puncture,
            layout,
        })
    }

    /// A code using the shipped puncturing pattern for `rate`.
    pub fn with_rate(
        rsc: RscSpec,
        info_len: usize,
        interleaver: Interleaver,
        rate: Rate,
    ) -> Result<TurboCode> {
        let puncture = PunctureMap::make(rate, info_len)?;
        TurboCode::new(rsc, info_len, interleaver, puncture)
    }

    pub fn constituent(&self) -> &Constituent {
        &self.constituent
    }

    pub fn rsc(&self) -> &RscSpec {
        self.constituent.spec()
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    pub fn block_len(&self) -> usize {
        self.layout.len()
    }

    pub fn rate(&self) -> Rate {
        Rate::new(self.info_len, self.block_len()).expect("N >= K > 0")
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    pub fn puncture(&self) -> &PunctureMap {
        &self.puncture
    }

    /// Transmitted index to `(stream, step)`.
    pub fn layout(&self) -> &[Symbol] {
        &self.layout
    }

    pub fn symbol(&self, index: usize) -> Symbol {
        self.layout[index]
    }

    pub fn encode_streams(&self, info: &[bool]) -> Result<TurboStreams> {
        if info.len() != self.info_len {
            return Err(Error::LengthMismatch {
                expected: self.info_len,
                got: info.len(),
            });
        }
        let rsc = self.rsc();
        Ok(TurboStreams {
            systematic: info.to_vec(),
            first: rsc.encode(info),
            second: rsc.encode(&self.interleaver.scramble(info)),
        })
    }

    pub fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        let streams = self.encode_streams(info)?;
        Ok(self
            .layout
            .iter()
            .map(|s| match s.stream {
                Stream::Systematic => streams.systematic[s.step],
                Stream::Parity1 => streams.first.parity[s.step],
                Stream::Parity2 => streams.second.parity[s.step],
            })
            .collect())
    }
}
