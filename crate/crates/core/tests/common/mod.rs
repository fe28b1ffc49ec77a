//! Brute-force reference models used by the integration tests.
//!
//! Nothing here calls into the trellis, encoder or decoder code under test;
//! the models are written directly from the code definitions.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Coefficients `g_0 .. g_{L-1}` of an octal polynomial, `D^0` first.
pub fn coefficients(octal: &str, l: usize) -> Vec<u8> {
    let value = u32::from_str_radix(octal, 8).unwrap();
    (0..l).map(|i| ((value >> (l - 1 - i)) & 1) as u8).collect()
}

/// A shift register holding `[a_{t-1}, .., a_{t-m}]`.
#[derive(Clone, Debug)]
pub struct Register {
    fb: Vec<u8>,
    ff: Vec<u8>,
    cells: Vec<u8>,
}

impl Register {
    pub fn new(fb: &str, ff: &str, l: usize) -> Register {
        Register {
            fb: coefficients(fb, l),
            ff: coefficients(ff, l),
            cells: vec![0; l - 1],
        }
    }

    pub fn with_state(mut self, state: usize) -> Register {
        let m = self.cells.len();
        self.cells = (0..m).map(|i| ((state >> (m - 1 - i)) & 1) as u8).collect();
        self
    }

    pub fn state(&self) -> usize {
        self.cells.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    fn feedback(&self) -> u8 {
        (1..self.fb.len()).fold(0, |acc, i| acc ^ (self.fb[i] & self.cells[i - 1]))
    }

    /// Shifts in `u`; returns the parity bit.
    pub fn push(&mut self, u: u8) -> u8 {
        let a = u ^ self.feedback();
        let mut p = self.ff[0] & a;
        for i in 1..self.ff.len() {
            p ^= self.ff[i] & self.cells[i - 1];
        }
        self.cells.insert(0, a);
        self.cells.pop();
        p
    }

    /// The input that makes the next feedback value zero.
    pub fn flush_input(&self) -> u8 {
        self.feedback()
    }
}

/// All `(from, to, b1, b2)` transitions, state numbering as in the crate.
pub fn transition_list(fb: &str, ff: &str, l: usize) -> Vec<(usize, usize, u8, u8)> {
    let mut out = Vec::new();
    for s in 0..1usize << (l - 1) {
        for u in 0..2u8 {
            let mut reg = Register::new(fb, ff, l).with_state(s);
            let p = reg.push(u);
            out.push((s, reg.state(), u, p));
        }
    }
    out.sort();
    out
}

/// One section of a terminated trellis path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub info: u8,
    pub parity: u8,
}

/// Path of the terminated encoder for `info` (information sections then tail).
pub fn encoder_path(fb: &str, ff: &str, l: usize, info: &[u8]) -> Vec<Branch> {
    let mut reg = Register::new(fb, ff, l);
    let mut path = Vec::new();
    for &u in info {
        let from = reg.state();
        let p = reg.push(u);
        path.push(Branch {
            from,
            to: reg.state(),
            info: u,
            parity: p,
        });
    }
    for _ in 0..l - 1 {
        let from = reg.state();
        let u = reg.flush_input();
        let p = reg.push(u);
        path.push(Branch {
            from,
            to: reg.state(),
            info: u,
            parity: p,
        });
    }
    assert_eq!(reg.state(), 0);
    path
}

pub fn word(bits: u32, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((bits >> i) & 1) as u8).collect()
}

/// Transitions surviving on consistent paths, and the info bits they force.
pub struct TrellisOracle {
    pub surviving: Vec<BTreeSet<(usize, usize)>>,
    pub forced: Vec<Option<bool>>,
    pub consistent: usize,
}

/// Enumerates every input word of a single terminated trellis and keeps those
/// matching the known info and parity bits of the information sections.
pub fn single_trellis(
    fb: &str,
    ff: &str,
    l: usize,
    info_known: &[Option<bool>],
    parity_known: &[Option<bool>],
) -> TrellisOracle {
    let k = info_known.len();
    let steps = k + l - 1;
    let mut surviving = vec![BTreeSet::new(); steps];
    let mut forced: Vec<Option<Option<bool>>> = vec![None; k];
    let mut consistent = 0;
    for bits in 0..1u32 << k {
        let info = word(bits, k);
        let path = encoder_path(fb, ff, l, &info);
        let ok = (0..k).all(|t| {
            info_known[t].is_none_or(|b| b as u8 == path[t].info)
                && parity_known[t].is_none_or(|b| b as u8 == path[t].parity)
        });
        if !ok {
            continue;
        }
        consistent += 1;
        for (t, br) in path.iter().enumerate() {
            surviving[t].insert((br.from, br.to));
        }
        for t in 0..k {
            let b = info[t] == 1;
            forced[t] = match forced[t] {
                None => Some(Some(b)),
                Some(Some(prev)) if prev == b => Some(Some(b)),
                _ => Some(None),
            };
        }
    }
    TrellisOracle {
        surviving,
        forced: forced.into_iter().map(|f| f.flatten()).collect(),
        consistent,
    }
}

/// Which turbo stream a received symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Src {
    Sys,
    P1,
    P2,
}

/// Iterated exchange of forced info bits between two brute-force trellises,
/// mirroring the hard-information turbo exchange.
pub fn turbo_exchange(
    fb: &str,
    ff: &str,
    l: usize,
    perm: &[usize],
    received: &[(Src, usize, bool)],
) -> Vec<Option<bool>> {
    let k = perm.len();
    let mut info1: Vec<Option<bool>> = vec![None; k];
    let mut info2: Vec<Option<bool>> = vec![None; k];
    let mut par1: Vec<Option<bool>> = vec![None; k];
    let mut par2: Vec<Option<bool>> = vec![None; k];
    for &(src, t, b) in received {
        match src {
            Src::Sys => {
                info1[t] = Some(b);
                info2[perm[t]] = Some(b);
            }
            Src::P1 => par1[t] = Some(b),
            Src::P2 => par2[t] = Some(b),
        }
    }
    loop {
        let f1 = single_trellis(fb, ff, l, &info1, &par1).forced;
        let mut changed = false;
        for i in 0..k {
            if let Some(b) = f1[i] {
                if info2[perm[i]].is_none() {
                    info2[perm[i]] = Some(b);
                    changed = true;
                }
                info1[i] = Some(b);
            }
        }
        let f2 = single_trellis(fb, ff, l, &info2, &par2).forced;
        for (j, bit) in f2.iter().enumerate() {
            if let Some(b) = *bit {
                let i = perm.iter().position(|&x| x == j).unwrap();
                if info1[i].is_none() {
                    info1[i] = Some(b);
                    changed = true;
                }
            }
        }
        if !changed {
            return info1;
        }
    }
}

/// Direct encoder for the (unpunctured) turbo mother streams.
pub fn turbo_streams(
    fb: &str,
    ff: &str,
    l: usize,
    perm: &[usize],
    info: &[u8],
) -> (Vec<u8>, Vec<u8>) {
    let k = info.len();
    let mut scrambled = vec![0u8; k];
    for i in 0..k {
        scrambled[perm[i]] = info[i];
    }
    let p1 = encoder_path(fb, ff, l, info)[..k]
        .iter()
        .map(|b| b.parity)
        .collect();
    let p2 = encoder_path(fb, ff, l, &scrambled)[..k]
        .iter()
        .map(|b| b.parity)
        .collect();
    (p1, p2)
}

/// Transmitted order for the shipped puncturing patterns, written out directly.
pub fn turbo_layout(k: usize, rate: (usize, usize)) -> Vec<(Src, usize)> {
    let mut out = Vec::new();
    for t in 0..k {
        out.push((Src::Sys, t));
        let (keep1, keep2) = match rate {
            (1, 3) => (true, true),
            (1, 2) => (t % 2 == 0, t % 2 == 1),
            (2, 3) => (t % 4 == 0, t % 4 == 2),
            _ => panic!("unsupported rate"),
        };
        if keep1 {
            out.push((Src::P1, t));
        }
        if keep2 {
            out.push((Src::P2, t));
        }
    }
    out
}

/// Staircase code as explicit check equations over variable indices.
pub fn staircase_checks(k: usize, left_rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
    left_rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut vars = row.clone();
            if r > 0 {
                vars.push(k + r - 1);
            }
            vars.push(k + r);
            vars
        })
        .collect()
}

/// Variables forced in every codeword consistent with the received values.
pub fn ml_forced(k: usize, checks: &[Vec<usize>], received: &[Option<bool>]) -> Vec<Option<bool>> {
    let m = checks.len();
    let mut forced: Vec<Option<Option<bool>>> = vec![None; k + m];
    for bits in 0..1u32 << k {
        let mut cw: Vec<bool> = (0..k).map(|i| (bits >> i) & 1 == 1).collect();
        // parity r closes check r given the earlier parities
        for row in checks {
            let acc = row
                .iter()
                .filter(|&&v| v < cw.len())
                .fold(false, |a, &v| a ^ cw[v]);
            cw.push(acc);
        }
        if received
            .iter()
            .zip(&cw)
            .any(|(r, &c)| r.is_some_and(|b| b != c))
        {
            continue;
        }
        for (v, &c) in cw.iter().enumerate() {
            forced[v] = match forced[v] {
                None => Some(Some(c)),
                Some(Some(p)) if p == c => Some(Some(c)),
                _ => Some(None),
            };
        }
    }
    forced.into_iter().map(|f| f.flatten()).collect()
}

/// Peeling by repeatedly deleting known variables from check equations.
pub fn naive_peel(n: usize, checks: &[Vec<usize>], received: &[Option<bool>]) -> Vec<Option<bool>> {
    assert_eq!(received.len(), n);
    let mut values = received.to_vec();
    loop {
        let mut progress = false;
        for eq in checks {
            let unknown: Vec<usize> = eq
                .iter()
                .copied()
                .filter(|&v| values[v].is_none())
                .collect();
            if unknown.len() == 1 {
                let sum = eq
                    .iter()
                    .filter_map(|&v| values[v])
                    .fold(false, |a, b| a ^ b);
                values[unknown[0]] = Some(sum);
                progress = true;
            }
        }
        if !progress {
            return values;
        }
    }
}
