//! Staircase LDPC codes and a symbol-at-a-time peeling decoder.
//!
//! The parity-check matrix is `H = [A | S]` with `A` an `M x K` sparse left
//! part and `S` the `M x M` double diagonal (ones at `(i, i)` and `(i, i-1)`).
//! Variables `0..K` are information symbols, `K..K+M` are parity symbols, and
//! parity `i` is the running XOR of checks `0..=i` over the information part.

use std::collections::VecDeque;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{DecodeStatus, Error, Rate, Result};

/// Node-perspective left degree distribution: fraction of information
/// columns having each degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    pairs: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn new(mut pairs: Vec<(usize, f64)>) -> Result<DegreeDistribution> {
        if pairs.is_empty() {
            return Err(Error::InvalidDistribution("no degrees given".into()));
        }
        pairs.sort_by_key(|&(d, _)| d);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "degree {} listed twice",
                    w[0].0
                )));
            }
        }
        for &(d, p) in &pairs {
            if d == 0 {
                return Err(Error::InvalidDistribution("degree 0 is not allowed".into()));
            }
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} for degree {d}"
                )));
            }
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(DegreeDistribution { pairs })
    }

    pub fn regular(degree: usize) -> DegreeDistribution {
        DegreeDistribution {
            pairs: vec![(degree, 1.0)],
        }
    }

    /// Parses `degree probability` pairs, one per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<DegreeDistribution> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::InvalidDistribution(format!("line {}: `{line}`", lineno + 1));
            let mut it = line.split_whitespace();
            let d = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let p = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if it.next().is_some() {
                return Err(bad());
            }
            pairs.push((d, p));
        }
        DegreeDistribution::new(pairs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DegreeDistribution> {
        DegreeDistribution::parse(&std::fs::read_to_string(path)?)
    }

    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }

    pub fn max_degree(&self) -> usize {
        self.pairs.last().map_or(0, |p| p.0)
    }

    /// Column degrees for `k` columns by largest-remainder rounding, ascending.
    pub fn column_degrees(&self, k: usize) -> Vec<usize> {
        let quotas: Vec<f64> = self.pairs.iter().map(|&(_, p)| p * k as f64).collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        // largest fractional part first, ties to the lower degree
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in order.iter().take(k.saturating_sub(assigned)) {
            counts[i] += 1;
        }
        self.pairs
            .iter()
            .zip(&counts)
            .flat_map(|(&(d, _), &c)| std::iter::repeat_n(d, c))
            .collect()
    }
}

/// Which construction produced a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaircaseKind {
    Regular,
    Irregular,
    Custom,
}

/// A staircase LDPC code.
#[derive(Clone, Debug)]
pub struct StaircaseCode {
    info_len: usize,
    checks: usize,
    kind: StaircaseKind,
    /// Information columns touched by each check row.
    rows: Vec<Vec<usize>>,
    /// Check rows touched by each information column.
    cols: Vec<Vec<usize>>,
}

impl StaircaseCode {
    /// Regular code with four ones per information column.
    pub fn regular(info_len: usize, rate: Rate, seed: u64) -> Result<StaircaseCode> {
        let mut code =
            StaircaseCode::irregular(info_len, rate, &DegreeDistribution::regular(4), seed)?;
        code.kind = StaircaseKind::Regular;
        Ok(code)
    }

    pub fn irregular(
        info_len: usize,
        rate: Rate,
        dist: &DegreeDistribution,
        seed: u64,
    ) -> Result<StaircaseCode> {
        let n = rate.block_len(info_len).ok_or_else(|| {
            Error::Infeasible(format!("K = {info_len} is incompatible with rate {rate}"))
        })?;
        let checks = n - info_len;
        if info_len == 0 || checks == 0 {
            return Err(Error::Infeasible(format!("K = {info_len}, M = {checks}")));
        }
        if dist.max_degree() > checks {
            return Err(Error::Infeasible(format!(
                "column degree {} exceeds M = {checks}",
                dist.max_degree()
            )));
        }
        let degrees = dist.column_degrees(info_len);
        let cols = fill_columns(&degrees, checks, seed)?;
        let mut code = StaircaseCode::from_columns(info_len, checks, cols)?;
        code.kind = StaircaseKind::Irregular;
        Ok(code)
    }

    /// Builds a code from explicit left-part rows (check `i` touches `rows[i]`).
    pub fn from_rows(info_len: usize, rows: Vec<Vec<usize>>) -> Result<StaircaseCode> {
        let checks = rows.len();
        let mut cols = vec![Vec::new(); info_len];
        for (r, row) in rows.iter().enumerate() {
            for &c in row {
                if c >= info_len {
                    return Err(Error::InvalidCode(format!("column {c} out of range")));
                }
                cols[c].push(r);
            }
        }
        StaircaseCode::from_columns(info_len, checks, cols)
    }

    fn from_columns(
        info_len: usize,
        checks: usize,
        mut cols: Vec<Vec<usize>>,
    ) -> Result<StaircaseCode> {
        if checks == 0 {
            return Err(Error::InvalidCode(
                "staircase code needs at least one check".into(),
            ));
        }
        let mut rows = vec![Vec::new(); checks];
        for (c, col) in cols.iter_mut().enumerate() {
            col.sort_unstable();
            if col.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidCode(format!("duplicate edge in column {c}")));
            }
            for &r in col.iter() {
                if r >= checks {
                    return Err(Error::InvalidCode(format!("row {r} out of range")));
                }
                rows[r].push(c);
            }
        }
        Ok(StaircaseCode {
            info_len,
            checks,
            kind: StaircaseKind::Custom,
            rows,
            cols,
        })
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    pub fn checks(&self) -> usize {
        self.checks
    }

    pub fn block_len(&self) -> usize {
        self.info_len + self.checks
    }

    pub fn rate(&self) -> Rate {
        Rate::new(self.info_len, self.block_len()).expect("N > K > 0")
    }

    pub fn kind(&self) -> &StaircaseKind {
        &self.kind
    }

    pub fn left_rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn left_cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    /// Variables (information and parity) taking part in check `r`.
    pub fn check_vars(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        let k = self.info_len;
        let stair = if r == 0 { None } else { Some(k + r - 1) };
        self.rows[r].iter().copied().chain(stair).chain(Some(k + r))
    }

    /// Checks that variable `v` takes part in.
    pub fn var_checks(&self, v: usize) -> Vec<usize> {
        if v < self.info_len {
            self.cols[v].clone()
        } else {
            let i = v - self.info_len;
            if i + 1 < self.checks {
                vec![i, i + 1]
            } else {
                vec![i]
            }
        }
    }

    /// Linear-time encoding by accumulation down the double diagonal.
    pub fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        if info.len() != self.info_len {
            return Err(Error::LengthMismatch {
                expected: self.info_len,
                got: info.len(),
            });
        }
        let mut out = info.to_vec();
        out.reserve(self.checks);
        let mut acc = false;
        for row in &self.rows {
            acc ^= row.iter().fold(false, |x, &c| x ^ info[c]);
            out.push(acc);
        }
        Ok(out)
    }

    /// Syndrome `H c` over GF(2).
    pub fn syndrome(&self, codeword: &[bool]) -> Vec<bool> {
        (0..self.checks)
            .map(|r| self.check_vars(r).fold(false, |x, v| x ^ codeword[v]))
            .collect()
    }

    pub fn is_codeword(&self, codeword: &[bool]) -> bool {
        codeword.len() == self.block_len() && self.syndrome(codeword).iter().all(|&s| !s)
    }
}

/// Distributes column edges over `checks` rows from a shuffled round-robin
/// pool so row degrees differ by at most one, then repairs duplicate edges
/// inside a column by swapping pool entries.
fn fill_columns(degrees: &[usize], checks: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let edges: usize = degrees.iter().sum();
    let mut pool: Vec<usize> = (0..edges).map(|e| e % checks).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);

    let mut starts = Vec::with_capacity(degrees.len() + 1);
    let mut acc = 0;
    for &d in degrees {
        starts.push(acc);
        acc += d;
    }
    starts.push(acc);
    let col_of = |pos: usize, starts: &[usize]| starts.partition_point(|&s| s <= pos) - 1;

    for c in 0..degrees.len() {
        let (lo, hi) = (starts[c], starts[c + 1]);
        for pos in lo..hi {
            if !pool[lo..pos].contains(&pool[pos]) {
                continue;
            }
            // Look for a swap partner anywhere else in the pool that resolves
            // the clash without creating one in the partner's column.
            let offset = rng.random_range(0..edges);
            let mut fixed = false;
            for step in 0..edges {
                let other = (offset + step) % edges;
                if (lo..hi).contains(&other) {
                    continue;
                }
                let oc = col_of(other, &starts);
                let (olo, ohi) = (starts[oc], starts[oc + 1]);
                let candidate = pool[other];
                let mine = pool[pos];
                let clash_here = pool[lo..hi].contains(&candidate);
                let clash_there = (olo..ohi).any(|q| q != other && pool[q] == mine);
                if !clash_here && !clash_there {
                    pool.swap(pos, other);
                    fixed = true;
                    break;
                }
            }
            if !fixed {
                return Err(Error::Infeasible(format!(
                    "cannot place column {c} without duplicate edges"
                )));
            }
        }
    }
    Ok((0..degrees.len())
        .map(|c| pool[starts[c]..starts[c + 1]].to_vec())
        .collect())
}

/// Peeling decoder: a check with one unknown variable resolves it.
#[derive(Clone, Debug)]
pub struct PeelingDecoder<'a> {
    code: &'a StaircaseCode,
    values: Vec<Option<bool>>,
    received: Vec<bool>,
    check_parity: Vec<bool>,
    check_unknown: Vec<u32>,
    /// XOR of the indices of still-unknown variables per check.
    check_missing: Vec<usize>,
    queue: VecDeque<usize>,
    received_count: usize,
    info_unknown: usize,
    status: DecodeStatus,
    r_stop: Option<usize>,
}

impl<'a> PeelingDecoder<'a> {
    pub fn new(code: &'a StaircaseCode) -> PeelingDecoder<'a> {
        let m = code.checks();
        let mut check_unknown = vec![0u32; m];
        let mut check_missing = vec![0usize; m];
        for r in 0..m {
            for v in code.check_vars(r) {
                check_unknown[r] += 1;
                check_missing[r] ^= v;
            }
        }
        PeelingDecoder {
            code,
            values: vec![None; code.block_len()],
            received: vec![false; code.block_len()],
            check_parity: vec![false; m],
            check_unknown,
            check_missing,
            queue: VecDeque::new(),
            received_count: 0,
            info_unknown: code.info_len(),
            status: DecodeStatus::InProgress,
            r_stop: None,
        }
    }

    pub fn status(&self) -> DecodeStatus {
        self.status
    }

    pub fn r_stop(&self) -> Option<usize> {
        self.r_stop
    }

    pub fn received_count(&self) -> usize {
        self.received_count
    }

    /// Known value per variable, information then parity.
    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn determined_count(&self) -> usize {
        self.code.info_len() - self.info_unknown
    }

    pub fn decoded(&self) -> Option<Vec<bool>> {
        self.values[..self.code.info_len()]
            .iter()
            .copied()
            .collect()
    }

    pub fn receive(&mut self, index: usize, value: bool) -> Result<DecodeStatus> {
        if self.status == DecodeStatus::Contradiction {
            return Err(Error::Halted);
        }
        let n = self.values.len();
        if index >= n {
            return Err(Error::SymbolOutOfRange { index, len: n });
        }
        if self.received[index] {
            return Err(Error::DuplicateSymbol(index));
        }
        self.received[index] = true;
        self.received_count += 1;

        let consistent = match self.values[index] {
            Some(known) => known == value,
            None => self.assign(index, value) && self.cascade(),
        };
        if !consistent {
            self.status = DecodeStatus::Contradiction;
        } else if self.status == DecodeStatus::InProgress && self.info_unknown == 0 {
            self.status = DecodeStatus::Success;
            self.r_stop = Some(self.received_count);
        }
        Ok(self.status)
    }

    /// Records `v = value`; returns false when a fully known check fails.
    fn assign(&mut self, v: usize, value: bool) -> bool {
        self.values[v] = Some(value);
        if v < self.code.info_len() {
            self.info_unknown -= 1;
        }
        let mut ok = true;
        for r in self.code.var_checks(v) {
            self.check_parity[r] ^= value;
            self.check_unknown[r] -= 1;
            self.check_missing[r] ^= v;
            match self.check_unknown[r] {
                1 => self.queue.push_back(r),
                0 => ok &= !self.check_parity[r],
                _ => {}
            }
        }
        ok
    }

    fn cascade(&mut self) -> bool {
        while let Some(r) = self.queue.pop_front() {
            if self.check_unknown[r] != 1 {
                continue;
            }
            let v = self.check_missing[r];
            let value = self.check_parity[r];
            if !self.assign(v, value) {
                self.queue.clear();
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_regular_code() {
        let code =
            StaircaseCode::irregular(4, Rate::HALF, &DegreeDistribution::regular(4), 3).unwrap();
        for col in code.left_cols() {
            assert_eq!(col, &[0, 1, 2, 3]);
        }
        let stairs: Vec<Vec<usize>> = (0..4)
            .map(|r| {
                code.check_vars(r)
                    .filter(|&v| v >= 4)
                    .map(|v| v - 4)
                    .collect()
            })
            .collect();
        assert_eq!(stairs, vec![vec![0], vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn rate_algebra() {
        let code = StaircaseCode::regular(64, Rate::THIRD, 1).unwrap();
        assert_eq!(code.checks(), 128);
        assert_eq!(code.rate(), Rate::THIRD);
        let code = StaircaseCode::regular(64, Rate::TWO_THIRDS, 1).unwrap();
        assert_eq!(code.checks(), 32);
        assert!(StaircaseCode::regular(63, Rate::TWO_THIRDS, 1).is_err());
        assert!(StaircaseCode::regular(6, Rate::TWO_THIRDS, 1).is_err());
    }

    #[test]
    fn hand_encoding() {
        let code = StaircaseCode::from_rows(2, vec![vec![0, 1], vec![1]]).unwrap();
        assert_eq!(
            code.encode(&[true, true]).unwrap(),
            vec![true, true, false, true]
        );
        assert!(code.is_codeword(&[true, true, false, true]));
        assert!(!code.is_codeword(&[true, true, true, true]));
        assert!(code.encode(&[true]).is_err());
    }

    #[test]
    fn zero_encodes_to_zero() {
        let code = StaircaseCode::regular(32, Rate::HALF, 8).unwrap();
        assert!(code.encode(&[false; 32]).unwrap().iter().all(|&b| !b));
    }

    #[test]
    fn distribution_rounding() {
        let d = DegreeDistribution::new(vec![(2, 0.5), (4, 0.5)]).unwrap();
        let degs = d.column_degrees(100);
        assert_eq!(degs.iter().filter(|&&x| x == 2).count(), 50);
        assert_eq!(degs.iter().filter(|&&x| x == 4).count(), 50);
        let d = DegreeDistribution::new(vec![(2, 0.3), (3, 0.3), (8, 0.4)]).unwrap();
        let degs = d.column_degrees(10);
        assert_eq!(degs.len(), 10);
        let d = DegreeDistribution::new(vec![(2, 1.0 / 3.0), (3, 2.0 / 3.0)]).unwrap();
        let degs = d.column_degrees(10);
        assert_eq!(degs.iter().filter(|&&x| x == 2).count(), 3);
        assert_eq!(degs.iter().filter(|&&x| x == 3).count(), 7);
    }

    #[test]
    fn distribution_errors() {
        assert!(DegreeDistribution::new(vec![(2, 0.5)]).is_err());
        assert!(DegreeDistribution::new(vec![(0, 1.0)]).is_err());
        assert!(DegreeDistribution::new(vec![(2, 0.5), (2, 0.5)]).is_err());
        assert!(DegreeDistribution::parse("2 0.5\n4").is_err());
        let d = DegreeDistribution::parse("# example\n2 0.25\n3 0.75  # tail\n").unwrap();
        assert_eq!(d.pairs(), &[(2, 0.25), (3, 0.75)]);
    }

    #[test]
    fn regular_equals_degenerate_irregular() {
        let a = StaircaseCode::regular(40, Rate::THIRD, 77).unwrap();
        let b =
            StaircaseCode::irregular(40, Rate::THIRD, &DegreeDistribution::regular(4), 77).unwrap();
        assert_eq!(a.left_cols(), b.left_cols());
    }

    #[test]
    fn infeasible_degree() {
        let d = DegreeDistribution::regular(5);
        assert!(matches!(
            StaircaseCode::irregular(8, Rate::TWO_THIRDS, &d, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn single_check_cascade() {
        // v0 + v1 = 0 with v1 the only parity
        let code = StaircaseCode::from_rows(1, vec![vec![0]]).unwrap();
        let mut dec = PeelingDecoder::new(&code);
        assert_eq!(dec.receive(0, true).unwrap(), DecodeStatus::Success);
        assert_eq!(dec.values(), &[Some(true), Some(true)]);
        assert_eq!(dec.receive(1, true).unwrap(), DecodeStatus::Success);
    }

    #[test]
    fn peeling_from_parity_only() {
        let code = StaircaseCode::from_rows(2, vec![vec![0, 1], vec![1]]).unwrap();
        let cw = code.encode(&[true, false]).unwrap();
        let mut dec = PeelingDecoder::new(&code);
        dec.receive(2, cw[2]).unwrap();
        assert_eq!(dec.status(), DecodeStatus::InProgress);
        dec.receive(3, cw[3]).unwrap();
        // check 1: v1 ^ p0 ^ p1 = 0 resolves v1, then check 0 resolves v0
        assert_eq!(dec.status(), DecodeStatus::Success);
        assert_eq!(dec.decoded().unwrap(), vec![true, false]);
        assert_eq!(dec.r_stop(), Some(2));
    }

    #[test]
    fn peeling_contradiction_and_errors() {
        let code = StaircaseCode::from_rows(1, vec![vec![0]]).unwrap();
        let mut dec = PeelingDecoder::new(&code);
        assert!(matches!(
            dec.receive(5, true),
            Err(Error::SymbolOutOfRange { .. })
        ));
        dec.receive(0, true).unwrap();
        assert!(matches!(
            dec.receive(0, true),
            Err(Error::DuplicateSymbol(0))
        ));
        assert_eq!(dec.receive(1, false).unwrap(), DecodeStatus::Contradiction);
        assert!(matches!(dec.receive(1, false), Err(Error::Halted)));
    }
}
