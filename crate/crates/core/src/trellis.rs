//! Rate-1/2 recursive systematic convolutional (RSC) constituents.
//!
//! Polynomials are written in octal with the most significant digit holding
//! the `D^0` coefficient, so `(7)_8 = 1 + D + D^2` and `(13)_8 = 1 + D^2 + D^3`.
//! The encoder register holds the last `L-1` feedback values `a_{t-1} .. a_{t-L+1}`
//! and a state index reads that register as a binary integer with `a_{t-1}` as
//! the most significant bit; state `0` is the all-zero state.

use std::fmt;

use crate::{Error, Result};

/// Largest supported constraint length; a mask row is a `u16`.
pub const MAX_CONSTRAINT_LENGTH: usize = 5;
/// Largest supported state count, `2^(MAX_CONSTRAINT_LENGTH - 1)`.
pub const MAX_STATES: usize = 1 << (MAX_CONSTRAINT_LENGTH - 1);

/// Number base used to write generator polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PolyBase {
    #[default]
    Octal,
    Decimal,
}

impl std::str::FromStr for PolyBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "octal" | "oct" | "8" => Ok(PolyBase::Octal),
            "decimal" | "dec" | "10" => Ok(PolyBase::Decimal),
            _ => Err(Error::Parse(format!("unknown polynomial base `{s}`"))),
        }
    }
}

/// A rate-1/2 RSC code: feedback and forward polynomials plus constraint length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RscSpec {
    feedback: u32,
    forward: u32,
    constraint_length: usize,
}

impl RscSpec {
    pub fn new(feedback: u32, forward: u32, constraint_length: usize) -> Result<RscSpec> {
        let l = constraint_length;
        if !(2..=MAX_CONSTRAINT_LENGTH).contains(&l) {
            return Err(Error::InvalidCode(format!(
                "constraint length {l} outside 2..={MAX_CONSTRAINT_LENGTH}"
            )));
        }
        let limit = 1u32 << l;
        if feedback >= limit || forward >= limit {
            return Err(Error::InvalidCode(format!(
                "polynomials ({feedback:o},{forward:o}) exceed degree {}",
                l - 1
            )));
        }
        if feedback & (1 << (l - 1)) == 0 {
            return Err(Error::InvalidCode(format!(
                "feedback polynomial {feedback:o} has no constant term"
            )));
        }
        if (feedback | forward) & 1 == 0 {
            return Err(Error::InvalidCode(format!(
                "neither polynomial reaches degree {} for L = {l}",
                l - 1
            )));
        }
        Ok(RscSpec {
            feedback,
            forward,
            constraint_length: l,
        })
    }

    /// Parses `"7,5"`; the constraint length is the bit width of the wider polynomial.
    pub fn parse(code: &str, base: PolyBase) -> Result<RscSpec> {
        let (fb, ff) = code
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `feedback,forward`, got `{code}`")))?;
        let radix = match base {
            PolyBase::Octal => 8,
            PolyBase::Decimal => 10,
        };
        let parse = |s: &str| {
            u32::from_str_radix(s.trim(), radix)
                .map_err(|_| Error::Parse(format!("bad polynomial `{s}` in base {radix}")))
        };
        let (fb, ff) = (parse(fb)?, parse(ff)?);
        let width = (32 - fb.max(ff).leading_zeros()) as usize;
        RscSpec::new(fb, ff, width)
    }

    pub fn feedback(&self) -> u32 {
        self.feedback
    }

    pub fn forward(&self) -> u32 {
        self.forward
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    /// Register length `L - 1`.
    pub fn memory(&self) -> usize {
        self.constraint_length - 1
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory()
    }

    /// Coefficient of `D^i` in `poly`.
    fn tap(&self, poly: u32, i: usize) -> u32 {
        (poly >> (self.constraint_length - 1 - i)) & 1
    }

    /// XOR of the register contents selected by the `D^1 .. D^m` taps of `poly`.
    fn register_sum(&self, poly: u32, state: usize) -> bool {
        let m = self.memory();
        let mut acc = 0;
        for i in 1..=m {
            acc ^= self.tap(poly, i) & ((state >> (m - i)) as u32 & 1);
        }
        acc == 1
    }

    /// One encoder step from `state` on `input`: returns `(next_state, parity)`.
    pub fn step(&self, state: usize, input: bool) -> (usize, bool) {
        let m = self.memory();
        let a = input ^ self.register_sum(self.feedback, state);
        let parity = (self.tap(self.forward, 0) == 1 && a) ^ self.register_sum(self.forward, state);
        let next = ((a as usize) << (m - 1)) | (state >> 1);
        (next, parity)
    }

    /// The input that shifts a zero into the register, used to terminate.
    pub fn tail_input(&self, state: usize) -> bool {
        self.register_sum(self.feedback, state)
    }

    /// Encodes `input` from the zero state and terminates with `L-1` tail steps.
    pub fn encode(&self, input: &[bool]) -> RscOutput {
        let mut state = 0;
        let mut parity = Vec::with_capacity(input.len());
        for &u in input {
            let (next, p) = self.step(state, u);
            parity.push(p);
            state = next;
        }
        let mut tail = Vec::with_capacity(self.memory());
        for _ in 0..self.memory() {
            let u = self.tail_input(state);
            let (next, p) = self.step(state, u);
            tail.push((u, p));
            state = next;
        }
        RscOutput {
            parity,
            tail,
            final_state: state,
        }
    }
}

impl fmt::Display for RscSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:o},{:o})_8", self.feedback, self.forward)
    }
}

/// Parity stream and termination tail of one constituent encoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RscOutput {
    pub parity: Vec<bool>,
    /// `(input, parity)` labels of the termination steps.
    pub tail: Vec<(bool, bool)>,
    pub final_state: usize,
}

/// Branch label `b1 b2`: systematic bit and parity bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub info: bool,
    pub parity: bool,
}

/// State-to-state transitions of one trellis section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionTable {
    num_states: usize,
    labels: Vec<Option<Label>>,
}

impl TransitionTable {
    pub fn build(spec: &RscSpec) -> TransitionTable {
        let n = spec.num_states();
        let mut labels = vec![None; n * n];
        for from in 0..n {
            for input in [false, true] {
                let (to, parity) = spec.step(from, input);
                labels[from * n + to] = Some(Label {
                    info: input,
                    parity,
                });
            }
        }
        TransitionTable {
            num_states: n,
            labels,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn label(&self, from: usize, to: usize) -> Option<Label> {
        self.labels[from * self.num_states + to]
    }

    /// All transitions as `(from, to, label)`.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        let n = self.num_states;
        self.labels
            .iter()
            .enumerate()
            .filter_map(move |(idx, l)| l.map(|l| (idx / n, idx % n, l)))
    }
}

/// Knowledge about the two bits of a branch label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct LabelConstraint {
    pub info: Option<bool>,
    pub parity: Option<bool>,
}

impl LabelConstraint {
    pub const UNKNOWN: LabelConstraint = LabelConstraint {
        info: None,
        parity: None,
    };

    pub fn info(b: bool) -> Self {
        LabelConstraint {
            info: Some(b),
            parity: None,
        }
    }

    pub fn parity(b: bool) -> Self {
        LabelConstraint {
            info: None,
            parity: Some(b),
        }
    }

    /// The nine constraints in the order `xx, x0, x1, 0x, 00, 01, 1x, 10, 11`.
    pub fn all() -> impl Iterator<Item = LabelConstraint> {
        const VALUES: [Option<bool>; 3] = [None, Some(false), Some(true)];
        VALUES.into_iter().flat_map(|info| {
            VALUES
                .into_iter()
                .map(move |parity| LabelConstraint { info, parity })
        })
    }

    fn index(&self) -> usize {
        let digit = |v: Option<bool>| match v {
            None => 0,
            Some(false) => 1,
            Some(true) => 2,
        };
        3 * digit(self.info) + digit(self.parity)
    }

    pub fn matches(&self, label: Label) -> bool {
        self.info.is_none_or(|b| b == label.info) && self.parity.is_none_or(|b| b == label.parity)
    }

    /// True when every position known in `other` is known with the same value here.
    pub fn refines(&self, other: &LabelConstraint) -> bool {
        let pos = |mine: Option<bool>, theirs: Option<bool>| theirs.is_none() || mine == theirs;
        pos(self.info, other.info) && pos(self.parity, other.parity)
    }
}

impl fmt::Display for LabelConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |v: Option<bool>| match v {
            None => 'x',
            Some(false) => '0',
            Some(true) => '1',
        };
        write!(f, "{}{}", c(self.info), c(self.parity))
    }
}

/// Boolean matrix of allowed transitions between consecutive trellis states.
///
/// Row `i` is a bit field over destination states; bit `j` set means the
/// transition `e_i -> e_j` is allowed.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransitionMask {
    num_states: u8,
    rows: [u16; MAX_STATES],
}

impl TransitionMask {
    pub fn empty(num_states: usize) -> TransitionMask {
        assert!(num_states <= MAX_STATES, "too many states: {num_states}");
        TransitionMask {
            num_states: num_states as u8,
            rows: [0; MAX_STATES],
        }
    }

    /// Builds a mask from rows written as `"1010"`, column 0 first.
    ///
    /// Panics on malformed input; meant for literals.
    pub fn from_rows(rows: &[&str]) -> TransitionMask {
        let mut m = TransitionMask::empty(rows.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "mask must be square");
            for (j, c) in row.chars().enumerate() {
                match c {
                    '1' => m.set(i, j),
                    '0' => {}
                    _ => panic!("bad mask character {c:?}"),
                }
            }
        }
        m
    }

    pub fn num_states(&self) -> usize {
        self.num_states as usize
    }

    fn all_states(&self) -> u16 {
        ((1u32 << self.num_states) - 1) as u16
    }

    pub fn get(&self, from: usize, to: usize) -> bool {
        self.rows[from] >> to & 1 == 1
    }

    pub fn set(&mut self, from: usize, to: usize) {
        self.rows[from] |= 1 << to;
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_subset(&self, other: &TransitionMask) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// Elementwise conjunction.
    pub fn and(&self, other: &TransitionMask) -> TransitionMask {
        assert_eq!(self.num_states, other.num_states, "mask dimension mismatch");
        let mut out = *self;
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            *a &= b;
        }
        out
    }

    /// In-place conjunction; returns the number of entries removed.
    pub fn and_assign(&mut self, other: &TransitionMask) -> usize {
        debug_assert_eq!(self.num_states, other.num_states, "mask dimension mismatch");
        let mut removed = 0;
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            removed += (*a & !b).count_ones() as usize;
            *a &= b;
        }
        removed
    }

    /// Bit set of source states with no allowed outgoing transition.
    pub fn zero_row_bits(&self) -> u16 {
        let mut bits = 0;
        for (i, &r) in self.rows[..self.num_states()].iter().enumerate() {
            if r == 0 {
                bits |= 1 << i;
            }
        }
        bits
    }

    /// Bit set of destination states with no allowed incoming transition.
    pub fn zero_col_bits(&self) -> u16 {
        let used = self.rows.iter().fold(0, |acc, r| acc | r);
        !used & self.all_states()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        bit_indices(self.zero_row_bits())
    }

    pub fn zero_cols(&self) -> Vec<usize> {
        bit_indices(self.zero_col_bits())
    }

    /// Clears every row in `states`; returns the number of entries removed.
    pub fn clear_rows(&mut self, states: u16) -> usize {
        let mut removed = 0;
        for i in bit_indices(states) {
            removed += self.rows[i].count_ones() as usize;
            self.rows[i] = 0;
        }
        removed
    }

    /// Clears every column in `states`; returns the number of entries removed.
    pub fn clear_cols(&mut self, states: u16) -> usize {
        let mut removed = 0;
        for r in self.rows.iter_mut() {
            removed += (*r & states).count_ones() as usize;
            *r &= !states;
        }
        removed
    }
}

fn bit_indices(bits: u16) -> Vec<usize> {
    (0..16).filter(|i| bits >> i & 1 == 1).collect()
}

impl fmt::Display for TransitionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.num_states() {
            for j in 0..self.num_states() {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            if i + 1 < self.num_states() {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TransitionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.num_states())
            .map(|i| {
                (0..self.num_states())
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        write!(f, "TransitionMask[{}]", rows.join(";"))
    }
}

/// The `3^n` lookup masks of one code, indexed by [`LabelConstraint`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupMasks {
    masks: [TransitionMask; 9],
}

impl LookupMasks {
    pub fn build(table: &TransitionTable) -> LookupMasks {
        let mut masks = [TransitionMask::empty(table.num_states()); 9];
        for c in LabelConstraint::all() {
            let mask = &mut masks[c.index()];
            for (from, to, label) in table.transitions() {
                if c.matches(label) {
                    mask.set(from, to);
                }
            }
        }
        LookupMasks { masks }
    }

    pub fn get(&self, c: LabelConstraint) -> &TransitionMask {
        &self.masks[c.index()]
    }

    /// `T_xx`, the full adjacency of one section.
    pub fn full(&self) -> &TransitionMask {
        self.get(LabelConstraint::UNKNOWN)
    }

    /// `T_bx`.
    pub fn info(&self, b: bool) -> &TransitionMask {
        self.get(LabelConstraint::info(b))
    }

    /// `T_xb`.
    pub fn parity(&self, b: bool) -> &TransitionMask {
        self.get(LabelConstraint::parity(b))
    }

    /// True iff `m` is nonempty and every transition it allows carries info bit `b`.
    ///
    /// The empty mask is a contradiction, not a determination, and yields `false`.
    pub fn is_subset_info(&self, m: &TransitionMask, b: bool) -> bool {
        !m.is_empty() && m.is_subset(self.info(b))
    }

    /// The info bit forced by `m`, if any.
    pub fn info_bit(&self, m: &TransitionMask) -> Option<bool> {
        [false, true]
            .into_iter()
            .find(|&b| self.is_subset_info(m, b))
    }
}

/// An RSC constituent with its precomputed table and lookup masks.
#[derive(Clone, Debug)]
pub struct Constituent {
    spec: RscSpec,
    table: TransitionTable,
    lookup: LookupMasks,
}

impl Constituent {
    pub fn new(spec: RscSpec) -> Constituent {
        let table = TransitionTable::build(&spec);
        let lookup = LookupMasks::build(&table);
        Constituent {
            spec,
            table,
            lookup,
        }
    }

    pub fn spec(&self) -> &RscSpec {
        &self.spec
    }

    pub fn table(&self) -> &TransitionTable {
        &self.table
    }

    pub fn lookup(&self) -> &LookupMasks {
        &self.lookup
    }
}

/// Renders the transition table and all lookup masks as plain text.
pub fn render_table(constituent: &Constituent) -> String {
    use std::fmt::Write;

    let table = constituent.table();
    let n = table.num_states();
    let m = constituent.spec().memory();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# RSC {} L={} states={}",
        constituent.spec(),
        constituent.spec().constraint_length(),
        n
    );
    let _ = writeln!(
        out,
        "# rows: from-state, columns: to-state, entry: b1b2 or X"
    );
    let name = |s: usize| format!("e{}={:0width$b}", s + 1, s, width = m);
    let mut header = " ".repeat(name(0).len());
    for j in 0..n {
        let _ = write!(header, " {:<3}", format!("e{}", j + 1));
    }
    let _ = writeln!(out, "{}", header.trim_end());
    for i in 0..n {
        let _ = write!(out, "{}", name(i));
        for j in 0..n {
            match table.label(i, j) {
                Some(l) => {
                    let _ = write!(out, " {}{} ", l.info as u8, l.parity as u8);
                }
                None => out.push_str(" X  "),
            }
        }
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
    }
    for c in LabelConstraint::all() {
        let _ = writeln!(out, "\n# T_{c}");
        let _ = writeln!(out, "{}", constituent.lookup().get(c));
    }
    out
}
