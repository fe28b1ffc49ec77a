//! On-the-fly erasure decoding over the two constituent trellises.
//!
//! Each trellis keeps one [`TransitionMask`] per section. A received label bit
//! intersects the section mask with the matching lookup mask; a state with no
//! outgoing transition at step `t` loses its incoming transitions at `t-1`,
//! and a state with no incoming transition at `t` loses its outgoing ones at
//! `t+1`. When an information section collapses onto a single info value the
//! value is copied to the interleaved section of the other trellis. The
//! masks only shrink, so the final state is the unique closure of the
//! received set, independent of arrival order.

use std::collections::VecDeque;

use crate::trellis::{LookupMasks, TransitionMask};
use crate::turbo::{Stream, TurboCode};
use crate::{DecodeStatus, Error, Result};

/// Raised when a section loses every transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Contradiction {
    pub step: usize,
}

/// Section masks of one terminated trellis with a propagation worklist.
///
/// Sections `0..info_len` carry information bits; the last `L-1` sections are
/// the termination tail.
#[derive(Clone, Debug)]
pub struct TrellisState<'a> {
    lookup: &'a LookupMasks,
    info_len: usize,
    masks: Vec<TransitionMask>,
    determined: Vec<Option<bool>>,
    undetermined: usize,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    removals: usize,
}

impl<'a> TrellisState<'a> {
    /// Trellis of `info_len` information sections plus `memory` tail sections,
    /// starting and ending in the zero state.
    pub fn new(lookup: &'a LookupMasks, info_len: usize, memory: usize) -> Self {
        let steps = info_len + memory;
        let full = *lookup.full();
        let mut state = TrellisState {
            lookup,
            info_len,
            masks: vec![full; steps],
            determined: vec![None; info_len],
            undetermined: info_len,
            queue: VecDeque::new(),
            queued: vec![false; steps],
            removals: 0,
        };
        let others = !1u16;
        state.masks[0].clear_rows(others);
        state.masks[steps - 1].clear_cols(others);
        state.enqueue(0);
        state.enqueue(steps - 1);
        let mut newly = Vec::new();
        state
            .close(&mut newly)
            .expect("a terminated trellis always has a path");
        state.removals = 0;
        state
    }

    pub fn steps(&self) -> usize {
        self.masks.len()
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    pub fn mask(&self, t: usize) -> &TransitionMask {
        &self.masks[t]
    }

    pub fn masks(&self) -> &[TransitionMask] {
        &self.masks
    }

    /// Known information bits, one entry per information section.
    pub fn determined(&self) -> &[Option<bool>] {
        &self.determined
    }

    pub fn undetermined(&self) -> usize {
        self.undetermined
    }

    /// Mask entries removed since construction.
    pub fn removals(&self) -> usize {
        self.removals
    }

    fn enqueue(&mut self, t: usize) {
        if !self.queued[t] {
            self.queued[t] = true;
            self.queue.push_back(t);
        }
    }

    /// Called after section `t` lost entries.
    fn touched(&mut self, t: usize, newly: &mut Vec<(usize, bool)>) -> Result<(), Contradiction> {
        let mask = &self.masks[t];
        if mask.is_empty() {
            return Err(Contradiction { step: t });
        }
        if t < self.info_len && self.determined[t].is_none() {
            if let Some(b) = self.lookup.info_bit(mask) {
                self.determined[t] = Some(b);
                self.undetermined -= 1;
                newly.push((t, b));
            }
        }
        self.enqueue(t);
        Ok(())
    }

    /// Intersects section `t` with `with` and queues it for propagation.
    ///
    /// Information sections that become determined are appended to `newly`.
    /// Call [`close`](Self::close) afterwards.
    pub fn restrict(
        &mut self,
        t: usize,
        with: &TransitionMask,
        newly: &mut Vec<(usize, bool)>,
    ) -> Result<(), Contradiction> {
        let removed = self.masks[t].and_assign(with);
        if removed > 0 {
            self.removals += removed;
            self.touched(t, newly)?;
        }
        Ok(())
    }

    /// Runs left/right propagation until no section changes.
    pub fn close(&mut self, newly: &mut Vec<(usize, bool)>) -> Result<(), Contradiction> {
        while let Some(t) = self.queue.pop_front() {
            self.queued[t] = false;
            let mask = self.masks[t];
            let dead_sources = mask.zero_row_bits();
            if t > 0 && dead_sources != 0 {
                let removed = self.masks[t - 1].clear_cols(dead_sources);
                if removed > 0 {
                    self.removals += removed;
                    self.touched(t - 1, newly)?;
                }
            }
            let dead_targets = mask.zero_col_bits();
            if t + 1 < self.steps() && dead_targets != 0 {
                let removed = self.masks[t + 1].clear_rows(dead_targets);
                if removed > 0 {
                    self.removals += removed;
                    self.touched(t + 1, newly)?;
                }
            }
        }
        Ok(())
    }
}

/// Result of feeding symbols to a decoder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Symbols received when decoding first succeeded.
    pub r_stop: Option<usize>,
    pub info_len: usize,
}

impl DecodeOutcome {
    /// Inefficiency `r_stop / K`.
    pub fn mu(&self) -> Option<f64> {
        self.r_stop.map(|r| r as f64 / self.info_len as f64)
    }
}

/// The two-trellis on-the-fly decoder for a [`TurboCode`].
#[derive(Clone, Debug)]
pub struct OtfDecoder<'a> {
    code: &'a TurboCode,
    trellises: [TrellisState<'a>; 2],
    received: Vec<bool>,
    received_count: usize,
    status: DecodeStatus,
    r_stop: Option<usize>,
}

impl<'a> OtfDecoder<'a> {
    pub fn new(code: &'a TurboCode) -> OtfDecoder<'a> {
        let lookup = code.constituent().lookup();
        let trellis = TrellisState::new(lookup, code.info_len(), code.rsc().memory());
        OtfDecoder {
            code,
            trellises: [trellis.clone(), trellis],
            received: vec![false; code.block_len()],
            received_count: 0,
            status: DecodeStatus::InProgress,
            r_stop: None,
        }
    }

    pub fn code(&self) -> &TurboCode {
        self.code
    }

    /// Trellis `0` is the first constituent, `1` the interleaved one.
    pub fn trellis(&self, d: usize) -> &TrellisState<'a> {
        &self.trellises[d]
    }

    pub fn status(&self) -> DecodeStatus {
        self.status
    }

    pub fn received_count(&self) -> usize {
        self.received_count
    }

    pub fn outcome(&self) -> DecodeOutcome {
        DecodeOutcome {
            status: self.status,
            r_stop: self.r_stop,
            info_len: self.code.info_len(),
        }
    }

    /// Information bits as known by the first trellis.
    pub fn determined_bits(&self) -> &[Option<bool>] {
        self.trellises[0].determined()
    }

    pub fn determined_count(&self) -> usize {
        self.code.info_len() - self.trellises[0].undetermined()
    }

    /// The information word once every bit is known.
    pub fn decoded(&self) -> Option<Vec<bool>> {
        self.determined_bits().iter().copied().collect()
    }

    /// Total mask entries removed by receptions and propagation.
    pub fn removals(&self) -> usize {
        self.trellises[0].removals() + self.trellises[1].removals()
    }

    /// Feeds transmitted symbol `index` with value `value`.
    pub fn receive(&mut self, index: usize, value: bool) -> Result<DecodeStatus> {
        if self.status == DecodeStatus::Contradiction {
            return Err(Error::Halted);
        }
        let n = self.received.len();
        if index >= n {
            return Err(Error::SymbolOutOfRange { index, len: n });
        }
        if self.received[index] {
            return Err(Error::DuplicateSymbol(index));
        }
        self.received[index] = true;
        self.received_count += 1;

        if self.apply(index, value).is_err() {
            self.status = DecodeStatus::Contradiction;
            return Ok(self.status);
        }
        if self.status == DecodeStatus::InProgress && self.trellises[0].undetermined() == 0 {
            debug_assert_eq!(self.trellises[1].undetermined(), 0);
            self.status = DecodeStatus::Success;
            self.r_stop = Some(self.received_count);
        }
        Ok(self.status)
    }

    fn apply(&mut self, index: usize, value: bool) -> Result<(), Contradiction> {
        let symbol = self.code.symbol(index);
        let lookup = self.code.constituent().lookup();
        let mut newly: [Vec<(usize, bool)>; 2] = [Vec::new(), Vec::new()];
        match symbol.stream {
            Stream::Systematic => {
                let j = self.code.interleaver().apply(symbol.step);
                self.trellises[0].restrict(symbol.step, lookup.info(value), &mut newly[0])?;
                self.trellises[1].restrict(j, lookup.info(value), &mut newly[1])?;
            }
            Stream::Parity1 => {
                self.trellises[0].restrict(symbol.step, lookup.parity(value), &mut newly[0])?;
            }
            Stream::Parity2 => {
                self.trellises[1].restrict(symbol.step, lookup.parity(value), &mut newly[1])?;
            }
        }
        // Alternate closures, forwarding every newly determined info bit to the
        // other trellis, until neither trellis has pending work.
        let pi = self.code.interleaver();
        loop {
            let mut progressed = false;
            for d in 0..2 {
                self.trellises[d].close(&mut newly[d])?;
                let other = 1 - d;
                let (mine, theirs) = split_pair(&mut newly, d);
                for (t, b) in mine.drain(..) {
                    let target = if d == 0 { pi.apply(t) } else { pi.invert(t) };
                    self.trellises[other].restrict(target, lookup.info(b), theirs)?;
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        Ok(())
    }
}

fn split_pair<T>(pair: &mut [T; 2], first: usize) -> (&mut T, &mut T) {
    let [a, b] = pair;
    if first == 0 {
        (a, b)
    } else {
        (b, a)
    }
}
