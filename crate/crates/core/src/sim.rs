//! Monte-Carlo measurement of decoding inefficiency.
//!
//! A trial draws a uniform information word, encodes it, and feeds the
//! codeword symbols to a fresh decoder in a uniformly random order. The
//! number of symbols consumed when every information symbol is known is
//! `r_stop`, and the trial's inefficiency is `mu = r_stop / K`.
//!
//! Trial `i` of a campaign with base seed `s` uses the generator
//! `ChaCha8Rng::seed_from_u64(trial_seed(s, i))` for both the information
//! word and the arrival order, so campaigns are reproducible regardless of
//! how trials are scheduled across threads.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ldpc::{PeelingDecoder, StaircaseCode};
use crate::otf::OtfDecoder;
use crate::turbo::TurboCode;
use crate::{DecodeStatus, Error, Rate, Result};

/// A decoder fed one received symbol at a time.
pub trait ErasureDecoder {
    fn receive(&mut self, index: usize, value: bool) -> Result<DecodeStatus>;
    /// Number of information symbols currently known.
    fn determined_count(&self) -> usize;
    fn decoded(&self) -> Option<Vec<bool>>;
}

/// A code that can be measured by the harness.
pub trait ErasureCode: Sync {
    type Decoder<'a>: ErasureDecoder
    where
        Self: 'a;

    fn info_len(&self) -> usize;
    fn block_len(&self) -> usize;
    fn rate(&self) -> Rate;
    fn encode(&self, info: &[bool]) -> Result<Vec<bool>>;
    fn decoder(&self) -> Self::Decoder<'_>;
}

impl ErasureDecoder for OtfDecoder<'_> {
    fn receive(&mut self, index: usize, value: bool) -> Result<DecodeStatus> {
        OtfDecoder::receive(self, index, value)
    }

    fn determined_count(&self) -> usize {
        OtfDecoder::determined_count(self)
    }

    fn decoded(&self) -> Option<Vec<bool>> {
        OtfDecoder::decoded(self)
    }
}

impl ErasureCode for TurboCode {
    type Decoder<'a> = OtfDecoder<'a>;

    fn info_len(&self) -> usize {
        TurboCode::info_len(self)
    }

    fn block_len(&self) -> usize {
        TurboCode::block_len(self)
    }

    fn rate(&self) -> Rate {
        TurboCode::rate(self)
    }

    fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        TurboCode::encode(self, info)
    }

    fn decoder(&self) -> OtfDecoder<'_> {
        OtfDecoder::new(self)
    }
}

impl ErasureDecoder for PeelingDecoder<'_> {
    fn receive(&mut self, index: usize, value: bool) -> Result<DecodeStatus> {
        PeelingDecoder::receive(self, index, value)
    }

    fn determined_count(&self) -> usize {
        PeelingDecoder::determined_count(self)
    }

    fn decoded(&self) -> Option<Vec<bool>> {
        PeelingDecoder::decoded(self)
    }
}

impl ErasureCode for StaircaseCode {
    type Decoder<'a> = PeelingDecoder<'a>;

    fn info_len(&self) -> usize {
        StaircaseCode::info_len(self)
    }

    fn block_len(&self) -> usize {
        StaircaseCode::block_len(self)
    }

    fn rate(&self) -> Rate {
        StaircaseCode::rate(self)
    }

    fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        StaircaseCode::encode(self, info)
    }

    fn decoder(&self) -> PeelingDecoder<'_> {
        PeelingDecoder::new(self)
    }
}

/// Either code family behind one type, for configuration-driven runs.
#[derive(Clone, Debug)]
pub enum AnyCode {
    Turbo(Box<TurboCode>),
    Ldpc(StaircaseCode),
}

pub enum AnyDecoder<'a> {
    Turbo(OtfDecoder<'a>),
    Ldpc(PeelingDecoder<'a>),
}

impl ErasureDecoder for AnyDecoder<'_> {
    fn receive(&mut self, index: usize, value: bool) -> Result<DecodeStatus> {
        match self {
            AnyDecoder::Turbo(d) => d.receive(index, value),
            AnyDecoder::Ldpc(d) => d.receive(index, value),
        }
    }

    fn determined_count(&self) -> usize {
        match self {
            AnyDecoder::Turbo(d) => d.determined_count(),
            AnyDecoder::Ldpc(d) => d.determined_count(),
        }
    }

    fn decoded(&self) -> Option<Vec<bool>> {
        match self {
            AnyDecoder::Turbo(d) => d.decoded(),
            AnyDecoder::Ldpc(d) => d.decoded(),
        }
    }
}

impl ErasureCode for AnyCode {
    type Decoder<'a> = AnyDecoder<'a>;

    fn info_len(&self) -> usize {
        match self {
            AnyCode::Turbo(c) => c.info_len(),
            AnyCode::Ldpc(c) => c.info_len(),
        }
    }

    fn block_len(&self) -> usize {
        match self {
            AnyCode::Turbo(c) => c.block_len(),
            AnyCode::Ldpc(c) => c.block_len(),
        }
    }

    fn rate(&self) -> Rate {
        match self {
            AnyCode::Turbo(c) => c.rate(),
            AnyCode::Ldpc(c) => c.rate(),
        }
    }

    fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        match self {
            AnyCode::Turbo(c) => c.encode(info),
            AnyCode::Ldpc(c) => c.encode(info),
        }
    }

    fn decoder(&self) -> AnyDecoder<'_> {
        match self {
            AnyCode::Turbo(c) => AnyDecoder::Turbo(OtfDecoder::new(c)),
            AnyCode::Ldpc(c) => AnyDecoder::Ldpc(PeelingDecoder::new(c)),
        }
    }
}

/// SplitMix64 finaliser.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: `splitmix64(base ^ splitmix64(index))`.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index))
}

/// Outcome of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub r_stop: usize,
    pub info_len: usize,
}

impl TrialRecord {
    pub fn mu(&self) -> f64 {
        self.r_stop as f64 / self.info_len as f64
    }
}

/// Information word and symbol arrival order of a trial.
pub fn trial_inputs(info_len: usize, block_len: usize, seed: u64) -> (Vec<bool>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let info = (0..info_len).map(|_| rng.random::<bool>()).collect();
    let mut order: Vec<usize> = (0..block_len).collect();
    order.shuffle(&mut rng);
    (info, order)
}

/// Runs one trial, recording the number of determined information symbols
/// after each reception when `trace` is given.
pub fn run_trial_traced<C: ErasureCode>(
    code: &C,
    seed: u64,
    mut trace: Option<&mut Vec<usize>>,
) -> Result<TrialRecord> {
    let (info, order) = trial_inputs(code.info_len(), code.block_len(), seed);
    let codeword = code.encode(&info)?;
    let mut decoder = code.decoder();
    for (r, &index) in order.iter().enumerate() {
        let status = decoder.receive(index, codeword[index])?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(decoder.determined_count());
        }
        match status {
            DecodeStatus::InProgress => {}
            DecodeStatus::Contradiction => return Err(Error::Contradiction { seed }),
            DecodeStatus::Success => {
                if decoder.decoded().as_deref() != Some(&info[..]) {
                    return Err(Error::TrialFailed {
                        seed,
                        reason: "decoded word differs from the encoded word".into(),
                    });
                }
                return Ok(TrialRecord {
                    seed,
                    r_stop: r + 1,
                    info_len: code.info_len(),
                });
            }
        }
    }
    Err(Error::TrialFailed {
        seed,
        reason: "all symbols received without success".into(),
    })
}

pub fn run_trial<C: ErasureCode>(code: &C, seed: u64) -> Result<TrialRecord> {
    run_trial_traced(code, seed, None)
}

/// Aggregate inefficiency statistics of a campaign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunStats {
    pub trials: usize,
    pub rate: Rate,
    pub mu_av: f64,
    /// Sample standard deviation of `mu`.
    pub mu_std: f64,
    /// `1 - mu_av * R_c`
    pub p_th_est: f64,
    /// `1 - R_c`, the erasure probability a capacity-achieving code recovers.
    pub capacity: f64,
    /// `capacity - p_th_est`
    pub gap: f64,
}

impl RunStats {
    pub fn from_mu_av(mu_av: f64, mu_std: f64, trials: usize, rate: Rate) -> RunStats {
        let rc = rate.as_f64();
        let p_th_est = 1.0 - mu_av * rc;
        let capacity = 1.0 - rc;
        RunStats {
            trials,
            rate,
            mu_av,
            mu_std,
            p_th_est,
            capacity,
            gap: capacity - p_th_est,
        }
    }

    pub fn from_records(records: &[TrialRecord], rate: Rate) -> RunStats {
        let n = records.len();
        assert!(n > 0, "no trials");
        let mean = records.iter().map(TrialRecord::mu).sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = records.iter().map(|r| (r.mu() - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        RunStats::from_mu_av(mean, std, n, rate)
    }
}

/// All trial records of a campaign, in trial order, plus their aggregate.
#[derive(Clone, Debug)]
pub struct Campaign {
    pub records: Vec<TrialRecord>,
    pub stats: RunStats,
}

/// Runs `trials` independent trials in parallel.
pub fn run_campaign<C: ErasureCode>(code: &C, trials: usize, base_seed: u64) -> Result<Campaign> {
    if trials == 0 {
        return Err(Error::Parse("a campaign needs at least one trial".into()));
    }
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(code, trial_seed(base_seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let stats = RunStats::from_records(&records, code.rate());
    Ok(Campaign { records, stats })
}

/// One row of a sweep table.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub code: String,
    pub info_len: usize,
    pub interleaver: String,
    pub base_seed: u64,
    pub stats: RunStats,
}

pub const CSV_HEADER: &str = "code,rate,K,interleaver,trials,base_seed,mu_av,mu_std,p_th_est,gap";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let s = &self.stats;
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.code,
            s.rate,
            self.info_len,
            self.interleaver,
            s.trials,
            self.base_seed,
            s.mu_av,
            s.mu_std,
            s.p_th_est,
            s.gap
        )
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Builds the code for one sweep point.
pub trait CodeFactory: Sync {
    /// Label for the `code` CSV column.
    fn name(&self) -> String;
    /// Label for the `interleaver` CSV column.
    fn interleaver(&self) -> String;
    fn build(&self, info_len: usize, rate: Rate) -> Result<AnyCode>;
}

/// Runs every `(code, rate, K)` combination, in that nesting order.
pub fn sweep(
    codes: &[&dyn CodeFactory],
    rates: &[Rate],
    info_lens: &[usize],
    trials: usize,
    base_seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for factory in codes {
        for &rate in rates {
            for &k in info_lens {
                let code = factory.build(k, rate)?;
                let campaign = run_campaign(&code, trials, base_seed)?;
                rows.push(SweepRow {
                    code: factory.name(),
                    info_len: k,
                    interleaver: factory.interleaver(),
                    base_seed,
                    stats: campaign.stats,
                });
            }
        }
    }
    Ok(rows)
}

/// A gnuplot script plotting `mu_av` against `K` for each code and rate in `csv_path`.
pub fn gnuplot_script(csv_path: &str, rows: &[SweepRow]) -> String {
    let mut series: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.code.clone(), r.stats.rate.to_string());
        if !series.contains(&key) {
            series.push(key);
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set logscale x 2");
    let _ = writeln!(out, "set xlabel 'K'");
    let _ = writeln!(out, "set ylabel 'mu_av'");
    let plots: Vec<String> = series
        .iter()
        .map(|(code, rate)| {
            format!(
                "'{csv_path}' using (strcol(1) eq '{code}' && strcol(2) eq '{rate}' ? $3 : 1/0):7 \
                 with linespoints title '{code} R={rate}'"
            )
        })
        .collect();
    if plots.is_empty() {
        let _ = writeln!(out, "# no data");
    } else {
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    }
    out
}
