//! Command-line front end.
//!
//! Every run is described by a [`RunConfig`]. `--config FILE` loads one from
//! JSON; flags given on the command line override the file. The effective
//! configuration is echoed to stderr as a `# config:` line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::ldpc::{DegreeDistribution, StaircaseCode};
use crate::otf::TrellisState;
use crate::sim::{self, AnyCode, CodeFactory, ErasureCode, ErasureDecoder};
use crate::trellis::{render_table, Constituent, PolyBase, RscSpec};
use crate::turbo::{Interleaver, InterleaverKind, PunctureMap, TurboCode};
use crate::{DecodeStatus, Error, Rate, Result};

#[derive(Debug, Parser)]
#[command(name = "turbo-bec", disable_version_flag = true)]
#[command(about = "On-the-fly erasure decoding of turbo codes and staircase LDPC baselines")]
pub struct Cli {
    /// Load a JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Print the version and fingerprints of the configured code.
    #[arg(long)]
    pub version: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the transition table and lookup masks of an RSC code.
    Table(TableArgs),
    /// Encode an information word read from a hex file.
    Encode(EncodeArgs),
    /// Decode a list of `(index, bit)` receptions.
    Decode(DecodeArgs),
    /// Run and trace a single Monte-Carlo trial.
    Trial(TrialArgs),
    /// Measure the average inefficiency of one code.
    Simulate(SimArgs),
    /// Measure over a grid of K, rates and code families.
    Sweep(SimArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Feedback and forward polynomials, e.g. `7,5`.
    #[arg(long)]
    pub code: Option<String>,
    /// Base of the polynomials: octal or decimal.
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct CodeArgs {
    /// Code family: `turbo`, `ldpc-regular` or `ldpc-irregular:FILE`.
    #[arg(long)]
    pub code: Option<String>,
    /// RSC feedback and forward polynomials.
    #[arg(long)]
    pub poly: Option<String>,
    /// Base of the polynomials: octal or decimal.
    #[arg(long)]
    pub base: Option<String>,
    /// Information length(s); comma-separated for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Code rate(s) as fractions; comma-separated for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub rate: Option<Vec<String>>,
    /// `identity`, `pr:SEED` or `file:PATH`.
    #[arg(long)]
    pub interleaver: Option<String>,
    /// Puncturing override, e.g. `p1=10,p2=01`.
    #[arg(long)]
    pub puncture: Option<String>,
    /// Seed of the LDPC construction.
    #[arg(long)]
    pub code_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long = "in", value_name = "HEXFILE")]
    pub input: Option<PathBuf>,
    #[arg(long = "out", value_name = "HEXFILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// File of `index bit` pairs in arrival order.
    #[arg(long)]
    pub received: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Trial seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Trials per code (default 1000).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Campaign base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script plotting the CSV.
    #[arg(long)]
    pub emit_plot: Option<PathBuf>,
}

/// A fully serialisable description of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interleaver: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puncture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit_plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(self, other: RunConfig) -> RunConfig {
        RunConfig {
            command: other.command.or(self.command),
            code: other.code.or(self.code),
            poly: other.poly.or(self.poly),
            base: other.base.or(self.base),
            k: other.k.or(self.k),
            rate: other.rate.or(self.rate),
            interleaver: other.interleaver.or(self.interleaver),
            puncture: other.puncture.or(self.puncture),
            code_seed: other.code_seed.or(self.code_seed),
            trials: other.trials.or(self.trials),
            seed: other.seed.or(self.seed),
            input: other.input.or(self.input),
            output: other.output.or(self.output),
            received: other.received.or(self.received),
            emit_plot: other.emit_plot.or(self.emit_plot),
        }
    }

    fn from_code_args(command: &str, a: CodeArgs) -> RunConfig {
        RunConfig {
            command: Some(command.into()),
            code: a.code,
            poly: a.poly,
            base: a.base,
            k: a.k,
            rate: a.rate,
            interleaver: a.interleaver,
            puncture: a.puncture,
            code_seed: a.code_seed,
            ..RunConfig::default()
        }
    }

    fn from_command(command: Command) -> RunConfig {
        match command {
            Command::Table(a) => RunConfig {
                command: Some("table".into()),
                poly: a.code,
                base: a.base,
                ..RunConfig::default()
            },
            Command::Encode(a) => RunConfig {
                input: a.input,
                output: a.output,
                ..RunConfig::from_code_args("encode", a.code)
            },
            Command::Decode(a) => RunConfig {
                received: a.received,
                ..RunConfig::from_code_args("decode", a.code)
            },
            Command::Trial(a) => RunConfig {
                seed: a.seed,
                ..RunConfig::from_code_args("trial", a.code)
            },
            Command::Simulate(a) => RunConfig {
                trials: a.trials,
                seed: a.seed,
                output: a.out,
                emit_plot: a.emit_plot,
                ..RunConfig::from_code_args("simulate", a.code)
            },
            Command::Sweep(a) => RunConfig {
                trials: a.trials,
                seed: a.seed,
                output: a.out,
                emit_plot: a.emit_plot,
                ..RunConfig::from_code_args("sweep", a.code)
            },
        }
    }

    fn rsc(&self) -> Result<RscSpec> {
        let base: PolyBase = self.base.as_deref().unwrap_or("octal").parse()?;
        RscSpec::parse(self.poly.as_deref().unwrap_or("7,5"), base)
    }

    fn rates(&self) -> Result<Vec<Rate>> {
        match &self.rate {
            None => Ok(vec![Rate::THIRD]),
            Some(list) => list.iter().map(|r| r.parse()).collect(),
        }
    }

    fn single_rate(&self) -> Result<Rate> {
        one(self.rates()?, "--rate")
    }

    fn single_k(&self) -> Result<usize> {
        let ks = self
            .k
            .clone()
            .ok_or_else(|| Error::Parse("--k is required".into()))?;
        one(ks, "--k")
    }

    fn family(&self) -> Result<Family> {
        let rsc = self.rsc()?;
        let code_seed = self.code_seed.unwrap_or(0);
        let spec = self.code.as_deref().unwrap_or("turbo");
        if spec == "turbo" {
            let puncture = self
                .puncture
                .as_deref()
                .map(PunctureMap::parse)
                .transpose()?;
            let interleaver = self.interleaver.as_deref().unwrap_or("pr:0").parse()?;
            Ok(Family::Turbo {
                rsc,
                interleaver,
                puncture,
            })
        } else if spec == "ldpc-regular" {
            Ok(Family::LdpcRegular { code_seed })
        } else if let Some(path) = spec.strip_prefix("ldpc-irregular:") {
            Ok(Family::LdpcIrregular {
                dist: DegreeDistribution::load(path)?,
                code_seed,
            })
        } else {
            Err(Error::Parse(format!(
                "unknown code `{spec}`; expected turbo, ldpc-regular or ldpc-irregular:FILE"
            )))
        }
    }

    fn single_code(&self) -> Result<AnyCode> {
        self.family()?.build(self.single_k()?, self.single_rate()?)
    }
}

fn one<T>(mut v: Vec<T>, flag: &str) -> Result<T> {
    if v.len() != 1 {
        return Err(Error::Parse(format!("{flag} takes exactly one value here")));
    }
    Ok(v.remove(0))
}

/// Where the turbo interleaver comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterleaverSource {
    Identity,
    PseudoRandom(u64),
    File(PathBuf),
}

impl std::str::FromStr for InterleaverSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "identity" {
            Ok(InterleaverSource::Identity)
        } else if let Some(seed) = s.strip_prefix("pr:") {
            seed.parse()
                .map(InterleaverSource::PseudoRandom)
                .map_err(|_| Error::Parse(format!("bad interleaver seed in `{s}`")))
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(InterleaverSource::File(path.into()))
        } else {
            Err(Error::Parse(format!(
                "unknown interleaver `{s}`; expected identity, pr:SEED or file:PATH"
            )))
        }
    }
}

impl InterleaverSource {
    pub fn build(&self, k: usize) -> Result<Interleaver> {
        match self {
            InterleaverSource::Identity => Ok(Interleaver::identity(k)),
            InterleaverSource::PseudoRandom(seed) => Ok(Interleaver::pseudo_random(k, *seed)),
            InterleaverSource::File(path) => Interleaver::load(path),
        }
    }

    fn label(&self) -> String {
        match self {
            InterleaverSource::Identity => InterleaverKind::Identity.to_string(),
            InterleaverSource::PseudoRandom(seed) => {
                InterleaverKind::PseudoRandom { seed: *seed }.to_string()
            }
            InterleaverSource::File(path) => format!("file:{}", path.display()),
        }
    }
}

/// A code family parameterised by `K` and rate.
#[derive(Clone, Debug)]
pub enum Family {
    Turbo {
        rsc: RscSpec,
        interleaver: InterleaverSource,
        puncture: Option<PunctureMap>,
    },
    LdpcRegular {
        code_seed: u64,
    },
    LdpcIrregular {
        dist: DegreeDistribution,
        code_seed: u64,
    },
}

impl CodeFactory for Family {
    fn name(&self) -> String {
        match self {
            Family::Turbo { rsc, .. } => format!("turbo-{:o}_{:o}", rsc.feedback(), rsc.forward()),
            Family::LdpcRegular { .. } => "ldpc-regular".into(),
            Family::LdpcIrregular { .. } => "ldpc-irregular".into(),
        }
    }

    fn interleaver(&self) -> String {
        match self {
            Family::Turbo { interleaver, .. } => interleaver.label(),
            _ => "-".into(),
        }
    }

    fn build(&self, k: usize, rate: Rate) -> Result<AnyCode> {
        match self {
            Family::Turbo {
                rsc,
                interleaver,
                puncture,
            } => {
                let pi = interleaver.build(k)?;
                let code = match puncture {
                    Some(p) => {
                        let code = TurboCode::new(*rsc, k, pi, p.clone())?;
                        if code.rate() != rate {
                            return Err(Error::UnsupportedRate(format!(
                                "puncture pattern {p} gives rate {} but {rate} was requested",
                                code.rate()
                            )));
                        }
                        code
                    }
                    None => TurboCode::with_rate(*rsc, k, pi, rate)?,
                };
                Ok(AnyCode::Turbo(Box::new(code)))
            }
            Family::LdpcRegular { code_seed } => {
                Ok(AnyCode::Ldpc(StaircaseCode::regular(k, rate, *code_seed)?))
            }
            Family::LdpcIrregular { dist, code_seed } => Ok(AnyCode::Ldpc(
                StaircaseCode::irregular(k, rate, dist, *code_seed)?,
            )),
        }
    }
}

/// Packs bits MSB-first into bytes and hex-encodes them.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let bytes: Vec<u8> = bits
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
        })
        .collect();
    hex::encode(bytes)
}

/// Inverse of [`bits_to_hex`]; whitespace is ignored and trailing pad bits dropped.
pub fn hex_to_bits(text: &str, len: usize) -> Result<Vec<bool>> {
    let clean: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = hex::decode(&clean).map_err(|e| Error::Parse(format!("bad hex input: {e}")))?;
    if bytes.len() != len.div_ceil(8) {
        return Err(Error::LengthMismatch {
            expected: len,
            got: bytes.len() * 8,
        });
    }
    Ok((0..len)
        .map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
        .collect())
}

/// Parses `index bit` pairs, one per line (comma or whitespace separated).
pub fn parse_receptions(text: &str) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || {
            Error::Parse(format!(
                "line {}: expected `index bit`, got `{line}`",
                lineno + 1
            ))
        };
        let mut it = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty());
        let index = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let bit = match it.next() {
            Some("0") => false,
            Some("1") => true,
            _ => return Err(bad()),
        };
        if it.next().is_some() {
            return Err(bad());
        }
        out.push((index, bit));
    }
    Ok(out)
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn std::io::Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn version_text(cfg: &RunConfig) -> Result<String> {
    let mut s = format!("turbo-bec {}\n", env!("CARGO_PKG_VERSION"));
    let rsc = cfg.rsc()?;
    let _ = writeln!(s, "polynomial {rsc} L={}", rsc.constraint_length());
    if let Ok(k) = cfg.single_k() {
        if let Ok(AnyCode::Turbo(code)) = cfg.single_code() {
            let _ = writeln!(
                s,
                "interleaver {} K={k} sha256:{}",
                code.interleaver().kind(),
                code.interleaver().fingerprint()
            );
            let _ = writeln!(s, "puncture {} rate {}", code.puncture(), code.rate());
        }
    }
    Ok(s)
}

/// Runs the CLI on `args`, writing results to `out`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<i32> {
    let file_cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flag_cfg = cli.command.map(RunConfig::from_command).unwrap_or_default();
    let cfg = file_cfg.overlay(flag_cfg);

    if cli.version {
        write!(out, "{}", version_text(&cfg)?)?;
        return Ok(0);
    }
    let Some(command) = cfg.command.clone() else {
        writeln!(err, "error: a subcommand is required; see --help")?;
        return Ok(2);
    };
    writeln!(err, "# config: {}", cfg.to_json())?;

    match command.as_str() {
        "table" => {
            let constituent = Constituent::new(cfg.rsc()?);
            write!(out, "{}", render_table(&constituent))?;
            write!(out, "{}", render_boundary(&constituent))?;
            Ok(0)
        }
        "encode" => {
            let code = cfg.single_code()?;
            let input = cfg
                .input
                .as_ref()
                .ok_or_else(|| Error::Parse("--in is required".into()))?;
            let info = hex_to_bits(&std::fs::read_to_string(input)?, code.info_len())?;
            let cw = code.encode(&info)?;
            let text = format!("{}\n", bits_to_hex(&cw));
            write_or_print(cfg.output.as_deref(), &text, out)?;
            Ok(0)
        }
        "decode" => {
            let code = cfg.single_code()?;
            let path = cfg
                .received
                .as_ref()
                .ok_or_else(|| Error::Parse("--received is required".into()))?;
            let receptions = parse_receptions(&std::fs::read_to_string(path)?)?;
            decode_command(&code, &receptions, out)
        }
        "trial" => {
            let code = cfg.single_code()?;
            let seed = cfg.seed.unwrap_or(0);
            let mut trace = Vec::new();
            let rec = sim::run_trial_traced(&code, seed, Some(&mut trace))?;
            writeln!(out, "# r determined")?;
            for (r, d) in trace.iter().enumerate() {
                writeln!(out, "{} {d}", r + 1)?;
            }
            writeln!(out, "r_stop {}", rec.r_stop)?;
            writeln!(out, "mu {:.6}", rec.mu())?;
            Ok(0)
        }
        "simulate" | "sweep" => {
            let family = cfg.family()?;
            let ks = cfg
                .k
                .clone()
                .ok_or_else(|| Error::Parse("--k is required".into()))?;
            let rates = cfg.rates()?;
            let (ks, rates) = if command == "simulate" {
                (vec![one(ks, "--k")?], vec![one(rates, "--rate")?])
            } else {
                (ks, rates)
            };
            let trials = cfg.trials.unwrap_or(1000);
            let seed = cfg.seed.unwrap_or(0);
            let rows = sim::sweep(&[&family], &rates, &ks, trials, seed)?;
            let csv = sim::to_csv(&rows);
            write_or_print(cfg.output.as_deref(), &csv, out)?;
            if let Some(plot) = &cfg.emit_plot {
                let csv_name = cfg
                    .output
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "results.csv".into());
                std::fs::write(plot, sim::gnuplot_script(&csv_name, &rows))?;
            }
            Ok(0)
        }
        other => Err(Error::Parse(format!("unknown command `{other}`"))),
    }
}

/// Initial decoder masks of the sections next to the zero-state start and end.
fn render_boundary(constituent: &Constituent) -> String {
    let m = constituent.spec().memory();
    // long enough that start and end constraints do not interact
    let k = 4 * (m + 1);
    let trellis = TrellisState::new(constituent.lookup(), k, m);
    let mut out = String::new();
    for t in 0..m {
        let _ = writeln!(out, "\n# M({t})\n{}", trellis.mask(t));
    }
    for j in 0..m {
        let label = if j == 0 {
            "K".to_string()
        } else {
            format!("K+{j}")
        };
        let _ = writeln!(out, "\n# M({label})\n{}", trellis.mask(k + j));
    }
    out
}

fn decode_command(
    code: &AnyCode,
    receptions: &[(usize, bool)],
    out: &mut dyn std::io::Write,
) -> Result<i32> {
    let mut decoder = code.decoder();
    let mut status = DecodeStatus::InProgress;
    let mut r_stop = None;
    writeln!(out, "# r index bit determined status")?;
    for (r, &(index, bit)) in receptions.iter().enumerate() {
        status = decoder.receive(index, bit)?;
        writeln!(
            out,
            "{} {index} {} {} {status}",
            r + 1,
            bit as u8,
            decoder.determined_count()
        )?;
        if status == DecodeStatus::Success && r_stop.is_none() {
            r_stop = Some(r + 1);
        }
        if status == DecodeStatus::Contradiction {
            break;
        }
    }
    write!(out, "outcome {status}")?;
    if let Some(r) = r_stop {
        write!(
            out,
            " r_stop={r} mu={:.6}",
            r as f64 / code.info_len() as f64
        )?;
    }
    writeln!(out)?;
    if let Some(info) = decoder.decoded() {
        writeln!(out, "info {}", bits_to_hex(&info))?;
    }
    Ok(if status == DecodeStatus::Contradiction {
        1
    } else {
        0
    })
}
