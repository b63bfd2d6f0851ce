//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit code:
//! `0` success or verdict HOLDS/INDETERMINATE, `1` a FAILS verdict or a
//! certificate failure, `2` usage error, `3` runtime or capability error.
//!
//! Data goes to `out` (or `--out FILE`), diagnostics to `err`. Every output
//! starts with the tool, version and resolved configuration of the run.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::Natural;
use crate::bounds::{self, VerdictKind};
use crate::certificate::{self, CertificateConfig, GapRecord, OffsetRange, RunControl};
use crate::collision::{self, check_eq12, from_param, ParamTuple};
use crate::lemma::{self, NmaxGrid, PiMode};
use crate::sieve::{self, ScanOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Names the directory used for default certificate checkpoints.
pub const CACHE_DIR_ENV: &str = "BINOCOLL_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "binocoll", version, about = "Binomial collisions, explicit prime bounds and the gap certificate")]
struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads, 0 for every core. Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file supplying defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write data here instead of the output stream.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Jsonl,
    Text,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Every value with two or more representations C(x, a), 2 <= a <= x/2.
    Search(SearchArgs),
    /// Members of the Fibonacci collision family.
    FibFamily(FibArgs),
    /// Parameters (delta, n, m, k, l) of a pair C(x, a), C(y, b).
    Param(PairArgs),
    #[command(subcommand)]
    Bounds(BoundsCmd),
    #[command(subcommand)]
    Lemma(LemmaCmd),
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Prime-gap smoothness certificate.
    Certify(CertifyArgs),
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
struct SearchArgs {
    /// Largest value searched (decimal).
    #[arg(long)]
    max_value: Option<String>,
    /// Largest row searched.
    #[arg(long)]
    max_row: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct FibArgs {
    /// Members i = 0 .. count-1.
    #[arg(long, default_value_t = 5)]
    count: u64,
}

#[derive(Args, Debug, Serialize)]
struct PairArgs {
    #[arg(long)]
    x: u64,
    #[arg(long)]
    a: u64,
    #[arg(long)]
    y: u64,
    #[arg(long)]
    b: u64,
}

#[derive(Args, Debug, Serialize, Clone, Copy)]
struct TupleArgs {
    #[arg(long, allow_negative_numbers = true)]
    delta: i64,
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    #[arg(long, allow_negative_numbers = true)]
    m: i64,
    #[arg(long, allow_negative_numbers = true)]
    k: i64,
    #[arg(long, allow_negative_numbers = true)]
    l: i64,
}

impl TupleArgs {
    fn tuple(&self) -> ParamTuple {
        ParamTuple::new(self.delta, self.n, self.m, self.k, self.l)
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BoundsCmd {
    /// Dusart upper bound for pi(x).
    PiUpper {
        #[arg(long)]
        x: f64,
    },
    /// Robbins bounds for log(nu!).
    Stirling {
        #[arg(long)]
        nu: u64,
    },
    /// Both large-l thresholds and the critical constant.
    Thresholds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PiArg {
    Exact,
    Dusart,
}

impl From<PiArg> for PiMode {
    fn from(p: PiArg) -> PiMode {
        match p {
            PiArg::Exact => PiMode::Exact,
            PiArg::Dusart => PiMode::Dusart,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LemmaCmd {
    /// Product identity and ratio identity, derived and printed forms.
    Identity(TupleArgs),
    /// Upper and lower bounds on (l - delta) log(...).
    #[command(visible_alias = "check21")]
    LogRatio(TupleArgs),
    /// Whether k is small enough to force l = delta.
    #[command(visible_alias = "check22")]
    Forcing {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
    },
    /// Smoothness of the index windows below and above n.
    #[command(visible_alias = "check23")]
    Smoothness(TupleArgs),
    /// Valuation inequality for (n - k).
    #[command(visible_alias = "check31")]
    Valuation {
        #[command(flatten)]
        tuple: TupleArgs,
        #[arg(long, value_enum, default_value = "exact")]
        pi: PiArg,
    },
    /// Last F where the sum-threshold expression is nonnegative.
    #[command(visible_alias = "threshold32")]
    SumThreshold,
    /// Explicit bound on n from the valuation inequality.
    #[command(visible_alias = "nmax31")]
    NBound {
        #[arg(long, default_value_t = 588)]
        k_lo: u64,
        #[arg(long, default_value_t = 871_155)]
        k_hi: u64,
        #[arg(long, default_value_t = 20_000)]
        dense_l_until: u64,
        #[arg(long, value_enum, default_value = "dusart")]
        pi: PiArg,
    },
    /// Small-case contradiction at k, and the product bounds for a tuple.
    #[command(visible_alias = "section4")]
    SmallCase {
        #[arg(long)]
        k: u64,
        #[arg(long, allow_negative_numbers = true, requires_all = ["n", "m", "l"])]
        delta: Option<i64>,
        #[arg(long, requires_all = ["delta", "m", "l"])]
        n: Option<i64>,
        #[arg(long, allow_negative_numbers = true, requires_all = ["delta", "n", "l"])]
        m: Option<i64>,
        #[arg(long, requires_all = ["delta", "n", "m"])]
        l: Option<i64>,
    },
    /// Large-l thresholds and their consistency check.
    #[command(visible_alias = "section5")]
    LargeL {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c: f64,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SieveCmd {
    /// Primes p in [lo, hi) whose gap to the next prime is at least min_gap.
    Gaps {
        #[arg(long, default_value_t = 2)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 2)]
        min_gap: u64,
    },
    /// pi(x), theta(x) and psi(x).
    Pi {
        #[arg(long)]
        x: u64,
    },
    /// Largest prime <= x and smallest prime > x.
    Neighbors {
        #[arg(long)]
        x: u64,
    },
}

#[derive(Args, Debug, Serialize, Default)]
struct CertifyArgs {
    #[arg(long)]
    qmax: Option<u64>,
    #[arg(long)]
    gap_min: Option<u64>,
    /// Comma-separated offset windows, e.g. 152-156,303-308.
    #[arg(long)]
    windows: Option<String>,
    #[arg(long)]
    smooth_bound: Option<u64>,
    #[arg(long)]
    gap_cap: Option<u64>,
    #[arg(long)]
    window_len: Option<u64>,
    /// Sieve bitmap bytes per segment.
    #[arg(long)]
    segment_size: Option<usize>,
    #[serde(skip)]
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Stop after this many segments, leaving a checkpoint.
    #[serde(skip)]
    #[arg(long)]
    stop_after: Option<u64>,
    /// Stream every gap prime and its refutations as JSONL.
    #[serde(skip)]
    #[arg(long)]
    events: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// errors and config file
// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Runtime(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

const FILE_KEYS: &[&str] = &[
    "format",
    "threads",
    "qmax",
    "gap_min",
    "windows",
    "smooth_bound",
    "gap_cap",
    "window_len",
    "segment_size",
    "checkpoint",
];

/// `key = value` lines; `#` starts a comment.
fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), no + 1)))?;
        let k = k.trim().replace('-', "_");
        if !FILE_KEYS.contains(&k.as_str()) {
            return Err(usage(format!("{}:{}: unknown key `{k}`", path.display(), no + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

fn file_value<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|e| usage(format!("config key `{key}`: {e}"))))
        .transpose()
}

fn parse_windows(s: &str) -> Result<Vec<OffsetRange>, CliError> {
    s.split(',').map(|w| w.trim().parse::<OffsetRange>().map_err(usage)).collect()
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

enum Payload {
    One(Value),
    Many(Vec<Value>),
}

struct Outcome {
    payload: Payload,
    fails: bool,
    default_format: Format,
}

impl Outcome {
    fn one<T: Serialize>(v: &T, fails: bool) -> Result<Outcome, CliError> {
        Ok(Outcome { payload: Payload::One(serde_json::to_value(v)?), fails, default_format: Format::Json })
    }

    fn many<T: Serialize>(items: &[T]) -> Result<Outcome, CliError> {
        let values = items.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?;
        Ok(Outcome { payload: Payload::Many(values), fails: false, default_format: Format::Jsonl })
    }
}

fn is_fails(v: VerdictKind) -> bool {
    v == VerdictKind::Fails
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_text(v: &Value, w: &mut dyn Write) -> io::Result<()> {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                writeln!(w, "{k}: {}", compact(val))?;
            }
            Ok(())
        }
        other => writeln!(w, "{}", compact(other)),
    }
}

fn emit(header: &Value, outcome: &Outcome, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match (format, &outcome.payload) {
        (Format::Json, payload) => {
            let result = match payload {
                Payload::One(v) => v.clone(),
                Payload::Many(items) => Value::Array(items.clone()),
            };
            let mut doc = header.clone();
            doc["result"] = result;
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)
        }
        (Format::Jsonl, payload) => {
            writeln!(w, "{header}")?;
            match payload {
                Payload::One(v) => writeln!(w, "{v}"),
                Payload::Many(items) => items.iter().try_for_each(|v| writeln!(w, "{v}")),
            }
        }
        (Format::Text, payload) => {
            writeln!(w, "# {} {} {} {}", header["tool"].as_str().unwrap_or(""), header["version"].as_str().unwrap_or(""), compact(&header["command"]), header["config"])?;
            match payload {
                Payload::One(v) => render_text(v, w),
                Payload::Many(items) => items.iter().try_for_each(|v| writeln!(w, "{}", compact(v))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match run_cli(cli, out, err) {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_RUNTIME
        }
    }
}

/// Subcommand path and the serialized arguments of the leaf command.
fn describe(c: &Command) -> (String, Value) {
    fn val<T: Serialize>(v: &T) -> Value {
        serde_json::to_value(v).unwrap_or(Value::Null)
    }
    // externally tagged enums serialize as {"variant": {args}}
    fn inner(v: Value) -> Value {
        match v {
            Value::Object(m) if m.len() == 1 => m.into_iter().next().map(|(_, x)| x).unwrap_or(Value::Null),
            Value::String(_) => json!({}),
            other => other,
        }
    }
    let name = |v: &Value| match v {
        Value::Object(m) => m.keys().next().cloned().unwrap_or_default(),
        Value::String(s) => s.clone(),
        _ => String::new(),
    };
    match c {
        Command::Search(a) => ("search".into(), val(a)),
        Command::FibFamily(a) => ("fib-family".into(), val(a)),
        Command::Param(a) => ("param".into(), val(a)),
        Command::Certify(a) => ("certify".into(), val(a)),
        Command::Bounds(b) => (format!("bounds {}", name(&val(b))), inner(val(b))),
        Command::Lemma(l) => (format!("lemma {}", name(&val(l))), inner(val(l))),
        Command::Sieve(s) => (format!("sieve {}", name(&val(s))), inner(val(s))),
    }
}

fn run_cli(mut cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let threads = match cli.threads {
        Some(t) => t,
        None => file_value(&file, "threads")?.unwrap_or(0),
    };
    let format = match cli.format {
        Some(f) => Some(f),
        None => file_value::<Format>(&file, "format")?,
    };

    let mut certify_config = None;
    if let Command::Certify(args) = &mut cli.command {
        let cfg = certify_config_from(args, &file, threads)?;
        // echo the resolved values, not just the flags given
        args.qmax = Some(cfg.q_max);
        args.gap_min = Some(cfg.gap_min);
        args.windows = Some(cfg.windows.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","));
        args.smooth_bound = Some(cfg.smooth_bound);
        args.gap_cap = Some(cfg.gap_cap);
        args.window_len = Some(cfg.window_len);
        args.segment_size = Some(cfg.segment_size);
        certify_config = Some(cfg);
    }

    let (command, config) = describe(&cli.command);
    let header = json!({
        "tool": certificate::TOOL,
        "version": certificate::VERSION,
        "command": command,
        "config": config,
    });

    let outcome = match &cli.command {
        Command::Search(a) => search(a)?,
        Command::FibFamily(a) => {
            let members = (0..a.count).map(collision::fib_identity).collect::<Result<Vec<_>, _>>()?;
            Outcome::many(&members)?
        }
        Command::Param(p) => param(p)?,
        Command::Bounds(b) => bounds_cmd(b)?,
        Command::Lemma(l) => lemma_cmd(l, threads)?,
        Command::Sieve(s) => sieve_cmd(s, threads)?,
        Command::Certify(a) => {
            let cfg = certify_config.expect("resolved above");
            writeln!(
                err,
                "# threads={} checkpoint={}",
                sieve::resolve_threads(threads),
                cfg.checkpoint_path.as_ref().map_or("none".into(), |p| p.display().to_string())
            )?;
            certify(&cfg, a)?
        }
    };

    let format = format.unwrap_or(outcome.default_format);
    // a closed reader (for example `| head`) ends the output quietly
    let quiet_pipe = |r: io::Result<()>| match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    };
    match &cli.out {
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            let mut w = io::BufWriter::new(f);
            emit(&header, &outcome, format, &mut w)?;
            w.flush()?;
        }
        None => quiet_pipe(emit(&header, &outcome, format, out))?,
    }
    Ok(if outcome.fails { EXIT_FAILS } else { EXIT_OK })
}

fn search(a: &SearchArgs) -> Result<Outcome, CliError> {
    let records = match (&a.max_value, a.max_row) {
        (Some(v), _) => {
            let v: Natural = v.parse().map_err(|_| usage(format!("--max-value `{v}` is not a nonnegative integer")))?;
            collision::enumerate_collisions(&v)?
        }
        (None, Some(y)) => collision::collisions_below_row(y),
        (None, None) => return Err(usage("one of --max-value or --max-row is required")),
    };
    Outcome::many(&records)
}

fn param(p: &PairArgs) -> Result<Outcome, CliError> {
    let t = collision::to_param(p.x, p.a, p.y, p.b)?;
    let (x, a, y, b) = from_param(&t);
    let v = json!({
        "tuple": t,
        "roundtrip": [x, a, y, b],
        "binomial_equation": check_eq12(&t),
        "product_identity": lemma::product_identity_holds(&t),
    });
    Outcome::one(&v, false)
}

fn bounds_cmd(b: &BoundsCmd) -> Result<Outcome, CliError> {
    match *b {
        BoundsCmd::PiUpper { x } => {
            let v = bounds::pi_upper_dusart(x)?;
            Outcome::one(&json!({ "x": x, "pi_upper": v }), false)
        }
        BoundsCmd::Stirling { nu } => {
            let s = bounds::stirling_log_bounds(nu)?;
            Outcome::one(&json!({ "nu": nu, "log_g_minus": s.log_g_minus, "log_g_plus": s.log_g_plus }), false)
        }
        BoundsCmd::Thresholds { n, c } => Outcome::one(&bounds::large_l_thresholds(n, c)?, false),
    }
}

fn lemma_cmd(l: &LemmaCmd, threads: usize) -> Result<Outcome, CliError> {
    match l {
        LemmaCmd::Identity(t) => {
            let t = t.tuple();
            let v = json!({
                "tuple": t,
                "binomial_equation": check_eq12(&t),
                "product_identity": lemma::product_identity_holds(&t),
                "product_identity_as_printed": lemma::printed_product_identity_holds(&t),
                "ratio_identity": lemma::ratio_identity_holds(&t),
                "ratio_identity_as_printed": lemma::printed_ratio_identity_holds(&t),
            });
            Outcome::one(&v, false)
        }
        LemmaCmd::LogRatio(t) => {
            let r = lemma::check_log_ratio_bounds(&t.tuple());
            Outcome::one(&r, is_fails(r.verdict))
        }
        LemmaCmd::Forcing { n, k } => {
            let r = lemma::check_small_k_forcing(*n, *k);
            Outcome::one(&r, is_fails(r.verdict))
        }
        LemmaCmd::Smoothness(t) => {
            let r = lemma::check_window_smoothness(&t.tuple())?;
            Outcome::one(&r, is_fails(r.verdict))
        }
        LemmaCmd::Valuation { tuple, pi } => {
            let r = lemma::check_valuation_bound(&tuple.tuple(), (*pi).into())?;
            Outcome::one(&r, is_fails(r.verdict))
        }
        LemmaCmd::SumThreshold => Outcome::one(&lemma::sum_threshold_crossover()?, false),
        LemmaCmd::NBound { k_lo, k_hi, dense_l_until, pi } => {
            let grid = NmaxGrid { k_lo: *k_lo, k_hi: *k_hi, dense_l_until: *dense_l_until, pi_mode: (*pi).into(), threads };
            Outcome::one(&lemma::max_n_from_valuation_bound(&grid)?, false)
        }
        LemmaCmd::SmallCase { k, delta, n, m, l } => {
            let c = lemma::small_case_contradiction(*k)?;
            let fails = !c.contradiction;
            let mut v = json!({ "contradiction": c });
            if let (Some(d), Some(n), Some(m), Some(l)) = (delta, n, m, l) {
                let r = lemma::check_binomial_product_bounds(&ParamTuple::new(*d, *n, *m, *k as i64, *l))?;
                v["product_bounds"] = serde_json::to_value(&r)?;
            }
            Outcome::one(&v, fails)
        }
        LemmaCmd::LargeL { n, c } => {
            let r = lemma::large_l_consistency(*n, *c)?;
            let fails = is_fails(r.consistency.verdict);
            Outcome::one(&r, fails)
        }
    }
}

fn sieve_cmd(s: &SieveCmd, threads: usize) -> Result<Outcome, CliError> {
    match *s {
        SieveCmd::Gaps { lo, hi, min_gap } => {
            let opts = ScanOptions { threads, ..ScanOptions::default() };
            Outcome::many(&sieve::gap_scan_with(lo, hi, min_gap, opts)?)
        }
        SieveCmd::Pi { x } => Outcome::one(&sieve::chebyshev_exact(x)?, false),
        SieveCmd::Neighbors { x } => {
            let (prev, next) = sieve::prime_neighbors(x)?;
            Outcome::one(&json!({ "x": x, "prev": prev, "next": next }), false)
        }
    }
}

fn certify_config_from(
    a: &CertifyArgs,
    file: &BTreeMap<String, String>,
    threads: usize,
) -> Result<CertificateConfig, CliError> {
    let d = CertificateConfig::default();
    let pick = |flag: Option<u64>, key: &str, default: u64| -> Result<u64, CliError> {
        Ok(match flag {
            Some(v) => v,
            None => file_value(file, key)?.unwrap_or(default),
        })
    };
    let windows = match (&a.windows, file.get("windows")) {
        (Some(s), _) | (None, Some(s)) => parse_windows(s)?,
        (None, None) => d.windows.clone(),
    };
    let segment_size = match a.segment_size {
        Some(v) => v,
        None => file_value(file, "segment_size")?.unwrap_or(d.segment_size),
    };
    let mut cfg = CertificateConfig {
        q_max: pick(a.qmax, "qmax", d.q_max)?,
        gap_min: pick(a.gap_min, "gap_min", d.gap_min)?,
        windows,
        smooth_bound: pick(a.smooth_bound, "smooth_bound", d.smooth_bound)?,
        gap_cap: pick(a.gap_cap, "gap_cap", d.gap_cap)?,
        window_len: pick(a.window_len, "window_len", d.window_len)?,
        segment_size,
        checkpoint_path: a.checkpoint.clone().or_else(|| file.get("checkpoint").map(PathBuf::from)),
        threads,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    if cfg.checkpoint_path.is_none() {
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
            cfg.checkpoint_path = Some(dir.join(format!("certify-{}.json", &cfg.hash()[..16])));
        }
    }
    Ok(cfg)
}

fn certify(cfg: &CertificateConfig, a: &CertifyArgs) -> Result<Outcome, CliError> {
    let mut events = match &a.events {
        Some(p) => Some(io::BufWriter::new(
            fs::File::create(p).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?,
        )),
        None => None,
    };
    let mut io_error = None;
    let report = {
        let on_gap = events.as_mut().map(|w| {
            Box::new(|rec: &GapRecord| {
                if io_error.is_none() {
                    if let Err(e) = serde_json::to_writer(&mut *w, rec).map_err(io::Error::from).and_then(|_| writeln!(w)) {
                        io_error = Some(e);
                    }
                }
            }) as Box<dyn FnMut(&GapRecord)>
        });
        certificate::run_with(cfg, RunControl { stop_after_segments: a.stop_after, on_gap })?
    };
    if let Some(e) = io_error {
        return Err(e.into());
    }
    if let Some(mut w) = events {
        w.flush()?;
    }
    let fails = report.complete && !report.certified;
    Outcome::one(&report, fails)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["binocoll"];
        argv.extend_from_slice(args);
        let code = dispatch(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = call(&["search", "--max-valu", "100"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--max-valu"));
        assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn command_names_and_config_echo() {
        let (code, out, _) = call(&["lemma", "check22", "--n", "500000", "--k", "587"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "lemma forcing");
        assert_eq!(v["config"], json!({"n": 500000, "k": 587}));
        assert_eq!(v["result"]["verdict"], "HOLDS");
        let (code, out, _) = call(&["lemma", "sum-threshold", "--format", "text"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("# binocoll "));
        assert!(out.contains("f_star: 871155"));
    }

    #[test]
    fn fails_verdict_exits_one() {
        assert_eq!(call(&["lemma", "forcing", "--n", "500000", "--k", "588"]).0, EXIT_FAILS);
        assert_eq!(call(&["lemma", "section4", "--k", "1"]).0, EXIT_FAILS);
        assert_eq!(call(&["lemma", "section4", "--k", "588"]).0, EXIT_OK);
    }

    #[test]
    fn runtime_errors_exit_three() {
        assert_eq!(call(&["bounds", "pi-upper", "--x", "1"]).0, EXIT_RUNTIME);
        assert_eq!(call(&["search", "--max-value", "25", "--out", "/nonexistent/dir/x"]).0, EXIT_RUNTIME);
    }

    #[test]
    fn config_file_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        fs::write(&path, "# desk scale\nqmax = 100000\ngap_min=40\nformat=json\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = call(&["certify", "--config", p, "--gap-min", "500"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["config"]["qmax"], 100000);
        assert_eq!(v["config"]["gap_min"], 500);
        assert_eq!(v["result"]["config"]["gap_min"], 500);
        assert_eq!(v["result"]["certified"], true);
        // gaps of 40 and more below 10^5 sit below 3427^2, so small windows are often smooth
        let (code, out, _) = call(&["certify", "--config", p]);
        assert_eq!(code, EXIT_FAILS);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(!v["result"]["failures"].as_array().unwrap().is_empty());
        fs::write(&path, "colour = blue\n").unwrap();
        assert_eq!(call(&["certify", "--config", p]).0, EXIT_USAGE);
    }
}
