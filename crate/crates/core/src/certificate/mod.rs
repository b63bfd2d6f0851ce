//! Prime-gap smoothness certificate: every prime `q <= q_max` whose gap
//! reaches `gap_min` must have, in each configured offset window, an
//! element `q + i` with a prime factor above the smoothness bound.
//!
//! Together with the covering argument ([`coverage_check`]) this rules out
//! `window_len` consecutive smooth integers inside any such gap.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::{largest_prime_factor, smooth_split, ArithError, Natural};
use crate::sieve::{
    base_primes_for, for_each_segment_ordered, segment_gaps, GapEvent, SegmentPlan, SieveError,
    DEFAULT_SEGMENT_BYTES,
};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("windows do not cover placement {0}; refusing to run")]
    Coverage(u64),
    #[error("checkpoint {path} belongs to another configuration (hash {found}, expected {expected})")]
    ConfigMismatch { path: PathBuf, found: String, expected: String },
    #[error("corrupted checkpoint {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("checkpoint I/O on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0} exceeds the arithmetic capability")]
    Capability(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Offsets `lo..=hi` relative to a gap prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OffsetRange {
    pub lo: u64,
    pub hi: u64,
}

impl OffsetRange {
    pub fn new(lo: u64, hi: u64) -> OffsetRange {
        OffsetRange { lo, hi }
    }

    pub fn contains(&self, i: u64) -> bool {
        self.lo <= i && i <= self.hi
    }
}

impl fmt::Display for OffsetRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Accepts `152-156` or `152..156`.
impl FromStr for OffsetRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .or_else(|| s.split_once('-'))
            .ok_or_else(|| format!("window `{s}` is not of the form LO-HI"))?;
        let parse = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("window `{s}`: {e}"));
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo > hi || lo == 0 {
            return Err(format!("window `{s}` needs 1 <= LO <= HI"));
        }
        Ok(OffsetRange { lo, hi })
    }
}

impl Serialize for OffsetRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for OffsetRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[u64; 2]>::deserialize(d)?;
        Ok(OffsetRange { lo, hi })
    }
}

/// Bound below which every gap is asserted to be at most [`DEFAULT_GAP_CAP`].
pub const DEFAULT_Q_MAX: u64 = 31_754_673_611;
pub const DEFAULT_GAP_MIN: u64 = 158;
pub const DEFAULT_SMOOTH_BOUND: u64 = 3427;
pub const DEFAULT_GAP_CAP: u64 = 456;
pub const DEFAULT_WINDOW_LEN: u64 = 156;
pub const DEFAULT_WINDOWS: [OffsetRange; 2] = [OffsetRange { lo: 152, hi: 156 }, OffsetRange { lo: 303, hi: 308 }];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateConfig {
    pub q_max: u64,
    pub gap_min: u64,
    pub windows: Vec<OffsetRange>,
    pub smooth_bound: u64,
    pub gap_cap: u64,
    pub window_len: u64,
    /// bytes of sieve bitmap per segment; also the checkpoint granularity
    pub segment_size: usize,
    pub checkpoint_path: Option<PathBuf>,
    /// `0` means every core; never affects the report
    pub threads: usize,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig {
            q_max: DEFAULT_Q_MAX,
            gap_min: DEFAULT_GAP_MIN,
            windows: DEFAULT_WINDOWS.to_vec(),
            smooth_bound: DEFAULT_SMOOTH_BOUND,
            gap_cap: DEFAULT_GAP_CAP,
            window_len: DEFAULT_WINDOW_LEN,
            segment_size: DEFAULT_SEGMENT_BYTES,
            checkpoint_path: None,
            threads: 1,
        }
    }
}

/// The fields that determine the report; hashed into checkpoints.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConfigEcho {
    pub q_max: u64,
    pub gap_min: u64,
    pub windows: Vec<OffsetRange>,
    pub smooth_bound: u64,
    pub gap_cap: u64,
    pub window_len: u64,
    pub segment_size: usize,
}

impl CertificateConfig {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            q_max: self.q_max,
            gap_min: self.gap_min,
            windows: self.windows.clone(),
            smooth_bound: self.smooth_bound,
            gap_cap: self.gap_cap,
            window_len: self.window_len,
            segment_size: self.segment_size,
        }
    }

    /// SHA-256 of the canonical JSON of [`ConfigEcho`], hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(&self.echo()).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn validate(&self) -> Result<(), CertificateError> {
        let bad = |m: &str| Err(CertificateError::Config(m.into()));
        if self.windows.is_empty() {
            return bad("at least one window is required");
        }
        if self.windows.iter().any(|w| w.lo == 0 || w.lo > w.hi) {
            return bad("windows need 1 <= lo <= hi");
        }
        if self.smooth_bound < 2 {
            return bad("smooth_bound must be at least 2");
        }
        if self.q_max < 2 {
            return bad("q_max must be at least 2");
        }
        if self.gap_min < 1 || self.window_len < 1 {
            return bad("gap_min and window_len must be positive");
        }
        if self.segment_size == 0 {
            return bad("segment_size must be positive");
        }
        let top = self.windows.iter().map(|w| w.hi).max().unwrap_or(0);
        if self.q_max.checked_add(top).is_none_or(|v| v > u64::MAX / 2) {
            return Err(CertificateError::Capability(self.q_max));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// covering argument
// ---------------------------------------------------------------------------

/// Placements `s = z - q` of a run `z+1..=z+window_len` inside a gap of at
/// most `gap_cap`, each with the first window that lies inside the run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub ok: bool,
    /// index `s` -> covering window
    pub placements: Vec<Option<OffsetRange>>,
}

/// Consecutive placements sharing a covering window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlacementRun {
    pub from: u64,
    pub to: u64,
    pub window: Option<OffsetRange>,
}

impl Coverage {
    pub fn runs(&self) -> Vec<PlacementRun> {
        let mut out: Vec<PlacementRun> = Vec::new();
        for (s, w) in self.placements.iter().enumerate() {
            match out.last_mut() {
                Some(r) if r.window == *w => r.to = s as u64,
                _ => out.push(PlacementRun { from: s as u64, to: s as u64, window: *w }),
            }
        }
        out
    }

    pub fn first_uncovered(&self) -> Option<u64> {
        self.placements.iter().position(Option::is_none).map(|s| s as u64)
    }
}

/// Window `[a, b]` covers placement `s` when `s + 1 <= a` and
/// `b <= s + window_len`; placements range over `0..=gap_cap-window_len-1`.
pub fn coverage_check(gap_cap: u64, window_len: u64, windows: &[OffsetRange]) -> Coverage {
    let count = gap_cap.saturating_sub(window_len);
    let placements: Vec<Option<OffsetRange>> = (0..count)
        .map(|s| windows.iter().copied().find(|w| s < w.lo && w.hi <= s + window_len))
        .collect();
    Coverage { ok: placements.iter().all(Option::is_some), placements }
}

// ---------------------------------------------------------------------------
// refutation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowRefutation {
    pub q: u64,
    pub window: OffsetRange,
    pub witness_offset: u64,
    #[serde(serialize_with = "crate::util::ser_decimal")]
    pub witness_prime: Natural,
}

impl WindowRefutation {
    /// Re-checks divisibility, the offset and the bound exactly.
    pub fn verify(&self, bound: u64) -> bool {
        let v = Natural::from(self.q) + self.witness_offset;
        self.window.contains(self.witness_offset)
            && self.witness_prime > Natural::from(bound)
            && (&v % &self.witness_prime) == Natural::from(0u32)
    }
}

/// First element of `q + window` with a prime factor above `bound`, or
/// `None` when the whole window is `bound`-smooth.
pub fn refute_window(q: u64, window: OffsetRange, bound: u64) -> Result<Option<WindowRefutation>, CertificateError> {
    for i in window.lo..=window.hi {
        let v = q.checked_add(i).ok_or(CertificateError::Capability(q))?;
        if v < 2 {
            continue;
        }
        let split = smooth_split(&Natural::from(v), bound)?;
        if split.is_smooth() {
            continue;
        }
        let witness_prime = largest_prime_factor(&split.cofactor)?;
        let r = WindowRefutation { q, window, witness_offset: i, witness_prime };
        debug_assert!(r.verify(bound));
        return Ok(Some(r));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// run state
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub q: u64,
    pub gap: u64,
    pub window: OffsetRange,
}

/// Refutation count for one window and an order-free checksum of the
/// refutation multiset (wrapping sum of per-record SHA-256 prefixes).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowTally {
    pub window: OffsetRange,
    pub refuted: u64,
    pub checksum: String,
}

fn record_hash(r: &WindowRefutation) -> u64 {
    let line = format!("{}:{}:{}:{}", r.q, r.window, r.witness_offset, r.witness_prime);
    let d = Sha256::digest(line.as_bytes());
    u64::from_be_bytes(d[..8].try_into().expect("8 bytes"))
}

/// Everything needed to resume; written after every completed segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    /// last integer whose primes have been scanned, `0` before the first segment
    pub completed_hi: u64,
    pub segments_done: u64,
    pub gap_prime_count: u64,
    pub prime_count: u64,
    pub failures: Vec<Failure>,
    pub gap_cap_violations: Vec<GapEvent>,
    pub largest_gap: Option<GapEvent>,
    pub windows: Vec<WindowTally>,
}

impl Checkpoint {
    fn fresh(config: &CertificateConfig) -> Checkpoint {
        Checkpoint {
            config_hash: config.hash(),
            completed_hi: 0,
            segments_done: 0,
            gap_prime_count: 0,
            prime_count: 0,
            failures: Vec::new(),
            gap_cap_violations: Vec::new(),
            largest_gap: None,
            windows: config
                .windows
                .iter()
                .map(|&window| WindowTally { window, refuted: 0, checksum: format!("{:016x}", 0) })
                .collect(),
        }
    }

    /// Reads a checkpoint; an absent or empty file gives `None`.
    pub fn load(path: &Path) -> Result<Option<Checkpoint>, CertificateError> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CertificateError::Io { path: path.into(), source }),
        };
        if text.trim().is_empty() {
            return Ok(None);
        }
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| CertificateError::Corrupt { path: path.into(), reason: e.to_string() })?;
        for w in &cp.windows {
            if u64::from_str_radix(&w.checksum, 16).is_err() {
                return Err(CertificateError::Corrupt { path: path.into(), reason: "windows.checksum is not hex".into() });
            }
        }
        Ok(Some(cp))
    }

    /// Writes to a sibling temporary file and renames it over `path`.
    pub fn store(&self, path: &Path) -> Result<(), CertificateError> {
        let io_err = |source| CertificateError::Io { path: path.into(), source };
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        serde_json::to_writer_pretty(&mut f, self).map_err(|e| io_err(e.into()))?;
        f.write_all(b"\n").map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
        fs::rename(&tmp, path).map_err(io_err)
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// One gap prime with its per-window outcome, in window order.
#[derive(Clone, Debug, Serialize)]
pub struct GapRecord {
    pub q: u64,
    pub gap: u64,
    pub refutations: Vec<Option<WindowRefutation>>,
}

#[derive(Default)]
pub struct RunControl<'a> {
    /// stop (with a checkpoint) after this many segments in this call
    pub stop_after_segments: Option<u64>,
    /// receives every gap prime scanned in this call, ascending
    pub on_gap: Option<Box<dyn FnMut(&GapRecord) + 'a>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub config_hash: String,
    pub coverage_ok: bool,
    pub coverage: Vec<PlacementRun>,
    pub gap_prime_count: u64,
    pub prime_count: u64,
    pub largest_gap: Option<GapEvent>,
    pub windows: Vec<WindowTally>,
    pub failures: Vec<Failure>,
    pub gap_cap_violations: Vec<GapEvent>,
    pub segments_done: u64,
    pub segments_total: u64,
    pub complete: bool,
    /// complete, covered, and free of failures and gap-cap violations
    pub certified: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

struct SegmentOutcome {
    records: Vec<GapRecord>,
    prime_count: u64,
}

pub fn run(config: &CertificateConfig) -> Result<CertificateReport, CertificateError> {
    run_with(config, RunControl::default())
}

/// Scans `[2, q_max]`, resuming from `config.checkpoint_path` when present.
pub fn run_with(config: &CertificateConfig, mut control: RunControl<'_>) -> Result<CertificateReport, CertificateError> {
    let started = Instant::now();
    config.validate()?;
    let coverage = coverage_check(config.gap_cap, config.window_len, &config.windows);
    if let Some(s) = coverage.first_uncovered() {
        return Err(CertificateError::Coverage(s));
    }
    let plan = SegmentPlan::new(2, config.q_max, config.segment_size)?;
    let mut state = match &config.checkpoint_path {
        Some(path) => match Checkpoint::load(path)? {
            Some(cp) if cp.config_hash != config.hash() => {
                return Err(CertificateError::ConfigMismatch {
                    path: path.clone(),
                    found: cp.config_hash,
                    expected: config.hash(),
                })
            }
            Some(cp) if cp.segments_done > plan.len() || cp.windows.len() != config.windows.len() => {
                return Err(CertificateError::Corrupt { path: path.clone(), reason: "segments_done exceeds the plan".into() })
            }
            Some(cp) => cp,
            None => Checkpoint::fresh(config),
        },
        None => Checkpoint::fresh(config),
    };
    let mut sums: Vec<u64> = state
        .windows
        .iter()
        .map(|w| u64::from_str_radix(&w.checksum, 16).expect("validated on load"))
        .collect();

    let base = base_primes_for(config.q_max + 1);
    let worker = |a: u64, b: u64| -> Result<SegmentOutcome, CertificateError> {
        let (events, prime_count) = segment_gaps(a, b, &base, config.gap_min);
        let mut records = Vec::with_capacity(events.len());
        for e in events {
            let refutations = config
                .windows
                .iter()
                .map(|&w| refute_window(e.p, w, config.smooth_bound))
                .collect::<Result<Vec<_>, _>>()?;
            records.push(GapRecord { q: e.p, gap: e.gap, refutations });
        }
        Ok(SegmentOutcome { records, prime_count })
    };

    let mut processed = 0u64;
    let mut error = None;
    for_each_segment_ordered(&plan, config.threads, state.segments_done, worker, |i, outcome| {
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                error = Some(e);
                return false;
            }
        };
        for rec in &outcome.records {
            state.gap_prime_count += 1;
            let event = GapEvent { p: rec.q, gap: rec.gap };
            if state.largest_gap.is_none_or(|g| rec.gap > g.gap) {
                state.largest_gap = Some(event);
            }
            if rec.gap > config.gap_cap {
                state.gap_cap_violations.push(event);
            }
            for (j, r) in rec.refutations.iter().enumerate() {
                match r {
                    Some(r) => {
                        assert!(r.verify(config.smooth_bound), "unsound refutation {r:?}");
                        state.windows[j].refuted += 1;
                        sums[j] = sums[j].wrapping_add(record_hash(r));
                    }
                    None => state.failures.push(Failure { q: rec.q, gap: rec.gap, window: config.windows[j] }),
                }
            }
            if let Some(cb) = control.on_gap.as_mut() {
                cb(rec);
            }
        }
        for (w, s) in state.windows.iter_mut().zip(&sums) {
            w.checksum = format!("{s:016x}");
        }
        state.prime_count += outcome.prime_count;
        state.segments_done = i + 1;
        state.completed_hi = plan.segment(i).1;
        if let Some(path) = &config.checkpoint_path {
            if let Err(e) = state.store(path) {
                error = Some(e);
                return false;
            }
        }
        processed += 1;
        control.stop_after_segments.is_none_or(|n| processed < n)
    });
    if let Some(e) = error {
        return Err(e);
    }

    let complete = state.segments_done == plan.len();
    let certified = complete && coverage.ok && state.failures.is_empty() && state.gap_cap_violations.is_empty();
    Ok(CertificateReport {
        tool: TOOL,
        version: VERSION,
        config: config.echo(),
        config_hash: state.config_hash,
        coverage_ok: coverage.ok,
        coverage: coverage.runs(),
        gap_prime_count: state.gap_prime_count,
        prime_count: state.prime_count,
        largest_gap: state.largest_gap,
        windows: state.windows,
        failures: state.failures,
        gap_cap_violations: state.gap_cap_violations,
        segments_done: state.segments_done,
        segments_total: plan.len(),
        complete,
        certified,
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lo: u64, hi: u64) -> OffsetRange {
        OffsetRange::new(lo, hi)
    }

    #[test]
    fn coverage_examples() {
        let c = coverage_check(456, 156, &DEFAULT_WINDOWS);
        assert!(c.ok);
        let runs = c.runs();
        assert_eq!(runs.len(), 2);
        assert_eq!((runs[0].from, runs[0].to, runs[0].window), (0, 151, Some(w(152, 156))));
        assert_eq!((runs[1].from, runs[1].to, runs[1].window), (152, 299, Some(w(303, 308))));
        let c = coverage_check(456, 156, &[w(152, 156)]);
        assert!(!c.ok);
        assert_eq!(c.first_uncovered(), Some(152));
        let c = coverage_check(157, 156, &[w(152, 156)]);
        assert!(c.ok);
        assert_eq!(c.placements.len(), 1);
        assert!(coverage_check(100, 156, &[w(1, 2)]).ok);
    }

    #[test]
    fn refutation_examples() {
        let r = refute_window(3, w(1, 2), 3).unwrap().unwrap();
        assert_eq!((r.witness_offset, r.witness_prime.clone()), (2, Natural::from(5u32)));
        assert!(r.verify(3));
        assert!(refute_window(8, w(1, 2), 7).unwrap().is_none());
        // 1024 is smooth, 1025 = 5^2 * 41
        let r = refute_window(1023, w(1, 2), 7).unwrap().unwrap();
        assert_eq!((r.witness_offset, r.witness_prime), (2, Natural::from(41u32)));
    }

    #[test]
    fn range_parsing() {
        assert_eq!("152-156".parse::<OffsetRange>().unwrap(), w(152, 156));
        assert_eq!("303..308".parse::<OffsetRange>().unwrap(), w(303, 308));
        assert!("9-3".parse::<OffsetRange>().is_err());
        assert!("x".parse::<OffsetRange>().is_err());
    }

    #[test]
    fn small_run_and_vacuous_run() {
        let cfg = CertificateConfig { q_max: 1_000_000, gap_min: 500, ..CertificateConfig::default() };
        let r = run(&cfg).unwrap();
        assert_eq!(r.gap_prime_count, 0);
        assert!(r.certified);
        assert_eq!(r.prime_count, 78498);
        assert_eq!(r.largest_gap, None);
    }

    #[test]
    fn refuses_uncovered_config() {
        let cfg = CertificateConfig { q_max: 1000, windows: vec![w(152, 156)], ..CertificateConfig::default() };
        assert!(matches!(run(&cfg), Err(CertificateError::Coverage(152))));
    }

    #[test]
    fn hash_ignores_threads_and_path() {
        let a = CertificateConfig::default();
        let b = CertificateConfig { threads: 8, checkpoint_path: Some("x".into()), ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        let c = CertificateConfig { q_max: 10, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }
}
