//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! A segment stores one bit per odd integer; bit `i` stands for `base + 2i`.
//! Base primes up to `sqrt(hi)` are sieved once and shared by all segments.

use std::io::{self, Write};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::primality::{next_prime_u64, prev_prime_u64};

/// Largest integer the sieve accepts.
pub const SIEVE_MAX: u64 = (1u64 << 63) - 1;

/// Exact Chebyshev sums are offered up to this bound.
pub const CHEBYSHEV_LIMIT: u64 = 1_000_000_000;

/// Default segment: `2^20` odd entries.
pub const DEFAULT_SEGMENT_BYTES: usize = 1 << 17;

/// Bound of the cached small-prime table.
pub const SMALL_PRIME_LIMIT: u32 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SieveError {
    #[error("empty range: lo = {lo} > hi = {hi}")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("bound {value} outside supported range [{min}, {max}]")]
    OutOfRange { value: u64, min: u64, max: u64 },
    #[error("min_gap must be at least 1")]
    MinGap,
    #[error("segment size must be a positive number of bytes")]
    SegmentSize,
}

// ---------------------------------------------------------------------------
// base primes
// ---------------------------------------------------------------------------

/// All primes `<= limit` by a plain odd-only sieve.
pub fn simple_primes(limit: u64) -> Vec<u32> {
    assert!(limit <= u32::MAX as u64, "simple_primes limit {limit} too large");
    let mut out = Vec::new();
    if limit < 2 {
        return out;
    }
    out.push(2);
    let odd_count = ((limit - 1) / 2) as usize; // odd numbers 3..=limit
    let mut composite = vec![0u64; odd_count / 64 + 1];
    let mut i = 0usize;
    while i < odd_count {
        let p = 2 * i as u64 + 3;
        if p * p > limit {
            break;
        }
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let mut j = ((p * p - 3) / 2) as usize;
            while j < odd_count {
                composite[j / 64] |= 1 << (j % 64);
                j += p as usize;
            }
        }
        i += 1;
    }
    for i in 0..odd_count {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            out.push(2 * i as u32 + 3);
        }
    }
    out
}

/// Primes below `2^20`, built once.
pub fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| simple_primes(SMALL_PRIME_LIMIT as u64))
}

pub(crate) fn base_primes_for(hi: u64) -> Arc<Vec<u32>> {
    let root = hi.isqrt();
    if root < SMALL_PRIME_LIMIT as u64 {
        let t = small_primes();
        let end = t.partition_point(|&p| (p as u64) <= root);
        Arc::new(t[..end].to_vec())
    } else {
        Arc::new(simple_primes(root))
    }
}

// ---------------------------------------------------------------------------
// segments
// ---------------------------------------------------------------------------

/// Tiling of `[lo, hi]` into sieve segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentPlan {
    pub lo: u64,
    pub hi: u64,
    /// bytes of odd-number bitmap per segment
    pub segment_size: usize,
}

impl SegmentPlan {
    pub fn new(lo: u64, hi: u64, segment_size: usize) -> Result<SegmentPlan, SieveError> {
        if lo > hi {
            return Err(SieveError::EmptyRange { lo, hi });
        }
        if hi > SIEVE_MAX {
            return Err(SieveError::OutOfRange { value: hi, min: 2, max: SIEVE_MAX });
        }
        if segment_size == 0 {
            return Err(SieveError::SegmentSize);
        }
        Ok(SegmentPlan { lo: lo.max(2), hi, segment_size })
    }

    /// Integers covered by one segment.
    pub fn span(&self) -> u64 {
        self.segment_size as u64 * 16
    }

    pub fn len(&self) -> u64 {
        if self.lo > self.hi {
            0
        } else {
            (self.hi - self.lo) / self.span() + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bounds `[a, b]` of segment `i`; segments are disjoint and ascending.
    pub fn segment(&self, i: u64) -> (u64, u64) {
        let a = self.lo + i * self.span();
        let b = a.saturating_add(self.span() - 1).min(self.hi);
        (a, b)
    }

    pub fn segments(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.len()).map(move |i| self.segment(i))
    }
}

/// Primes in `[a, b]`, ascending. `base` must contain every prime `<= sqrt(b)`.
pub fn sieve_segment(a: u64, b: u64, base: &[u32]) -> Vec<u64> {
    let mut out = Vec::new();
    if a > b || b < 2 {
        return out;
    }
    if a <= 2 {
        out.push(2);
    }
    let first = if a <= 3 { 3 } else { a | 1 };
    if first > b {
        return out;
    }
    let count = ((b - first) / 2 + 1) as usize;
    let mut bits = vec![0u64; count.div_ceil(64)];
    for &p in base.iter().skip(1) {
        let p = p as u64;
        let pp = p * p;
        if pp > b {
            break;
        }
        let mut m = if pp >= first { pp } else { first.div_ceil(p) * p };
        if m % 2 == 0 {
            m += p;
        }
        let mut j = ((m - first) / 2) as usize;
        let step = p as usize;
        while j < count {
            bits[j >> 6] |= 1 << (j & 63);
            j += step;
        }
    }
    for (w, &word) in bits.iter().enumerate() {
        let mut free = !word;
        if w == bits.len() - 1 && count % 64 != 0 {
            free &= (1u64 << (count % 64)) - 1;
        }
        while free != 0 {
            let t = free.trailing_zeros() as usize;
            out.push(first + 2 * (w * 64 + t) as u64);
            free &= free - 1;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// prime streams
// ---------------------------------------------------------------------------

/// Lazy ascending stream of the primes in a closed range.
pub struct PrimeStream {
    plan: SegmentPlan,
    base: Arc<Vec<u32>>,
    next_segment: u64,
    buf: std::vec::IntoIter<u64>,
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(p) = self.buf.next() {
                return Some(p);
            }
            if self.next_segment >= self.plan.len() {
                return None;
            }
            let (a, b) = self.plan.segment(self.next_segment);
            self.next_segment += 1;
            self.buf = sieve_segment(a, b, &self.base).into_iter();
        }
    }
}

pub fn primes_in(lo: u64, hi: u64) -> Result<PrimeStream, SieveError> {
    primes_in_with(lo, hi, DEFAULT_SEGMENT_BYTES)
}

pub fn primes_in_with(lo: u64, hi: u64, segment_size: usize) -> Result<PrimeStream, SieveError> {
    let plan = SegmentPlan::new(lo, hi, segment_size)?;
    Ok(PrimeStream { plan, base: base_primes_for(hi), next_segment: 0, buf: Vec::new().into_iter() })
}

// ---------------------------------------------------------------------------
// Chebyshev functions
// ---------------------------------------------------------------------------

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Chebyshev {
    pub x: u64,
    pub pi: u64,
    pub theta: f64,
    pub psi: f64,
    /// bound on `|theta - exact|` and `|psi - exact|`
    pub abs_error: f64,
}

/// `pi(x)`, `theta(x)`, `psi(x)` by summation over the sieve.
pub fn chebyshev_exact(x: u64) -> Result<Chebyshev, SieveError> {
    if !(2..=CHEBYSHEV_LIMIT).contains(&x) {
        return Err(SieveError::OutOfRange { value: x, min: 2, max: CHEBYSHEV_LIMIT });
    }
    let mut pi = 0u64;
    let mut theta = Compensated::default();
    let mut extra = Compensated::default();
    let mut terms = 0u64;
    for p in primes_in(2, x)? {
        pi += 1;
        let l = (p as f64).ln();
        theta.add(l);
        terms += 1;
        let mut pe = p;
        while let Some(next) = pe.checked_mul(p).filter(|&v| v <= x) {
            extra.add(l);
            terms += 1;
            pe = next;
        }
    }
    let theta_v = theta.value();
    let psi_v = theta_v + extra.value();
    // each log is within one ulp of log x; compensated sums add O(eps) overall
    let per_term = f64::EPSILON * (x as f64).ln();
    let abs_error = terms as f64 * per_term + 4.0 * f64::EPSILON * psi_v;
    Ok(Chebyshev { x, pi, theta: theta_v, psi: psi_v, abs_error })
}

pub fn prime_neighbors(x: u64) -> Result<(u64, u64), SieveError> {
    if x < 3 {
        return Err(SieveError::OutOfRange { value: x, min: 3, max: SIEVE_MAX });
    }
    let prev = prev_prime_u64(x).expect("x >= 3 has a prime below it");
    let next = next_prime_u64(x).ok_or(SieveError::OutOfRange { value: x, min: 3, max: SIEVE_MAX })?;
    Ok((prev, next))
}

// ---------------------------------------------------------------------------
// prime gaps
// ---------------------------------------------------------------------------

/// A prime and the distance to the next prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GapEvent {
    pub p: u64,
    pub gap: u64,
}

/// Gap scanning parameters. Results do not depend on either field.
#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub segment_size: usize,
    pub threads: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { segment_size: DEFAULT_SEGMENT_BYTES, threads: 1 }
    }
}

/// Gap events whose left prime lies in segment `[a, b]`; the gap leaving the
/// segment is closed by a primality search past `b`.
pub fn segment_gaps(a: u64, b: u64, base: &[u32], min_gap: u64) -> (Vec<GapEvent>, u64) {
    let primes = sieve_segment(a, b, base);
    let mut events = Vec::new();
    for w in primes.windows(2) {
        if w[1] - w[0] >= min_gap {
            events.push(GapEvent { p: w[0], gap: w[1] - w[0] });
        }
    }
    if let Some(&last) = primes.last() {
        let next = next_prime_u64(last).expect("next prime within u64");
        if next - last >= min_gap {
            events.push(GapEvent { p: last, gap: next - last });
        }
    }
    (events, primes.len() as u64)
}

/// `0` means every available core.
pub fn resolve_threads(threads: usize) -> usize {
    if threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        threads
    }
}

/// Runs `f` on each segment of `plan` using `threads` workers and delivers
/// results in segment order.
pub(crate) fn for_each_segment_ordered<T, F, S>(plan: &SegmentPlan, threads: usize, first: u64, f: F, mut sink: S)
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
    S: FnMut(u64, T) -> bool,
{
    let threads = resolve_threads(threads);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let batch = threads as u64 * 2;
    let mut i = first;
    let total = plan.len();
    while i < total {
        let end = (i + batch).min(total);
        let results: Vec<T> = pool.install(|| {
            (i..end)
                .into_par_iter()
                .map(|s| {
                    let (a, b) = plan.segment(s);
                    f(a, b)
                })
                .collect()
        });
        for (k, r) in results.into_iter().enumerate() {
            if !sink(i + k as u64, r) {
                return;
            }
        }
        i = end;
    }
}

/// All gap events with `p` in `[lo, hi)` and `gap >= min_gap`, ascending.
pub fn gap_scan(lo: u64, hi: u64, min_gap: u64) -> Result<Vec<GapEvent>, SieveError> {
    gap_scan_with(lo, hi, min_gap, ScanOptions::default())
}

pub fn gap_scan_with(lo: u64, hi: u64, min_gap: u64, opts: ScanOptions) -> Result<Vec<GapEvent>, SieveError> {
    if min_gap < 1 {
        return Err(SieveError::MinGap);
    }
    if lo >= hi {
        return Err(SieveError::EmptyRange { lo, hi });
    }
    let plan = SegmentPlan::new(lo, hi - 1, opts.segment_size)?;
    let base = base_primes_for(hi);
    let mut out = Vec::new();
    for_each_segment_ordered(
        &plan,
        opts.threads,
        0,
        |a, b| segment_gaps(a, b, &base, min_gap).0,
        |_, events| {
            out.extend(events);
            true
        },
    );
    Ok(out)
}

/// One `{"p": .., "gap": ..}` object per line.
pub fn write_gaps_jsonl<W: Write>(events: &[GapEvent], mut w: W) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_ranges() {
        assert_eq!(primes_in(2, 10).unwrap().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in(90, 100).unwrap().collect::<Vec<_>>(), vec![97]);
        assert_eq!(primes_in(14, 16).unwrap().count(), 0);
        assert!(primes_in(10, 9).is_err());
        assert_eq!(primes_in(0, 3).unwrap().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn matches_naive_with_tiny_segments() {
        for seg in [1usize, 3, 64] {
            let got: Vec<u64> = primes_in_with(1, 5000, seg).unwrap().collect();
            let want: Vec<u64> = (1..=5000).filter(|&n| naive_prime(n)).collect();
            assert_eq!(got, want, "segment {seg}");
        }
        let got: Vec<u64> = primes_in_with(1_000_000_000, 1_000_001_000, 5).unwrap().collect();
        let want: Vec<u64> = (1_000_000_000..=1_000_001_000).filter(|&n| naive_prime(n)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn chebyshev_values() {
        let c = chebyshev_exact(100).unwrap();
        assert_eq!(c.pi, 25);
        assert!((c.theta - 83.72839).abs() < 1e-5);
        assert!((c.psi - 94.04531).abs() < 1e-5);
        let two = chebyshev_exact(2).unwrap();
        assert_eq!(two.pi, 1);
        assert_eq!(two.theta, 2f64.ln());
        assert_eq!(two.psi, 2f64.ln());
        assert!(chebyshev_exact(1).is_err());
        assert!(chebyshev_exact(CHEBYSHEV_LIMIT + 1).is_err());
    }

    #[test]
    fn neighbours() {
        assert_eq!(prime_neighbors(100).unwrap(), (97, 101));
        assert_eq!(prime_neighbors(23).unwrap(), (23, 29));
        assert_eq!(prime_neighbors(3).unwrap(), (3, 5));
        assert!(prime_neighbors(2).is_err());
    }

    #[test]
    fn gaps_below_100() {
        assert_eq!(gap_scan(2, 100, 8).unwrap(), vec![GapEvent { p: 89, gap: 8 }]);
        assert!(gap_scan(2, 100, 200).unwrap().is_empty());
        assert!(gap_scan(2, 100, 0).is_err());
        assert!(gap_scan(100, 100, 1).is_err());
    }

    #[test]
    fn gaps_telescope_across_segments() {
        let ev = gap_scan_with(2, 20_000, 1, ScanOptions { segment_size: 7, threads: 3 }).unwrap();
        let primes: Vec<u64> = primes_in(2, 20_000).unwrap().collect();
        assert_eq!(ev.len(), primes.len());
        for (w, e) in primes.windows(2).zip(&ev) {
            assert_eq!(e.p, w[0]);
            assert_eq!(e.p + e.gap, w[1]);
        }
        let last = ev.last().unwrap();
        assert_eq!(last.p + last.gap, 20_011);
    }

    #[test]
    fn gap_jsonl_shape() {
        let mut buf = Vec::new();
        write_gaps_jsonl(&[GapEvent { p: 89, gap: 8 }], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "{\"p\":89,\"gap\":8}\n");
    }

    #[test]
    fn plan_tiles_range() {
        let plan = SegmentPlan::new(2, 1000, 2).unwrap();
        let mut expect = 2;
        for (a, b) in plan.segments() {
            assert_eq!(a, expect);
            expect = b + 1;
        }
        assert_eq!(expect, 1001);
    }
}
