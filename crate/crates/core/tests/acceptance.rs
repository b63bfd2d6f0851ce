//! One pass/fail test per acceptance criterion.

use std::time::{Duration, Instant};

use binocoll::arith::{binomial, log_factorial_exact, Natural};
use binocoll::bounds::{
    central_binom_rate, critical_constant, decide, log_g_minus, log_g_plus, pi_upper_dusart, CentralRateCheck,
    CriticalConstantCheck, IntervalValue, PsiConstantCheck, Real, VerdictKind,
};
use binocoll::certificate::{run, CertificateConfig};
use binocoll::cli::dispatch;
use binocoll::collision::{
    check_eq12, collisions_below_row, enumerate_collisions, fib_identity, record_params, ParamTuple, Representation,
};
use binocoll::lemma::{
    check_log_ratio_bounds, check_window_smoothness, large_l_consistency, max_n_from_valuation_bound,
    product_identity_holds, small_case_contradiction, sum_threshold_crossover, NmaxGrid, SumThreshold,
    NMAX_REFERENCE,
};
use binocoll::sieve::primes_in;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["binocoll"];
    argv.extend_from_slice(args);
    let code = dispatch(argv, &mut out, &mut err);
    (code, out)
}

fn within(start: Instant, limit: Duration, what: &str) {
    let t = start.elapsed();
    assert!(t < limit, "{what} took {t:.2?}, limit {limit:.0?}");
}

fn is_prime_table(limit: u64) -> Vec<bool> {
    let mut t = vec![false; limit as usize + 1];
    for p in primes_in(2, limit).unwrap() {
        t[p as usize] = true;
    }
    t
}

#[test]
fn c01_collision_table_up_to_25000() {
    let start = Instant::now();
    let (code, out) = cli(&["search", "--max-value", "25000", "--threads", "1"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["command"], "search");
    let records: Vec<Value> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    let expected: [(&str, &[(u64, u64)]); 7] = [
        ("120", &[(16, 2), (10, 3)]),
        ("210", &[(21, 2), (10, 4)]),
        ("1540", &[(56, 2), (22, 3)]),
        ("3003", &[(78, 2), (15, 5), (14, 6)]),
        ("7140", &[(120, 2), (36, 3)]),
        ("11628", &[(153, 2), (19, 5)]),
        ("24310", &[(221, 2), (17, 8)]),
    ];
    assert_eq!(records.len(), expected.len());
    for (rec, (n, reps)) in records.iter().zip(expected) {
        assert_eq!(rec["N"], n);
        let got: Vec<(u64, u64)> = rec["reps"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| (r[0].as_u64().unwrap(), r[1].as_u64().unwrap()))
            .collect();
        assert_eq!(got, reps);
        for &(x, a) in reps {
            assert_eq!(binomial(x, a as i64).to_string(), n);
        }
    }
    // the library agrees with the front end
    let lib = enumerate_collisions(&Natural::from(25_000u32)).unwrap();
    assert_eq!(lib.len(), 7);
    assert_eq!(lib[3].reps, vec![Representation { x: 78, a: 2 }, Representation { x: 15, a: 5 }, Representation { x: 14, a: 6 }]);
    within(start, Duration::from_secs(60), "collision search");
}

#[test]
fn c02_fibonacci_family_exact() {
    for i in 0..=4u64 {
        let m = fib_identity(i).unwrap();
        assert!(m.verified, "member {i}");
        assert_eq!((m.y, m.b), (m.x - 1, m.a + 1));
        assert_eq!(binomial(m.x, m.a as i64), binomial(m.y, m.b as i64), "member {i}");
    }
    let m = fib_identity(1).unwrap();
    assert_eq!((m.x, m.a, m.y, m.b), (15, 5, 14, 6));
    assert_eq!(binomial(15, 5), Natural::from(3003u32));
}

#[test]
fn c03_dusart_bound_dominates_pi_to_one_million() {
    let start = Instant::now();
    let prime = is_prime_table(1_000_000);
    let mut pi = 0u64;
    let mut violations = Vec::new();
    for x in 2..=1_000_000u64 {
        if prime[x as usize] {
            pi += 1;
        }
        let bound = pi_upper_dusart(x as f64).unwrap();
        if !(bound.lo() >= pi as f64) {
            violations.push(x);
        }
    }
    assert_eq!(pi, 78_498);
    assert!(violations.is_empty(), "violations at {:?}", &violations[..violations.len().min(10)]);
    within(start, Duration::from_secs(30), "Dusart sweep");
}

#[test]
fn c04_robbins_bounds_to_500() {
    let mut sum = IntervalValue::int(0);
    let mut min_margin = f64::INFINITY;
    for nu in 2..=500u64 {
        sum = sum + IntervalValue::int(nu as i64).ln();
        let exact = log_factorial_exact(nu, 40).unwrap().enclosure();
        // the summation oracle and the exact product agree
        assert!(sum.lo() <= exact.hi() && exact.lo() <= sum.hi(), "nu = {nu}");
        let z = IntervalValue::int(nu as i64);
        let lo = log_g_minus(&z);
        let hi = log_g_plus(&z);
        let below = exact.lo() - lo.hi();
        let above = hi.lo() - exact.hi();
        assert!(below > 0.0 && above > 0.0, "nu = {nu}: margins {below:e}, {above:e}");
        min_margin = min_margin.min(below).min(above);
    }
    assert!(min_margin > 0.0);
}

#[test]
fn c05_psi_linear_bound_to_one_million() {
    const X: u64 = 1_000_000;
    // base[p^j] = p
    let mut base = vec![0u64; X as usize + 1];
    for p in primes_in(2, X).unwrap() {
        let mut q = p;
        while q <= X {
            base[q as usize] = p;
            q *= p;
        }
    }
    let c = IntervalValue::decimal("1.03883");
    let mut psi = IntervalValue::int(0);
    let mut min_margin = f64::INFINITY;
    for x in 2..=X {
        if base[x as usize] != 0 {
            psi = psi + IntervalValue::int(base[x as usize] as i64).ln();
        }
        let rhs = c * IntervalValue::int(x as i64);
        let margin = rhs.lo() - psi.hi();
        assert!(margin > 0.0, "psi({x}) = {psi} vs {rhs}");
        min_margin = min_margin.min(margin);
    }
    assert!(min_margin > 0.0);
    assert_eq!(decide(&PsiConstantCheck).verdict.kind, VerdictKind::Holds);
}

#[test]
fn c06_product_identity_equivalent_to_binomial_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut checked = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=200i64);
        let k = rng.gen_range(1..n);
        let m = rng.gen_range(0..k);
        let delta = rng.gen_range(0..=1i64);
        let l = rng.gen_range(delta + 1..=2 * n + 2);
        let t = ParamTuple::new(delta, n, m, k, l);
        assert_eq!(product_identity_holds(&t), check_eq12(&t), "{t:?}");
        checked += 1;
    }
    let mut collisions = 0;
    for rec in collisions_below_row(401) {
        for t in record_params(&rec) {
            assert!(check_eq12(&t), "{t:?}");
            assert!(product_identity_holds(&t), "{t:?}");
            collisions += 1;
        }
    }
    assert_eq!(checked, 1000);
    assert!(collisions >= 10);
}

#[test]
fn c07_sum_threshold_crossover() {
    let start = Instant::now();
    let c = sum_threshold_crossover().unwrap();
    assert!(c.f_star.abs_diff(871_155) <= 200, "F* = {}", c.f_star);
    assert!(c.at_f_star.lo() >= 0.0 && c.after_f_star.hi() < 0.0);
    assert_eq!(decide(&SumThreshold(100_000)).verdict.kind, VerdictKind::Holds);
    assert_eq!(decide(&SumThreshold(2_000_000)).verdict.kind, VerdictKind::Fails);
    within(start, Duration::from_secs(10), "crossover");
}

#[test]
fn c08_n_bound_order_of_magnitude() {
    let r = max_n_from_valuation_bound(&NmaxGrid { threads: 0, ..NmaxGrid::default() }).unwrap();
    assert!((1e10..=1e11).contains(&r.n_max), "n_max = {}", r.n_max);
    assert_eq!(r.reference, NMAX_REFERENCE);
    assert_eq!(r.reference, 31_754_673_611);
    // same decade as the published bound
    assert!((r.n_max / r.reference as f64).log10().abs() < 1.0);
}

#[test]
fn c09_small_case_contradiction() {
    let start = Instant::now();
    for k in 588..=100_000u64 {
        assert!(small_case_contradiction(k).unwrap().contradiction, "k = {k}");
    }
    assert!(!small_case_contradiction(1).unwrap().contradiction);
    within(start, Duration::from_secs(5), "contradiction sweep");
}

#[test]
fn c10_large_l_constants() {
    let c: IntervalValue = critical_constant();
    assert!((c.mid() - 0.68943).abs() < 5e-6, "c* = {c}");
    assert_eq!(decide(&CriticalConstantCheck).verdict.kind, VerdictKind::Holds);
    let r = large_l_consistency(1_000_000_000, 0.68).unwrap();
    assert_eq!(r.consistency.verdict, VerdictKind::Holds);
    let rate: IntervalValue = central_binom_rate();
    assert!((rate.mid() - 1.315_223_44).abs() < 1e-8, "rate = {rate}");
    assert_eq!(decide(&CentralRateCheck).verdict.kind, VerdictKind::Holds);
}

#[test]
fn c11_certificate_desk_scale() {
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let (code, out) = cli(&["certify", "--qmax", "100000000", "--threads", threads]);
        assert_eq!(code, 0, "threads {threads}");
        outputs.push(out);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]), "reports differ across thread counts");
    let v: Value = serde_json::from_slice(&outputs[0]).unwrap();
    let r = &v["result"];
    assert_eq!(r["coverage_ok"], true);
    assert_eq!(r["complete"], true);
    assert_eq!(r["certified"], true);
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
    assert_eq!(r["gap_cap_violations"].as_array().unwrap().len(), 0);
    // independent sieve oracle: 73 primes below 1e8 with gap >= 158
    assert_eq!(r["gap_prime_count"], 73);
    assert_eq!(r["prime_count"], 5_761_455);
    for w in r["windows"].as_array().unwrap() {
        assert_eq!(w["refuted"], 73);
    }
    assert_eq!(r["largest_gap"]["p"], 47_326_693);
    assert_eq!(r["largest_gap"]["gap"], 220);
}

/// The published computation, at full scale (about a minute on one core).
#[test]
fn c11_certificate_full_scale() {
    let config = CertificateConfig { threads: 0, ..CertificateConfig::default() };
    assert_eq!(config.q_max, 31_754_673_611);
    let r = run(&config).unwrap();
    assert_eq!(r.gap_prime_count, 572_960);
    assert!(r.failures.is_empty());
    assert!(r.gap_cap_violations.is_empty());
    assert!(r.certified);
    assert_eq!(r.largest_gap.map(|g| (g.p, g.gap)), Some((25_056_082_087, 456)));
}

#[test]
fn c12_lemma_checkers_on_true_collisions() {
    let mut satisfying = 0;
    let mut total = 0;
    for rec in collisions_below_row(401) {
        for t in record_params(&rec).into_iter().filter(|t| t.n <= 200) {
            total += 1;
            let a = check_log_ratio_bounds(&t);
            let b = check_window_smoothness(&t).unwrap();
            for r in [&a, &b] {
                if r.hypotheses.values().all(|&h| h) {
                    assert_eq!(r.verdict, VerdictKind::Holds, "{} on {t:?}: {}", r.lemma, r.notes);
                    satisfying += 1;
                } else {
                    assert_eq!(r.verdict, VerdictKind::Indeterminate);
                }
            }
        }
    }
    assert!(total >= 10);
    assert!(satisfying >= 4, "only {satisfying} hypothesis-satisfying checks");
}

#[test]
fn c13_outputs_deterministic() {
    let tuple = ["--delta", "1", "--n", "51", "--m", "11", "--k", "12", "--l", "2"];
    let with_tuple = |cmd: &[&'static str]| -> Vec<String> {
        cmd.iter().chain(tuple.iter()).map(|s| s.to_string()).collect()
    };
    let mut commands: Vec<Vec<String>> = vec![
        vec!["search".into(), "--max-value".into(), "25000".into()],
        vec!["search".into(), "--max-row".into(), "120".into()],
        vec!["fib-family".into(), "--count".into(), "5".into()],
        vec!["param".into(), "--x".into(), "104".into(), "--a".into(), "39".into(), "--y".into(), "103".into(), "--b".into(), "40".into()],
        vec!["bounds".into(), "pi-upper".into(), "--x".into(), "1742310".into()],
        vec!["bounds".into(), "stirling".into(), "--nu".into(), "500".into()],
        vec!["bounds".into(), "thresholds".into(), "--n".into(), "1000000".into(), "--c".into(), "0.68".into()],
        with_tuple(&["lemma", "check21"]),
        vec!["lemma".into(), "check22".into(), "--n".into(), "500000".into(), "--k".into(), "587".into()],
        with_tuple(&["lemma", "check23"]),
        with_tuple(&["lemma", "check31"]),
        vec!["lemma".into(), "threshold32".into()],
        vec!["lemma".into(), "nmax31".into(), "--k-hi".into(), "100000".into()],
        vec!["lemma".into(), "section4".into(), "--k".into(), "588".into()],
        vec!["lemma".into(), "section5".into(), "--n".into(), "1000000000".into(), "--c".into(), "0.68".into()],
        vec!["sieve".into(), "gaps".into(), "--hi".into(), "20000000".into(), "--min-gap".into(), "150".into()],
        vec!["sieve".into(), "pi".into(), "--x".into(), "1000000".into()],
        vec!["sieve".into(), "neighbors".into(), "--x".into(), "1000000".into()],
        vec!["certify".into(), "--qmax".into(), "10000000".into(), "--segment-size".into(), "4096".into()],
    ];
    for fmt in ["json", "text"] {
        commands.push(vec!["lemma".into(), "check21".into(), "--format".into(), fmt.into()]);
        commands.last_mut().unwrap().extend(tuple.iter().map(|s| s.to_string()));
    }
    for cmd in &commands {
        let args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        let mut runs = Vec::new();
        for threads in ["1", "1", "4", "8"] {
            let mut a = args.clone();
            a.extend(["--threads", threads]);
            let (code, out) = cli(&a);
            assert!(code == 0 || code == 1, "{cmd:?} exited {code}");
            runs.push(out);
        }
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{cmd:?} is not deterministic");
    }
}
