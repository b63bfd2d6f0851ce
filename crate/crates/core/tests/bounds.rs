use binocoll::arith::log_binomial_exact;
use binocoll::bounds::{
    central_binom_lower, decide, dusart_interval, h_rate, log_binom_lowers_exact, pi_upper_dusart, HRateFloor, Real,
};
use binocoll::sieve::chebyshev_exact;

fn exact_log_binom(x: u64, r: u64) -> f64 {
    log_binomial_exact(x, r, 30).unwrap().enclosure().mid()
}

#[test]
fn h_rate_decreases_in_alpha() {
    let alphas: Vec<f64> = (1..=151).map(|i| i as f64 * 1e-5).collect();
    for lambda in [0.0, 0.001, 0.00271] {
        for w in alphas.windows(2) {
            let a = h_rate(w[0], lambda).unwrap();
            let b = h_rate(w[1], lambda).unwrap();
            assert!(a.lo() > b.hi(), "h({}, {lambda}) = {a} vs h({}, {lambda}) = {b}", w[0], w[1]);
        }
    }
}

#[test]
fn h_rate_increases_in_lambda() {
    for alpha in [1e-4, 5e-4, 0.00151] {
        let mut prev = h_rate(alpha, 0.0).unwrap();
        for j in 1..=271 {
            let cur = h_rate(alpha, j as f64 * 1e-5).unwrap();
            assert!(cur.lo() > prev.hi(), "alpha {alpha}, step {j}");
            prev = cur;
        }
    }
}

#[test]
fn h_rate_minimum_is_above_floor() {
    assert!(decide(&HRateFloor).verdict.holds());
    let corner = h_rate(0.00151, 0.0).unwrap();
    assert!((corner.mid() - 4.676_439_167_75).abs() < 1e-9, "corner = {corner}");
}

#[test]
fn h_rate_rejects_outside_domain() {
    assert!(h_rate(0.0, 0.0).is_err());
    assert!(h_rate(1.0, 0.0).is_err());
    assert!(h_rate(0.001, -0.1).is_err());
}

/// Both bounds against exact log binomials at the worst case `m = floor(0.735k)`, `m0 = m + 1`.
#[test]
fn log_binomial_lower_bounds_are_sound() {
    let cases = [(588u64, 0u64, 500_000u64), (588, 1, 389_404), (600, 1, 1_000_000), (1500, 4, 1_000_000), (1510, 4, 1_000_000), (3000, 8, 10_000_000), (15_000, 40, 10_000_000)];
    for (k, l, n) in cases {
        let Ok(b) = log_binom_lowers_exact(k, l, n) else {
            assert!(n < 500_000, "unexpected domain error at {k}, {l}, {n}");
            continue;
        };
        let m = k * 735 / 1000;
        let m0 = m + 1;
        let first = exact_log_binom(n - m - 1, k - m);
        let second = exact_log_binom(n + k + l, k + l - m0);
        assert!(b.first.hi() <= first, "first at ({k},{l},{n}): {} > {first}", b.first);
        assert!(b.second.hi() <= second, "second at ({k},{l},{n}): {} > {second}", b.second);
    }
}

#[test]
fn log_binomial_lower_bounds_reject_outside_domain() {
    assert!(log_binom_lowers_exact(500, 0, 1_000_000).is_err());
    assert!(log_binom_lowers_exact(2000, 0, 1_000_000).is_err());
    assert!(log_binom_lowers_exact(1000, 10, 1_000_000).is_err());
    assert!(log_binom_lowers_exact(600, 0, 100_000).is_err());
}

#[test]
fn central_binomial_bound_below_exact_at_rate_index() {
    for n in [500_000u64, 1_000_000, 4_000_000] {
        let bound = central_binom_lower(n).unwrap();
        let exact = exact_log_binom(2 * n, n * 735 / 1000);
        assert!(bound.hi() <= exact, "n = {n}: {bound} vs {exact}");
    }
}

#[test]
fn dusart_bound_dominates_exact_counts() {
    for x in [600_000u64, 1_742_310, 10_000_000, 100_000_000] {
        let pi = chebyshev_exact(x).unwrap().pi;
        let ub = pi_upper_dusart(x as f64).unwrap();
        assert!(ub.lo() >= pi as f64, "x = {x}: pi = {pi}, bound = {ub}");
    }
}

#[test]
fn dusart_window_holds_a_prime() {
    for x in [500_000.0f64, 2e6, 2e9] {
        let w = dusart_interval(x).unwrap();
        let len = w.length();
        assert!(len.lo() > 0.0);
        let lo = x as u64;
        let hi = lo + len.lo() as u64;
        let (_, next) = binocoll::sieve::prime_neighbors(lo).unwrap();
        assert!(next <= hi, "no prime in ({lo}, {hi}]");
    }
}
