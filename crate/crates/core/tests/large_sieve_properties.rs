use bvsieve::large_sieve::{run_trials, DEFAULT_SEED};
use bvsieve::{bilinear_sieve_check, character_group, classical_large_sieve_check, TrialKind, TrialLimits};
use num_complex::Complex64;
use proptest::prelude::*;

fn coeffs(raw: &[(f64, f64)]) -> Vec<Complex64> {
    raw.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
}

fn weight(q: u64) -> f64 {
    q as f64 / character_group(q).unwrap().order() as f64
}

/// Sums χ(m) a_m directly over the m range, with no residue folding.
fn brute_classical(q_max: u64, m0: u64, a: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for q in 1..=q_max {
        let g = character_group(q).unwrap();
        let inner: f64 = g
            .primitive_characters()
            .map(|chi| {
                a.iter()
                    .enumerate()
                    .map(|(i, &am)| am * chi.evaluate(m0 + 1 + i as u64).to_complex())
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        total += weight(q) * inner;
    }
    total
}

/// Scans every integer y up to the cap.
fn brute_bilinear(q_max: u64, m0: u64, a: &[Complex64], n0: u64, b: &[Complex64], cap: u64) -> f64 {
    let mut total = 0.0;
    for q in 1..=q_max {
        let g = character_group(q).unwrap();
        let inner: f64 = g
            .primitive_characters()
            .map(|chi| {
                (1..=cap)
                    .map(|y| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for (i, &am) in a.iter().enumerate() {
                            for (j, &bn) in b.iter().enumerate() {
                                let mn = (m0 + i as u64) * (n0 + j as u64);
                                if mn <= y {
                                    s += am * bn * chi.evaluate(mn).to_complex();
                                }
                            }
                        }
                        s.norm()
                    })
                    .fold(0.0, f64::max)
            })
            .sum();
        total += weight(q) * inner;
    }
    total
}

#[test]
fn classical_matches_direct_sum() {
    let a = coeffs(&[(1.0, 0.5), (-2.0, 0.0), (0.3, -1.1), (4.0, 2.0), (0.0, 1.0), (-0.7, 0.2), (1.5, 1.5)]);
    for q in [1u64, 4, 9, 13] {
        for m0 in [0u64, 5, 37] {
            let t = classical_large_sieve_check(q, m0, &a).unwrap();
            let want = brute_classical(q, m0, &a);
            assert!((t.lhs - want).abs() < 1e-10 * want.max(1.0), "Q = {q}, m0 = {m0}");
            assert!(t.holds());
        }
    }
}

#[test]
fn bilinear_matches_integer_scan() {
    let a = coeffs(&[(1.0, 0.0), (-1.5, 0.5), (0.25, 2.0), (3.0, -1.0)]);
    let b = coeffs(&[(0.5, 0.5), (2.0, 0.0), (-1.0, 1.0)]);
    for q in [1u64, 3, 5] {
        for &(m0, n0, cap) in &[(1u64, 1u64, 12u64), (3, 2, 20), (7, 11, 60)] {
            let t = bilinear_sieve_check(q, m0, &a, n0, &b, cap as f64).unwrap();
            let want = brute_bilinear(q, m0, &a, n0, &b, cap);
            assert!((t.lhs - want).abs() < 1e-10 * want.max(1.0), "Q = {q}");
        }
    }
}

#[test]
fn seeded_trials_hold_and_repeat() {
    for (kind, limits, count) in [
        (TrialKind::Classical, TrialLimits::CLASSICAL, 40),
        (TrialKind::Bilinear, TrialLimits::BILINEAR, 40),
    ] {
        let first = run_trials(kind, count, DEFAULT_SEED, limits).unwrap();
        assert!(first.iter().all(|t| t.holds()), "{kind:?}");
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let again = pool.install(|| run_trials(kind, count, DEFAULT_SEED, limits).unwrap());
        assert_eq!(first, again);
    }
}

fn coeff_strategy(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..max).prop_map(|v| coeffs(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn classical_scaling(q in 1u64..12, m0 in 0u64..200, a in coeff_strategy(60), theta in 0.0f64..6.3, t in 0.1f64..10.0) {
        let base = classical_large_sieve_check(q, m0, &a).unwrap();
        prop_assert!(base.holds());
        let u = Complex64::from_polar(1.0, theta);
        let rotated: Vec<_> = a.iter().map(|z| z * u).collect();
        let r = classical_large_sieve_check(q, m0, &rotated).unwrap();
        prop_assert!((r.lhs - base.lhs).abs() <= 1e-10 * base.lhs.max(1.0));
        let scaled: Vec<_> = a.iter().map(|z| z * t).collect();
        let s = classical_large_sieve_check(q, m0, &scaled).unwrap();
        prop_assert!((s.lhs - t * t * base.lhs).abs() <= 1e-10 * (t * t * base.lhs).max(1.0));
        prop_assert!((s.rhs - t * t * base.rhs).abs() <= 1e-10 * t * t * base.rhs);
    }

    #[test]
    fn bilinear_scaling(q in 1u64..6, m0 in 1u64..30, n0 in 1u64..30, a in coeff_strategy(12), b in coeff_strategy(12), theta in 0.0f64..6.3, t in 0.1f64..10.0, frac in 0.0f64..1.0) {
        let top = ((m0 + a.len() as u64 - 1) * (n0 + b.len() as u64 - 1)) as f64;
        let cap = (frac * top).max(1.0);
        let base = bilinear_sieve_check(q, m0, &a, n0, &b, cap).unwrap();
        prop_assert!(base.holds());
        let u = Complex64::from_polar(1.0, theta);
        let rotated: Vec<_> = a.iter().map(|z| z * u).collect();
        let r = bilinear_sieve_check(q, m0, &rotated, n0, &b, cap).unwrap();
        prop_assert!((r.lhs - base.lhs).abs() <= 1e-10 * base.lhs.max(1.0));
        let scaled: Vec<_> = b.iter().map(|z| z * t).collect();
        let s = bilinear_sieve_check(q, m0, &a, n0, &scaled, cap).unwrap();
        prop_assert!((s.lhs - t * base.lhs).abs() <= 1e-10 * (t * base.lhs).max(1.0));
        prop_assert!((s.rhs - t * base.rhs).abs() <= 1e-10 * t * base.rhs);
    }
}
