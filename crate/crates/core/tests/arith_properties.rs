mod common;

use bvsieve::FactorSieve;
use proptest::prelude::*;

#[test]
fn chebyshev_psi_matches_trial_division_up_to_1e4() {
    let sieve = FactorSieve::new(10_000).unwrap();
    let mut oracle = 0.0;
    for y in 0..=10_000u64 {
        oracle += common::mangoldt(y);
        let got = sieve.chebyshev_psi(y as f64).unwrap();
        assert!((got - oracle).abs() <= 1e-9 * oracle.max(1.0), "y = {y}");
    }
}

#[test]
fn psi_at_ten() {
    let sieve = FactorSieve::new(10).unwrap();
    let expected = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
    assert!((sieve.chebyshev_psi(10.0).unwrap() - expected).abs() < 1e-12);
    assert!((expected - common::psi(10)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn psi_is_monotone(a in 0.0f64..50_000.0, b in 0.0f64..50_000.0) {
        let sieve = FactorSieve::new(50_000).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(sieve.chebyshev_psi(lo).unwrap() <= sieve.chebyshev_psi(hi).unwrap());
    }

    #[test]
    fn point_values_match_oracles(n in 2u64..20_000) {
        let sieve = FactorSieve::new(20_000).unwrap();
        let v = sieve.arithmetic_values(n).unwrap();
        prop_assert_eq!(v.mu as i64, common::mobius(n));
        prop_assert_eq!(v.phi as u64, common::totient(n));
        prop_assert!((v.lambda - common::mangoldt(n)).abs() < 1e-15);
        prop_assert!(common::is_prime(v.lpf as u64) && n % v.lpf as u64 == 0);
    }
}
