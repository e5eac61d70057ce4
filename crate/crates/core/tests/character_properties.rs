mod common;

use bvsieve::dirichlet::primitive_count;
use bvsieve::{character_group, CharValue, RootOfUnity};
use num_complex::Complex64;

#[test]
fn orthogonality_in_n() {
    for q in 1..=200u64 {
        let g = character_group(q).unwrap();
        for chi in g.characters() {
            let s: Complex64 = (1..=q).map(|n| chi.evaluate(n).to_complex()).sum();
            if chi.is_principal() {
                assert!((s.re - g.order() as f64).abs() < 1e-9);
            } else {
                assert!(s.norm() < 1e-12, "q = {q}, {:?}: {s}", chi.exponents());
            }
        }
    }
}

#[test]
fn orthogonality_in_chi() {
    for q in 1..=200u64 {
        let g = character_group(q).unwrap();
        let chars: Vec<_> = g.characters().collect();
        assert_eq!(chars.len() as u64, g.order());
        for n in (0..q).filter(|&n| common::gcd(n, q) == 1) {
            let s: Complex64 = chars.iter().map(|c| c.evaluate(n).to_complex()).sum();
            let expected = if n % q == 1 % q { g.order() as f64 } else { 0.0 };
            assert!((s - expected).norm() < 1e-12 * g.order() as f64 + 1e-12, "q = {q}, n = {n}");
        }
    }
}

#[test]
fn multiplicativity_is_exact() {
    for q in 1..=100u64 {
        let g = character_group(q).unwrap();
        for chi in g.characters() {
            for m in 0..q {
                for n in 0..q {
                    let lhs = chi.evaluate(m * n);
                    let rhs = match (chi.evaluate(m), chi.evaluate(n)) {
                        (CharValue::Root(a), CharValue::Root(b)) => CharValue::Root(a * b),
                        _ => CharValue::Zero,
                    };
                    assert_eq!(lhs, rhs, "q = {q}, m = {m}, n = {n}");
                    assert_eq!(lhs == CharValue::Zero, common::gcd(m * n, q) > 1);
                }
            }
        }
        assert_eq!(g.principal().evaluate(1), CharValue::Root(RootOfUnity::ONE));
    }
}

#[test]
fn conductors_match_brute_force_and_counts() {
    for q in 1..=500u64 {
        let g = character_group(q).unwrap();
        let mut primitive = 0;
        for chi in g.characters() {
            let values: Vec<Complex64> = (0..q).map(|n| chi.evaluate(n).to_complex()).collect();
            let f = common::brute_conductor(q, &values);
            assert_eq!(chi.conductor(), f, "q = {q}, {:?}", chi.exponents());
            if f == q {
                primitive += 1;
            }
        }
        let formula: i64 = (1..=q)
            .filter(|d| q % d == 0)
            .map(|d| common::mobius(q / d) * common::totient(d) as i64)
            .sum();
        assert_eq!(primitive, formula, "q = {q}");
        assert_eq!(primitive_count(q) as i64, formula);
    }
}

#[test]
fn polya_vinogradov_holds_up_to_300() {
    for q in 3..=300u64 {
        let g = character_group(q).unwrap();
        let bound = (q as f64).sqrt() * (q as f64).ln();
        for chi in g.primitive_characters() {
            let m = chi.polya_vinogradov_max().unwrap();
            assert!(m < bound, "q = {q}: {m} >= {bound}");
        }
    }
}

#[test]
fn polya_vinogradov_against_interval_scan() {
    for q in [5u64, 7, 8, 13, 15, 16, 21] {
        let g = character_group(q).unwrap();
        for chi in g.primitive_characters() {
            let vals: Vec<Complex64> = (0..q).map(|n| chi.evaluate(n).to_complex()).collect();
            let mut brute = 0.0f64;
            for x in 0..q as usize {
                for y in x..q as usize {
                    brute = brute.max(vals[x..=y].iter().sum::<Complex64>().norm());
                }
            }
            assert!((chi.polya_vinogradov_max().unwrap() - brute).abs() < 1e-10, "q = {q}");
        }
    }
}

#[test]
fn twisted_psi_matches_direct_sum() {
    let sieve = bvsieve::FactorSieve::new(3000).unwrap();
    for q in [3u64, 4, 5, 12, 17] {
        let g = character_group(q).unwrap();
        for chi in g.characters() {
            let direct: Complex64 = (2..=3000u64)
                .map(|n| chi.evaluate(n).to_complex() * common::mangoldt(n))
                .sum();
            let got = chi.psi_twisted(3000.0, &sieve).unwrap();
            assert!((got - direct).norm() < 1e-9, "q = {q}");
        }
    }
}
