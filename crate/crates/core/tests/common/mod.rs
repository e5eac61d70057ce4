//! Brute-force oracles that share no code with the library.

#![allow(dead_code)]

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Λ(n) by trial division.
pub fn mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let p = (2..=n).find(|d| n % d == 0).unwrap();
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 { (p as f64).ln() } else { 0.0 }
}

pub fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Σ_{n ≤ y} Λ(n), plain loop.
pub fn psi(y: u64) -> f64 {
    (2..=y).map(mangoldt).sum()
}

/// Smallest f | q such that χ(n) = 1 whenever n ≡ 1 (mod f) and gcd(n, q) = 1,
/// given χ's values on 0..q as complex numbers.
pub fn brute_conductor(q: u64, values: &[num_complex::Complex64]) -> u64 {
    (1..=q)
        .filter(|f| q % f == 0)
        .find(|&f| {
            (0..q)
                .filter(|&n| gcd(n, q) == 1 && n % f == 1 % f)
                .all(|n| (values[n as usize] - 1.0).norm() < 1e-9)
        })
        .unwrap()
}

/// η(t) straight from the piecewise definition.
pub fn eta(t: f64, v: f64, v0: f64) -> f64 {
    if t <= v {
        1.0
    } else if t > v0 {
        0.0
    } else {
        (v0 / t).ln() / (v0 / v).ln()
    }
}
