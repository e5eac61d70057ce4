//! Primes in arithmetic progressions: ψ(y; q, a), per-modulus maximal
//! errors, and the averaged error sums over moduli `q ≤ Q`.
//!
//! Every error is a maximum over real `y ∈ [2, x]`. Both ψ(y; q, a) and the
//! step baselines ψ(y)/φ(q), π(y)/φ(q) are right-continuous step functions
//! jumping at integers, so for those baselines the error only needs to be
//! read at the jump points. Against the linear baseline `y/φ(q)` the error
//! `|c − y/φ(q)|` is convex on every constancy interval `[n_i, n_{i+1})` of
//! ψ(·; q, a), so its supremum there is at `y = n_i` or at the left limit
//! `y → n_{i+1}⁻` (or at `y = x` for the last interval). Left-limit
//! suprema are reported with [`ErrorRecord::left_limit`] set.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;

use crate::arith::FactorSieve;
use crate::dirichlet::gcd;
use crate::error::{invalid, range, Result};
use crate::sum::{compensated_sum, Accumulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Baseline {
    /// `y / φ(q)`
    IdentityY,
    /// `ψ(y) / φ(q)`
    ChebyshevPsi,
    /// π(y; q, a) against `π(y) / φ(q)`.
    PiLiStyle,
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Baseline::IdentityY => "identity_y",
            Baseline::ChebyshevPsi => "chebyshev_psi",
            Baseline::PiLiStyle => "pi_li_style",
        }
    }
}

/// The largest error for one modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub q: u64,
    pub a_star: u64,
    pub y_star: f64,
    /// The supremum is the left limit `y → y_star⁻`.
    pub left_limit: bool,
    pub error: f64,
    pub baseline: Baseline,
}

impl ErrorRecord {
    /// Ordering key among equal errors: smaller `y` first (a left limit
    /// counts as just below its point), then smaller `a`.
    fn position(&self) -> (f64, u8, u64) {
        (self.y_star, !self.left_limit as u8, self.a_star)
    }

    fn beats(&self, other: &ErrorRecord) -> bool {
        self.error > other.error
            || (self.error == other.error && self.position() < other.position())
    }
}

/// The three right-hand sides, plus the mean-value estimate over primitive
/// characters, all with implied constant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsBounds {
    /// `x / (log x)^{A−2}`
    pub log_power: f64,
    /// `x^{1/2} Q (log x)² + (x/Q₁)(log x)³ + x^{13/14+ε} (log x)⁴`
    pub sifted: f64,
    /// Same shape as `sifted`, stated for the prime-counting variant.
    pub prime_count: f64,
    /// `(x + Q² x^{1/2} + Q x^{13/14+ε}) (log x)²`
    pub character_mean: f64,
}

pub fn rhs_bounds(x: f64, q_max: f64, q1: f64, a: f64, epsilon: f64) -> RhsBounds {
    let l = x.ln();
    let tail = x.powf(13.0 / 14.0 + epsilon);
    let sifted = x.sqrt() * q_max * l.powi(2) + x / q1 * l.powi(3) + tail * l.powi(4);
    RhsBounds {
        log_power: x / l.powf(a - 2.0),
        sifted,
        prime_count: sifted,
        character_mean: (x + q_max * q_max * x.sqrt() + q_max * tail) * l.powi(2),
    }
}

/// `A` and `ε` used when evaluating the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSettings {
    pub a: f64,
    pub epsilon: f64,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self { a: 3.0, epsilon: crate::vaughan::DEFAULT_EPSILON }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BVReport {
    pub x: f64,
    pub q_max: f64,
    pub q1: f64,
    pub baseline: Baseline,
    pub lhs_sum: f64,
    /// The bound matching the baseline: `log_power` for `IdentityY`,
    /// `sifted` for `ChebyshevPsi`, `prime_count` for `PiLiStyle`.
    pub rhs_bound: f64,
    pub ratio: f64,
    pub bounds: RhsBounds,
    pub records: Vec<ErrorRecord>,
    pub elapsed_ms: u128,
}

fn check_progression(q: u64, a: u64) -> Result<()> {
    if q < 1 {
        return invalid("modulus must be at least 1");
    }
    if a >= q {
        return invalid(format!("residue {a} not in [0, {q})"));
    }
    Ok(())
}

/// ψ(y; q, a) = Σ_{n ≤ y, n ≡ a (q)} Λ(n).
pub fn psi_progression(y: f64, q: u64, a: u64, sieve: &FactorSieve) -> Result<f64> {
    check_progression(q, a)?;
    let top = sieve.floor_index(y)?;
    let mut acc = Accumulator::new();
    for n in (a as usize..=top).step_by(q as usize) {
        acc.add(sieve.lambda(n));
    }
    Ok(acc.value())
}

/// π(y; q, a), the number of primes `p ≤ y` with `p ≡ a (q)`.
pub fn pi_progression(y: f64, q: u64, a: u64, sieve: &FactorSieve) -> Result<u64> {
    check_progression(q, a)?;
    let top = sieve.floor_index(y)?;
    Ok((a as usize..=top).step_by(q as usize).filter(|&n| sieve.is_prime(n)).count() as u64)
}

fn check_x(x: f64, sieve: &FactorSieve) -> Result<usize> {
    if !(x >= 4.0) {
        return invalid(format!("x must be at least 4, got {x}"));
    }
    if x > sieve.limit() as f64 {
        return range(format!("x = {x} exceeds sieve limit {}", sieve.limit()));
    }
    Ok(x.floor() as usize)
}

/// max over `2 ≤ y ≤ x` and `gcd(a, q) = 1` of the progression error.
///
/// Ties go to the smallest `y`, then the smallest `a`.
pub fn max_error(q: u64, x: f64, baseline: Baseline, sieve: &FactorSieve) -> Result<ErrorRecord> {
    if q < 1 {
        return invalid("modulus must be at least 1");
    }
    let top = check_x(x, sieve)?;
    Ok(match baseline {
        Baseline::IdentityY => identity_max_error(q, x, top, sieve),
        Baseline::ChebyshevPsi | Baseline::PiLiStyle => step_max_error(q, top, baseline, sieve),
    })
}

fn identity_max_error(q: u64, x: f64, top: usize, sieve: &FactorSieve) -> ErrorRecord {
    let qs = q as usize;
    let phi = if q == 1 { 1.0 } else { sieve_phi(q, sieve) };
    let coprime: Vec<bool> = (0..qs).map(|r| gcd(r as u64, q) == 1).collect();
    let mut psi = vec![Accumulator::new(); qs];
    let mut best = ErrorRecord {
        q,
        a_star: 0,
        y_star: 2.0,
        left_limit: false,
        error: f64::NEG_INFINITY,
        baseline: Baseline::IdentityY,
    };
    let mut offer = |a: usize, y: f64, left: bool, value: f64| {
        let cand = ErrorRecord {
            q,
            a_star: a as u64,
            y_star: y,
            left_limit: left,
            error: (value - y / phi).abs(),
            baseline: Baseline::IdentityY,
        };
        if cand.beats(&best) {
            best = cand;
        }
    };

    // y = 2: n = 2 is a prime power, so ψ(2; q, a) = log 2 · [a ≡ 2].
    let r2 = 2 % qs;
    psi[r2].add(sieve.lambda(2));
    for a in (0..qs).filter(|&a| coprime[a]) {
        offer(a, 2.0, false, psi[a].value());
    }
    for n in sieve.prime_powers(top).skip(1) {
        let r = n % qs;
        if !coprime[r] {
            continue;
        }
        offer(r, n as f64, true, psi[r].value());
        psi[r].add(sieve.lambda(n));
        offer(r, n as f64, false, psi[r].value());
    }
    for a in (0..qs).filter(|&a| coprime[a]) {
        offer(a, x, false, psi[a].value());
    }
    best
}

fn sieve_phi(q: u64, sieve: &FactorSieve) -> f64 {
    if q <= sieve.limit() {
        sieve.phi(q as usize) as f64
    } else {
        (1..=q).filter(|&r| gcd(r, q) == 1).count() as f64
    }
}

/// Non-negative `f64` values order like their bit patterns.
fn key(v: f64) -> u64 {
    debug_assert!(v >= 0.0);
    v.to_bits()
}

fn step_max_error(q: u64, top: usize, baseline: Baseline, sieve: &FactorSieve) -> ErrorRecord {
    let qs = q as usize;
    let phi = if q == 1 { 1.0 } else { sieve_phi(q, sieve) };
    let coprime: Vec<bool> = (0..qs).map(|r| gcd(r as u64, q) == 1).collect();
    let mut values = vec![Accumulator::new(); qs];
    let mut order: BTreeSet<(u64, usize)> =
        (0..qs).filter(|&a| coprime[a]).map(|a| (key(0.0), a)).collect();
    let mut total = Accumulator::new();
    let mut best = ErrorRecord {
        q,
        a_star: 0,
        y_star: 2.0,
        left_limit: false,
        error: f64::NEG_INFINITY,
        baseline,
    };

    let jumps: Box<dyn Iterator<Item = (usize, f64)>> = match baseline {
        Baseline::PiLiStyle => Box::new((2..=top).filter(|&n| sieve.is_prime(n)).map(|n| (n, 1.0))),
        _ => Box::new(sieve.prime_powers(top).map(|n| (n, sieve.lambda(n)))),
    };
    for (n, weight) in jumps {
        total.add(weight);
        let r = n % qs;
        if coprime[r] {
            order.remove(&(key(values[r].value()), r));
            values[r].add(weight);
            order.insert((key(values[r].value()), r));
        }
        let mean = total.value() / phi;
        let &(lo_bits, lo_a) = order.first().expect("at least one unit residue");
        let &(hi_bits, _) = order.last().expect("at least one unit residue");
        let hi_a = order.range((hi_bits, 0)..).next().expect("present").1;
        let lo_err = mean - f64::from_bits(lo_bits);
        let hi_err = f64::from_bits(hi_bits) - mean;
        let (error, a) = if hi_err > lo_err || (hi_err == lo_err && hi_a < lo_a) {
            (hi_err.abs(), hi_a)
        } else {
            (lo_err.abs(), lo_a)
        };
        let cand = ErrorRecord {
            q,
            a_star: a as u64,
            y_star: n as f64,
            left_limit: false,
            error,
            baseline,
        };
        if cand.beats(&best) {
            best = cand;
        }
    }
    best
}

fn check_aggregate(x: f64, q_max: f64, q1: f64, sieve: &FactorSieve) -> Result<()> {
    check_x(x, sieve)?;
    if !(q1 >= 1.0) {
        return invalid(format!("Q1 must be at least 1, got {q1}"));
    }
    if !(q_max >= 0.0) || q_max > x.sqrt() {
        return invalid(format!("need 0 <= Q <= sqrt(x) = {}, got Q = {q_max}", x.sqrt()));
    }
    // Q₁ = 1 applies no filter; Q < 1 is then an empty range of moduli.
    if q1 > 1.0 && q1 > q_max {
        return invalid(format!("need Q1 <= Q, got Q1 = {q1}, Q = {q_max}"));
    }
    Ok(())
}

/// Σ_{q ≤ Q, l(q) > Q₁} max_error(q, x), with moduli scanned in parallel on
/// the current rayon pool and summed in ascending `q`.
pub fn bv_aggregate(
    x: f64,
    q_max: f64,
    q1: f64,
    baseline: Baseline,
    settings: BoundSettings,
    sieve: &FactorSieve,
) -> Result<BVReport> {
    check_aggregate(x, q_max, q1, sieve)?;
    let start = Instant::now();
    let moduli: Vec<u64> = (1..=q_max.floor() as u64)
        .filter(|&q| q == 1 || smallest_prime_factor(q, sieve) as f64 > q1)
        .collect();
    let records: Vec<ErrorRecord> = moduli
        .par_iter()
        .map(|&q| max_error(q, x, baseline, sieve))
        .collect::<Result<_>>()?;
    let lhs_sum = compensated_sum(records.iter().map(|r| r.error));
    let bounds = rhs_bounds(x, q_max, q1, settings.a, settings.epsilon);
    let rhs_bound = match baseline {
        Baseline::IdentityY => bounds.log_power,
        Baseline::ChebyshevPsi => bounds.sifted,
        Baseline::PiLiStyle => bounds.prime_count,
    };
    Ok(BVReport {
        x,
        q_max,
        q1,
        baseline,
        lhs_sum,
        rhs_bound,
        ratio: lhs_sum / rhs_bound,
        bounds,
        records,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// The prime-counting analogue of [`bv_aggregate`].
pub fn pi_aggregate(
    x: f64,
    q_max: f64,
    q1: f64,
    settings: BoundSettings,
    sieve: &FactorSieve,
) -> Result<BVReport> {
    bv_aggregate(x, q_max, q1, Baseline::PiLiStyle, settings, sieve)
}

fn smallest_prime_factor(q: u64, sieve: &FactorSieve) -> u64 {
    if q <= sieve.limit() {
        sieve.lpf(q as usize) as u64
    } else {
        crate::dirichlet::trial_factor(q)[0].0
    }
}
