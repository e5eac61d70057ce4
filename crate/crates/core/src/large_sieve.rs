//! Numerical checks of the multiplicative large-sieve inequality and its
//! bilinear form over primitive characters.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dirichlet::{primitive_tables, CharacterTable};
use crate::error::{invalid, Result};
use crate::sum::{Accumulator, ComplexAccumulator};

/// Constant of the bilinear inequality, rounded up from 2.64….
pub const C3: f64 = 2.65;

/// Base of the seed list used by the randomized trial batches: trial `i`
/// of a batch is drawn from `ChaCha8Rng::seed_from_u64(base + i)`.
pub const DEFAULT_SEED: u64 = 20_170_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialKind {
    Classical,
    Bilinear,
}

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveTrial {
    pub kind: TrialKind,
    pub q_max: u64,
    /// First index of the `a` range and its length.
    pub m_start: u64,
    pub m_len: u64,
    /// First index of the `b` range and its length (bilinear only).
    pub n_start: u64,
    pub n_len: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl SieveTrial {
    pub fn holds(&self) -> bool {
        self.margin >= 0.0
    }
}

/// Primitive character tables for every `q ≤ Q`, with weights `q/φ(q)`.
#[derive(Debug, Clone)]
pub struct PrimitiveFamily {
    q_max: u64,
    moduli: Vec<(u64, f64, Vec<CharacterTable>)>,
}

impl PrimitiveFamily {
    pub fn new(q_max: u64) -> Result<Self> {
        if q_max < 1 {
            return invalid("Q must be at least 1");
        }
        let moduli = (1..=q_max)
            .map(|q| {
                let tables = primitive_tables(q)?;
                let phi = crate::dirichlet::CharacterGroup::new(q)?.order();
                Ok((q, q as f64 / phi as f64, tables))
            })
            .collect::<Result<_>>()?;
        Ok(Self { q_max, moduli })
    }

    pub fn q_max(&self) -> u64 {
        self.q_max
    }

    fn upto(&self, q: u64) -> impl Iterator<Item = &(u64, f64, Vec<CharacterTable>)> {
        self.moduli.iter().take_while(move |(m, _, _)| *m <= q)
    }
}

fn l2_squared(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<Accumulator>().value()
}

/// Σ_{q ≤ Q} (q/φ(q)) Σ*_χ |Σ_{m=m₀+1}^{m₀+M} a_m χ(m)|² against `(M + Q²) Σ|a_m|²`.
pub fn classical_large_sieve_check(q_max: u64, m0: u64, a: &[Complex64]) -> Result<SieveTrial> {
    let family = PrimitiveFamily::new(q_max)?;
    classical_check_with(&family, q_max, m0, a)
}

/// As [`classical_large_sieve_check`], reusing precomputed character tables.
pub fn classical_check_with(
    family: &PrimitiveFamily,
    q_max: u64,
    m0: u64,
    a: &[Complex64],
) -> Result<SieveTrial> {
    if a.is_empty() {
        return invalid("coefficient vector is empty");
    }
    if q_max < 1 || q_max > family.q_max {
        return invalid(format!("Q = {q_max} outside [1, {}]", family.q_max));
    }
    let mut lhs = Accumulator::new();
    for (q, weight, tables) in family.upto(q_max) {
        let q = *q as usize;
        // Fold the coefficients onto residues mod q first.
        let mut buckets = vec![ComplexAccumulator::new(); q];
        for (i, &am) in a.iter().enumerate() {
            let m = m0 as usize + 1 + i;
            buckets[m % q].add(am);
        }
        let buckets: Vec<Complex64> = buckets.iter().map(|b| b.value()).collect();
        let mut inner = Accumulator::new();
        for t in tables {
            let mut s = ComplexAccumulator::new();
            for (r, b) in buckets.iter().enumerate() {
                s.add(t.values()[r] * b);
            }
            inner.add(s.value().norm_sqr());
        }
        lhs.add(weight * inner.value());
    }
    let lhs = lhs.value();
    let m_len = a.len() as f64;
    let rhs = (m_len + (q_max * q_max) as f64) * l2_squared(a);
    Ok(SieveTrial {
        kind: TrialKind::Classical,
        q_max,
        m_start: m0 + 1,
        m_len: a.len() as u64,
        n_start: 0,
        n_len: 0,
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Σ_{q ≤ Q} (q/φ(q)) Σ*_χ max_y |Σ_{m,n: mn ≤ y} a_m b_n χ(mn)| against
/// `c₃ (M′+Q²)^{1/2} (N′+Q²)^{1/2} ‖a‖ ‖b‖ log(2MN)`.
///
/// `a[i]` is the coefficient of `m = m0 + i` and `b[j]` of `n = n0 + j`;
/// `M`, `N` are the last indices and `M′`, `N′` the lengths. The maximum
/// over `y` runs over the distinct products `mn ≤ x_cap`.
pub fn bilinear_sieve_check(
    q_max: u64,
    m0: u64,
    a: &[Complex64],
    n0: u64,
    b: &[Complex64],
    x_cap: f64,
) -> Result<SieveTrial> {
    let family = PrimitiveFamily::new(q_max)?;
    bilinear_check_with(&family, q_max, m0, a, n0, b, x_cap)
}

pub fn bilinear_check_with(
    family: &PrimitiveFamily,
    q_max: u64,
    m0: u64,
    a: &[Complex64],
    n0: u64,
    b: &[Complex64],
    x_cap: f64,
) -> Result<SieveTrial> {
    if a.is_empty() || b.is_empty() {
        return invalid("coefficient ranges must be non-empty");
    }
    if m0 < 1 || n0 < 1 {
        return invalid("index ranges must start at 1 or later");
    }
    if q_max < 1 || q_max > family.q_max {
        return invalid(format!("Q = {q_max} outside [1, {}]", family.q_max));
    }

    let mut pairs: Vec<(u64, Complex64)> = Vec::with_capacity(a.len() * b.len());
    for (i, &am) in a.iter().enumerate() {
        let m = m0 + i as u64;
        for (j, &bn) in b.iter().enumerate() {
            let mn = m * (n0 + j as u64);
            if mn as f64 <= x_cap {
                pairs.push((mn, am * bn));
            }
        }
    }
    pairs.sort_by_key(|&(mn, _)| mn);

    let mut lhs = Accumulator::new();
    for (q, weight, tables) in family.upto(q_max) {
        let mut inner = Accumulator::new();
        for t in tables {
            let mut s = ComplexAccumulator::new();
            let mut best = 0.0f64;
            for (idx, &(mn, c)) in pairs.iter().enumerate() {
                s.add(c * t.value(mn));
                let group_end = pairs.get(idx + 1).is_none_or(|&(next, _)| next != mn);
                if group_end {
                    best = best.max(s.value().norm());
                }
            }
            inner.add(best);
        }
        debug_assert!(*q <= q_max);
        lhs.add(weight * inner.value());
    }
    let lhs = lhs.value();

    let m_end = m0 + a.len() as u64 - 1;
    let n_end = n0 + b.len() as u64 - 1;
    let q2 = (q_max * q_max) as f64;
    let rhs = C3
        * (a.len() as f64 + q2).sqrt()
        * (b.len() as f64 + q2).sqrt()
        * l2_squared(a).sqrt()
        * l2_squared(b).sqrt()
        * (2.0 * m_end as f64 * n_end as f64).ln();
    Ok(SieveTrial {
        kind: TrialKind::Bilinear,
        q_max,
        m_start: m0,
        m_len: a.len() as u64,
        n_start: n0,
        n_len: b.len() as u64,
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Bounds for randomized trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialLimits {
    pub max_q: u64,
    pub max_len: usize,
    /// Range starts are drawn from `[1, max_start]`.
    pub max_start: u64,
}

impl TrialLimits {
    pub const CLASSICAL: TrialLimits = TrialLimits { max_q: 30, max_len: 2000, max_start: 1000 };
    pub const BILINEAR: TrialLimits = TrialLimits { max_q: 5, max_len: 50, max_start: 50 };
}

fn normal_vector(rng: &mut ChaCha8Rng, len: usize, complex: bool) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect()
}

/// Runs `count` seeded trials of `kind`; trial `i` uses seed `base_seed + i`
/// and has complex coefficients when `i` is odd, real ones otherwise.
/// Results come back in trial order whatever the pool size.
pub fn run_trials(
    kind: TrialKind,
    count: usize,
    base_seed: u64,
    limits: TrialLimits,
) -> Result<Vec<SieveTrial>> {
    if limits.max_q < 1 || limits.max_len < 1 || limits.max_start < 1 {
        return invalid("trial limits must be positive");
    }
    let family = PrimitiveFamily::new(limits.max_q)?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(i as u64));
            let complex = i % 2 == 1;
            let q = rng.gen_range(1..=limits.max_q);
            let m0 = rng.gen_range(1..=limits.max_start);
            let m_len = rng.gen_range(1..=limits.max_len);
            let a = normal_vector(&mut rng, m_len, complex);
            match kind {
                TrialKind::Classical => classical_check_with(&family, q, m0 - 1, &a),
                TrialKind::Bilinear => {
                    let n0 = rng.gen_range(1..=limits.max_start);
                    let n_len = rng.gen_range(1..=limits.max_len);
                    let b = normal_vector(&mut rng, n_len, complex);
                    let top = (m0 + m_len as u64 - 1) * (n0 + n_len as u64 - 1);
                    let x_cap = rng.gen_range(1..=top) as f64;
                    bilinear_check_with(&family, q, m0, &a, n0, &b, x_cap)
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_q1_is_cauchy_schwarz() {
        let a = vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.25, 3.0)];
        let t = classical_large_sieve_check(1, 4, &a).unwrap();
        let s: Complex64 = a.iter().sum();
        assert!((t.lhs - s.norm_sqr()).abs() < 1e-12);
        assert!((t.rhs - 4.0 * l2_squared(&a)).abs() < 1e-12);
        assert!(t.holds());
    }

    #[test]
    fn zero_coefficients() {
        let a = vec![c(0.0, 0.0); 10];
        let t = classical_large_sieve_check(5, 0, &a).unwrap();
        assert_eq!((t.lhs, t.rhs, t.margin), (0.0, 0.0, 0.0));
        let b = vec![c(1.0, 1.0); 4];
        let t = bilinear_sieve_check(3, 1, &a, 1, &b, 100.0).unwrap();
        assert_eq!(t.lhs, 0.0);
        assert!(classical_large_sieve_check(5, 0, &[]).is_err());
        assert!(bilinear_sieve_check(5, 1, &[], 1, &b, 10.0).is_err());
        assert!(bilinear_sieve_check(5, 0, &b, 1, &b, 10.0).is_err());
    }

    #[test]
    fn bilinear_single_terms() {
        let t = bilinear_sieve_check(1, 1, &[c(3.0, 0.0)], 1, &[c(0.0, 2.0)], 1.0).unwrap();
        assert!((t.lhs - 6.0).abs() < 1e-12);
        let expected = C3 * 2f64.sqrt() * 2f64.sqrt() * 3.0 * 2.0 * 2f64.ln();
        assert!((t.rhs - expected).abs() < 1e-12);
        assert!(t.holds());
    }

    #[test]
    fn bilinear_max_over_y_brute_force() {
        // Q = 3: characters mod 1 and the primitive one mod 3.
        let a = [c(1.0, 0.0), c(-1.0, 0.5), c(2.0, -1.0)];
        let b = [c(0.5, 0.0), c(1.0, 1.0)];
        let (m0, n0, x_cap) = (2u64, 3u64, 11.0);
        let t = bilinear_sieve_check(3, m0, &a, n0, &b, x_cap).unwrap();
        let chi3 = |n: u64| match n % 3 {
            0 => 0.0,
            1 => 1.0,
            _ => -1.0,
        };
        let brute = |chi: &dyn Fn(u64) -> f64| {
            let mut best = 0.0f64;
            for y in 0..=11u64 {
                let mut s = c(0.0, 0.0);
                for (i, am) in a.iter().enumerate() {
                    for (j, bn) in b.iter().enumerate() {
                        let mn = (m0 + i as u64) * (n0 + j as u64);
                        if mn <= y {
                            s += am * bn * chi(mn);
                        }
                    }
                }
                best = best.max(s.norm());
            }
            best
        };
        let expected = brute(&|_| 1.0) + 1.5 * brute(&chi3);
        assert!((t.lhs - expected).abs() < 1e-12);
    }

    #[test]
    fn trials_are_reproducible() {
        let limits = TrialLimits { max_q: 6, max_len: 40, max_start: 30 };
        let a = run_trials(TrialKind::Bilinear, 20, 7, limits).unwrap();
        let b = run_trials(TrialKind::Bilinear, 20, 7, limits).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(SieveTrial::holds));
    }
}
