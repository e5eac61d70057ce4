//! The weighted Vaughan identity with a logarithmic truncation weight.
//!
//! For parameters `U, V < V₀` and the weight
//!
//! ```text
//! η(t) = 1                          t ≤ V
//!        log(V₀/t) / log(V₀/V)      V < t ≤ V₀
//!        0                          t > V₀
//! ```
//!
//! the von Mangoldt function splits as `Λ = λ₀ + λ₁ + λ₂ + λ₃` with
//!
//! ```text
//! λ₀(n) = Λ(n)·[n ≤ U]
//! λ₁(n) = Σ_{d|n} μ(d) η(d) log(n/d)
//! λ₂(n) = −Σ_{c ≤ U} Σ_{dc|n} μ(d) Λ(c) η(d)
//! λ₃(n) = Σ_{c > U} Σ_{dc|n} μ(d) Λ(c) (1 − η(d))
//! ```
//!
//! Twisting by a character and summing over `n ≤ y` gives the pieces
//! `s₀, s₁, s₂′, s₂″, s₃` of ψ(y, χ), where `λ₂` is split at `c = w`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::FactorSieve;
use crate::dirichlet::{CharacterGroup, DirichletCharacter};
use crate::error::{invalid, range, Error, Result};
use crate::sum::{compensated_sum, Accumulator, ComplexAccumulator};

/// Default ε in the parameter choice.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Default cap on character-times-prime-power steps in [`proposition_lhs`].
pub const DEFAULT_OPERATION_BUDGET: u64 = 5_000_000_000;

/// Graham's piecewise-logarithmic truncation weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaWeight {
    v: f64,
    v0: f64,
    log_ratio: f64,
}

impl EtaWeight {
    pub fn new(v: f64, v0: f64) -> Result<Self> {
        if !(v >= 1.0) || !v.is_finite() {
            return invalid(format!("V must be a finite real >= 1, got {v}"));
        }
        if !(v0 > v) || !v0.is_finite() {
            return invalid(format!("V0 must exceed V = {v}, got {v0}"));
        }
        Ok(Self { v, v0, log_ratio: (v0 / v).ln() })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    #[inline]
    pub fn eta(&self, t: f64) -> f64 {
        if t <= self.v {
            1.0
        } else if t > self.v0 {
            0.0
        } else {
            (self.v0 / t).ln() / self.log_ratio
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `x^{3/7+ε} ≤ Q`
    LargeQ,
    /// `Q < x^{3/7+ε}`
    SmallQ,
}

/// Parameters of the decomposition, with `U = V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaughanParams {
    u: f64,
    weight: EtaWeight,
    w: f64,
    epsilon: f64,
    regime: Regime,
}

impl VaughanParams {
    pub fn new(v: f64, v0: f64, w: f64, epsilon: f64, regime: Regime) -> Result<Self> {
        check_epsilon(epsilon)?;
        let weight = EtaWeight::new(v, v0)?;
        if !(w >= 1.0 && w < v) {
            return invalid(format!("w must satisfy 1 <= w < U = {v}, got {w}"));
        }
        Ok(Self { u: v, weight, w, epsilon, regime })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.weight.v
    }

    pub fn v0(&self) -> f64 {
        self.weight.v0
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn weight(&self) -> EtaWeight {
        self.weight
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 14.0) {
        return invalid(format!("epsilon must lie in (0, 1/14), got {epsilon}"));
    }
    Ok(())
}

/// Picks `U = V`, `V₀`, `w` for the given `x`, `Q` and `ε`.
///
/// With `α = 3/7 + ε`: if `Q ≥ x^α`, `V = x^{4/7}/Q`, `V₀ = x^{4/7+5ε/2}/Q`,
/// `w = x^{4/7−ε}/Q`; otherwise `V = x^{1/7}`, `V₀ = x^{1/7+ε/2}`,
/// `w = x^{1/7−ε}`. Values are clamped below by 1.
pub fn choose_parameters(x: f64, q: f64, epsilon: f64) -> Result<VaughanParams> {
    check_epsilon(epsilon)?;
    if !(x >= 4.0) || !x.is_finite() {
        return invalid(format!("x must be >= 4, got {x}"));
    }
    if !(q >= 2.0) || !q.is_finite() {
        return invalid(format!("Q must be >= 2, got {q}"));
    }
    let alpha = 3.0 / 7.0 + epsilon;
    let (regime, v, v0, w) = if q >= x.powf(alpha) {
        let b = 4.0 / 7.0;
        (
            Regime::LargeQ,
            x.powf(b) / q,
            x.powf(b + 2.5 * epsilon) / q,
            x.powf(b - epsilon) / q,
        )
    } else {
        let b = 1.0 / 7.0;
        (Regime::SmallQ, x.powf(b), x.powf(b + 0.5 * epsilon), x.powf(b - epsilon))
    };
    let (v, v0, w) = (v.max(1.0), v0.max(1.0), w.max(1.0));
    if !(w < v && v < v0) {
        return invalid(format!(
            "degenerate parameters for x = {x}, Q = {q}: w = {w}, U = V = {v}, V0 = {v0}"
        ));
    }
    VaughanParams::new(v, v0, w, epsilon, regime)
}

/// λ₀ … λ₃ at a single `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaComponents {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl LambdaComponents {
    pub fn total(&self) -> f64 {
        compensated_sum([self.lambda0, self.lambda1, self.lambda2, self.lambda3])
    }
}

/// The five pieces used by the character-sum decomposition at one `n`:
/// λ₀, λ₁, the `c ≤ w` and `w < c ≤ U` parts of λ₂, and λ₃.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct SplitComponents {
    l0: f64,
    l1: f64,
    l2_small: f64,
    l2_large: f64,
    l3: f64,
}

fn check_n(n: u64, sieve: &FactorSieve) -> Result<usize> {
    if n < 2 || n > sieve.limit() {
        return range(format!("n = {n} outside [2, {}]", sieve.limit()));
    }
    Ok(n as usize)
}

/// Squarefree divisors of `n` with their Möbius sign, given `n`'s factorization.
fn squarefree_divisors(factors: &[(u32, u32)]) -> Vec<(usize, i8)> {
    let mut out = vec![(1usize, 1i8)];
    for &(p, _) in factors {
        let len = out.len();
        for i in 0..len {
            let (d, s) = out[i];
            out.push((d * p as usize, -s));
        }
    }
    out
}

fn split_components(
    n: usize,
    u: f64,
    w: f64,
    weight: &EtaWeight,
    sieve: &FactorSieve,
) -> SplitComponents {
    let factors = sieve.factorize(n);
    let mut l1 = Accumulator::new();
    let mut l2_small = Accumulator::new();
    let mut l2_large = Accumulator::new();
    let mut l3 = Accumulator::new();

    for (d, mu) in squarefree_divisors(&factors) {
        let eta = weight.eta(d as f64);
        let mu = mu as f64;
        let m = n / d;
        if eta != 0.0 {
            l1.add(mu * eta * (m as f64).ln());
        }
        // Prime-power divisors c = p^j of m = n/d, j = 1..v_p(m).
        let mut small = Accumulator::new();
        let mut large = Accumulator::new();
        let mut above_u = Accumulator::new();
        for &(p, e) in &factors {
            let k = if d % p as usize == 0 { e - 1 } else { e };
            let log_p = (p as f64).ln();
            let mut c = 1f64;
            for _ in 0..k {
                c *= p as f64;
                if c <= w {
                    small.add(log_p);
                } else if c <= u {
                    large.add(log_p);
                } else {
                    above_u.add(log_p);
                }
            }
        }
        if eta != 0.0 {
            l2_small.add(-mu * eta * small.value());
            l2_large.add(-mu * eta * large.value());
        }
        if eta != 1.0 {
            l3.add(mu * (1.0 - eta) * above_u.value());
        }
    }

    let l0 = if n as f64 <= u { sieve.lambda(n) } else { 0.0 };
    SplitComponents {
        l0,
        l1: l1.value(),
        l2_small: l2_small.value(),
        l2_large: l2_large.value(),
        l3: l3.value(),
    }
}

/// λ₀(n), …, λ₃(n) for `2 ≤ n ≤ limit`.
pub fn lambda_components(
    n: u64,
    u: f64,
    weight: &EtaWeight,
    sieve: &FactorSieve,
) -> Result<LambdaComponents> {
    let n = check_n(n, sieve)?;
    let s = split_components(n, u, u, weight, sieve);
    Ok(LambdaComponents {
        lambda0: s.l0,
        lambda1: s.l1,
        lambda2: s.l2_small + s.l2_large,
        lambda3: s.l3,
    })
}

/// λ₁′(n) + λ₂′(n) + λ₃′(n), each evaluated straight from its definition
/// as a sum over divisors `d > V`:
///
/// ```text
/// λ₁′ = −Σ_{d|n, d>V} μ(d) η(d) log(n/d)
/// λ₂′ =  Σ_{c ≤ U} Σ_{dc|n, d>V} μ(d) Λ(c) η(d)
/// λ₃′ =  Σ_{c > U} Σ_{dc|n, d>V} μ(d) Λ(c) η(d)
/// ```
pub fn residual_check(n: u64, u: f64, weight: &EtaWeight, sieve: &FactorSieve) -> Result<f64> {
    let n = check_n(n, sieve)?;
    let mut l1 = Accumulator::new();
    let mut l2 = Accumulator::new();
    let mut l3 = Accumulator::new();
    for d in sieve.divisors(n) {
        if d as f64 <= weight.v() {
            continue;
        }
        let mu = sieve.mu(d) as f64;
        if mu == 0.0 {
            continue;
        }
        let eta = weight.eta(d as f64);
        l1.add(-mu * eta * ((n / d) as f64).ln());
        for c in sieve.divisors(n / d) {
            let lam = sieve.lambda(c);
            if lam == 0.0 {
                continue;
            }
            if c as f64 <= u {
                l2.add(mu * lam * eta);
            } else {
                l3.add(mu * lam * eta);
            }
        }
    }
    Ok(compensated_sum([l1.value(), l2.value(), l3.value()]))
}

/// Classical Vaughan pieces with a sharp cutoff at `d ≤ V`:
///
/// ```text
/// Λ₁(n) =  Σ_{d|n, d ≤ V} μ(d) log(n/d)
/// Λ₂(n) = −Σ_{c ≤ U} Σ_{dc|n, d ≤ V} μ(d) Λ(c)
/// Λ₃(n) =  Σ_{c > U} Σ_{dc|n, d > V} μ(d) Λ(c)
/// ```
pub fn classical_components(n: u64, u: f64, v: f64, sieve: &FactorSieve) -> Result<[f64; 3]> {
    let n = check_n(n, sieve)?;
    let mut l1 = Accumulator::new();
    let mut l2 = Accumulator::new();
    let mut l3 = Accumulator::new();
    for d in sieve.divisors(n) {
        let mu = sieve.mu(d) as f64;
        if mu == 0.0 {
            continue;
        }
        let small_d = d as f64 <= v;
        if small_d {
            l1.add(mu * ((n / d) as f64).ln());
        }
        for c in sieve.divisors(n / d) {
            let lam = sieve.lambda(c);
            if lam == 0.0 {
                continue;
            }
            let small_c = c as f64 <= u;
            if small_c && small_d {
                l2.add(-mu * lam);
            } else if !small_c && !small_d {
                l3.add(mu * lam);
            }
        }
    }
    Ok([l1.value(), l2.value(), l3.value()])
}

/// The pieces of ψ(y, χ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SDecomposition {
    pub s0: Complex64,
    pub s1: Complex64,
    /// `c ≤ w` part of s₂.
    pub s2_small: Complex64,
    /// `w < c ≤ U` part of s₂.
    pub s2_large: Complex64,
    pub s3: Complex64,
}

impl SDecomposition {
    pub fn total(&self) -> Complex64 {
        let mut acc = ComplexAccumulator::new();
        for z in [self.s0, self.s1, self.s2_small, self.s2_large, self.s3] {
            acc.add(z);
        }
        acc.value()
    }
}

/// λ-pieces for every `n ≤ top`, reusable across characters.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    params: VaughanParams,
    top: f64,
    rows: Vec<SplitComponents>,
}

impl LambdaTable {
    pub fn build(y_max: f64, params: &VaughanParams, sieve: &FactorSieve) -> Result<Self> {
        let top = sieve.floor_index(y_max)?;
        let weight = params.weight();
        let rows = (0..=top)
            .map(|n| {
                if n < 2 {
                    SplitComponents::default()
                } else {
                    split_components(n, params.u, params.w, &weight, sieve)
                }
            })
            .collect();
        Ok(Self { params: *params, top: y_max, rows })
    }

    pub fn params(&self) -> &VaughanParams {
        &self.params
    }

    /// Largest `y` the table covers.
    pub fn top(&self) -> f64 {
        self.top
    }

    /// `s_i = Σ_{n ≤ y} λ_i(n) χ(n)` for `y` up to the table's top.
    pub fn decompose(&self, chi: &DirichletCharacter<'_>, y: f64) -> Result<SDecomposition> {
        if !(y >= 0.0) || y > self.top() {
            return range(format!("y = {y} outside [0, {}]", self.top()));
        }
        let top = y.floor() as usize;
        let roots = root_table(chi.group());
        let mut acc = [ComplexAccumulator::new(); 5];
        for n in 2..=top {
            let Some(k) = chi.exponent_at(n as u64) else { continue };
            let z = roots[k as usize];
            let r = &self.rows[n];
            for (a, v) in acc.iter_mut().zip([r.l0, r.l1, r.l2_small, r.l2_large, r.l3]) {
                if v != 0.0 {
                    a.add(z * v);
                }
            }
        }
        Ok(SDecomposition {
            s0: acc[0].value(),
            s1: acc[1].value(),
            s2_small: acc[2].value(),
            s2_large: acc[3].value(),
            s3: acc[4].value(),
        })
    }
}

fn root_table(group: &CharacterGroup) -> Vec<Complex64> {
    let l = group.exponent();
    (0..l)
        .map(|k| crate::dirichlet::RootOfUnity::new(k, l).to_complex())
        .collect()
}

/// s₀, s₁, s₂′, s₂″, s₃ for ψ(y, χ).
pub fn s_decomposition(
    chi: &DirichletCharacter<'_>,
    y: f64,
    params: &VaughanParams,
    sieve: &FactorSieve,
) -> Result<SDecomposition> {
    LambdaTable::build(y, params, sieve)?.decompose(chi, y)
}

/// Σ_{q ≤ Q} (q/φ(q)) Σ*_{χ mod q} max_{y ≤ x} |ψ(y, χ)| with the default budget.
pub fn proposition_lhs(q_max: f64, x: f64, sieve: &FactorSieve) -> Result<f64> {
    proposition_lhs_with_budget(q_max, x, sieve, DEFAULT_OPERATION_BUDGET)
}

/// As [`proposition_lhs`], refusing work beyond `budget` character-steps.
///
/// The maximum over `y` is taken at the prime powers `≤ x`, where ψ(·, χ)
/// jumps; it is constant in between. Moduli are processed in parallel on
/// the current rayon pool and reduced in ascending order.
pub fn proposition_lhs_with_budget(
    q_max: f64,
    x: f64,
    sieve: &FactorSieve,
    budget: u64,
) -> Result<f64> {
    if !(q_max >= 1.0) || !q_max.is_finite() {
        return invalid(format!("Q must be >= 1, got {q_max}"));
    }
    let top = sieve.floor_index(x)?;
    let qs = q_max.floor() as u64;
    let powers: Vec<(u64, f64)> =
        sieve.prime_powers(top).map(|n| (n as u64, sieve.lambda(n))).collect();
    let chars: u64 = (1..=qs).map(crate::dirichlet::primitive_count).sum();
    let work = chars.saturating_mul(powers.len() as u64);
    if work > budget {
        return Err(Error::Resource(format!(
            "{chars} primitive characters × {} prime powers exceeds budget {budget}",
            powers.len()
        )));
    }

    let per_q: Vec<f64> = (1..=qs)
        .into_par_iter()
        .map(|q| -> Result<f64> {
            let group = CharacterGroup::new(q)?;
            let roots = root_table(&group);
            let mut sum = Accumulator::new();
            for chi in group.primitive_characters() {
                let mut psi = ComplexAccumulator::new();
                let mut best = 0.0f64;
                for &(n, lam) in &powers {
                    if let Some(k) = chi.exponent_at(n) {
                        psi.add(roots[k as usize] * lam);
                        best = best.max(psi.value().norm());
                    }
                }
                sum.add(best);
            }
            Ok(q as f64 / group.order() as f64 * sum.value())
        })
        .collect::<Result<_>>()?;
    Ok(compensated_sum(per_q))
}
