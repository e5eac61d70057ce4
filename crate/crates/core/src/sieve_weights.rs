//! Barban–Vehov / Graham weight sums and their ratios to the main terms.

use crate::arith::FactorSieve;
use crate::error::{invalid, range, Result};
use crate::sum::Accumulator;
use crate::vaughan::EtaWeight;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSumReport {
    /// Length of the outer sum (`N` or `Y`).
    pub length: u64,
    /// `N₁` or `V`.
    pub lower: f64,
    /// `N₂` or `V₀`.
    pub upper: f64,
    pub sum_value: f64,
    pub reference_value: f64,
    /// `sum_value / reference_value`; `None` when the reference vanishes.
    pub ratio: Option<f64>,
}

impl WeightSumReport {
    fn new(length: u64, lower: f64, upper: f64, sum_value: f64, reference_value: f64) -> Self {
        let ratio = (reference_value > 0.0).then(|| sum_value / reference_value);
        Self { length, lower, upper, sum_value, reference_value, ratio }
    }

    /// `(sum − reference) / length`.
    pub fn normalized_deviation(&self) -> f64 {
        (self.sum_value - self.reference_value) / self.length as f64
    }
}

/// Adds `f(d)` to every multiple of `d ≤ len` for squarefree `d ≤ cutoff`.
fn divisor_accumulate(
    len: usize,
    cutoff: f64,
    sieve: &FactorSieve,
    f: impl Fn(usize) -> f64,
) -> Vec<Accumulator> {
    let mut g = vec![Accumulator::new(); len + 1];
    let top = (cutoff.floor() as usize).min(len);
    for d in 1..=top {
        if sieve.mu(d) == 0 {
            continue;
        }
        let v = f(d);
        if v == 0.0 {
            continue;
        }
        for m in (d..=len).step_by(d) {
            g[m].add(v);
        }
    }
    g
}

/// Σ_{n ≤ N} (Σ_{d₁|n} f₁(d₁))(Σ_{d₂|n} f₂(d₂)) with `f_i(d) = μ(d) log(N_i/d)`
/// for `d ≤ N_i`, against the main term `N log N₁`.
pub fn graham_lemma_sum(n: u64, n1: f64, n2: f64, sieve: &FactorSieve) -> Result<WeightSumReport> {
    if !(1.0 <= n1 && n1 <= n2 && n2 <= n as f64) {
        return invalid(format!("need 1 <= N1 <= N2 <= N, got N1 = {n1}, N2 = {n2}, N = {n}"));
    }
    if n > sieve.limit() {
        return range(format!("N = {n} exceeds sieve limit {}", sieve.limit()));
    }
    let len = n as usize;
    let f = |cut: f64| move |d: usize| sieve.mu(d) as f64 * (cut / d as f64).ln();
    let g1 = divisor_accumulate(len, n1, sieve, f(n1));
    let g2 = divisor_accumulate(len, n2, sieve, f(n2));
    let mut total = Accumulator::new();
    for k in 1..=len {
        total.add(g1[k].value() * g2[k].value());
    }
    Ok(WeightSumReport::new(n, n1, n2, total.value(), n as f64 * n1.ln()))
}

/// `g(k) = Σ_{d|k} μ(d) η(d)` for `1 ≤ k ≤ y` (index 0 unused).
pub fn eta_mobius_sums(y: u64, weight: &EtaWeight, sieve: &FactorSieve) -> Result<Vec<f64>> {
    if y > sieve.limit() {
        return range(format!("Y = {y} exceeds sieve limit {}", sieve.limit()));
    }
    let g = divisor_accumulate(y as usize, weight.v0(), sieve, |d| {
        sieve.mu(d) as f64 * weight.eta(d as f64)
    });
    Ok(g.iter().map(Accumulator::value).collect())
}

/// Σ_{k ≤ Y} |Σ_{d|k} μ(d) η(d)|² against `Y / log(V₀/V)`.
pub fn graham_corollary_ratio(y: u64, v: f64, v0: f64, sieve: &FactorSieve) -> Result<WeightSumReport> {
    let weight = EtaWeight::new(v, v0)?;
    if y < 1 {
        return invalid("Y must be at least 1");
    }
    let g = eta_mobius_sums(y, &weight, sieve)?;
    let mut total = Accumulator::new();
    for gk in &g[1..] {
        total.add(gk * gk);
    }
    Ok(WeightSumReport::new(y, v, v0, total.value(), y as f64 / (v0 / v).ln()))
}
