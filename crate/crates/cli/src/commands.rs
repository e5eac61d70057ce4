//! One function per subcommand, each producing a table and summary lines.

use std::time::Instant;

use bvsieve::dirichlet::{primitive_count, DEFAULT_MAX_MODULUS};
use bvsieve::large_sieve::run_trials;
use bvsieve::sum::ComplexAccumulator;
use bvsieve::{
    bv_aggregate, character_group, graham_corollary_ratio, graham_lemma_sum, lambda_components,
    residual_check, BoundSettings, EtaWeight, FactorSieve, TrialKind, TrialLimits,
};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{GrahamMode, QRule, SieveKind, Task};
use crate::error::CliResult;
use crate::output::{format_float as g, Table};

/// Weighted-identity parameter sets `(U = V, V₀)`.
pub const VAUGHAN_SETS: [(f64, f64); 3] = [(20.0, 400.0), (50.0, 2500.0), (7.0, 49.0)];
pub const IDENTITY_TOLERANCE: f64 = 1e-8;
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

pub struct Outcome {
    pub table: Table,
    pub summary: Vec<String>,
    /// Description of the first failed check, if any.
    pub violation: Option<String>,
}

pub fn execute(task: &Task, seed: u64, epsilon: f64, timing: bool) -> CliResult<Outcome> {
    match task {
        Task::VaughanVerify { n_max } => vaughan_verify(*n_max),
        Task::Characters { q_max } => characters(*q_max),
        Task::LargeSieve { trials, kind, q_max, max_len, max_start } => {
            large_sieve(*trials, *kind, seed, *q_max, *max_len, *max_start)
        }
        Task::Graham { mode, lengths } => graham(*mode, lengths),
        Task::Scan { x_list, q_rule, q1, baseline, bound_exponent } => {
            let settings = BoundSettings { a: *bound_exponent, epsilon };
            scan(x_list, *q_rule, *q1, *baseline, settings, timing)
        }
    }
}

/// Larger value wins; ties go to the smaller index, so the result does not
/// depend on how the parallel reduction is split.
fn worst(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn vaughan_verify(n_max: u64) -> CliResult<Outcome> {
    if n_max < 2 {
        return Err(crate::error::CliError::Usage("n-max must be at least 2".into()));
    }
    let sieve = FactorSieve::new(n_max)?;
    let mut table = Table::new(&[
        "u", "v", "v0", "n_max", "max_identity_error", "worst_identity_n", "max_residual",
        "worst_residual_n", "passed",
    ]);
    let mut summary = Vec::new();
    let mut violation = None;
    for (v, v0) in VAUGHAN_SETS {
        let weight = EtaWeight::new(v, v0)?;
        let scored = (2..=n_max)
            .into_par_iter()
            .map(|n| -> bvsieve::Result<((f64, u64), (f64, u64))> {
                let c = lambda_components(n, v, &weight, &sieve)?;
                let id = (sieve.lambda(n as usize) - c.total()).abs() / (n as f64).ln().max(1.0);
                let res = residual_check(n, v, &weight, &sieve)?.abs() / ((n + 2) as f64).ln();
                Ok(((id, n), (res, n)))
            })
            .try_reduce(
                || ((0.0, 0), (0.0, 0)),
                |a, b| Ok((worst(a.0, b.0), worst(a.1, b.1))),
            )?;
        let ((id, id_n), (res, res_n)) = scored;
        let passed = id <= IDENTITY_TOLERANCE && res <= RESIDUAL_TOLERANCE;
        if !passed && violation.is_none() {
            violation = Some(format!("identity check failed for U = V = {v}, V0 = {v0}"));
        }
        summary.push(format!(
            "U=V={} V0={} n<={n_max}: identity {} (n={id_n}), residual {} (n={res_n}) {}",
            g(v),
            g(v0),
            g(id),
            g(res),
            if passed { "ok" } else { "FAILED" }
        ));
        table.push(vec![
            v.into(), v.into(), v0.into(), n_max.into(), id.into(), id_n.into(), res.into(),
            res_n.into(), passed.into(),
        ]);
    }
    Ok(Outcome { table, summary, violation })
}

/// Smallest `d | q` such that χ is 1 on every unit `≡ 1 (mod d)`.
fn scanned_conductor(q: u64, values: &[Complex64]) -> u64 {
    let trivial = |n: u64| {
        let z = values[(n % q) as usize];
        z.norm() < 0.5 || (z - 1.0).norm() < 1e-9
    };
    (1..=q)
        .filter(|d| q % d == 0)
        .find(|&d| (1..q.max(2)).step_by(d as usize).all(trivial))
        .unwrap_or(q)
}

struct CharacterRow {
    phi: u64,
    primitive: u64,
    expected: u64,
    orthogonality: f64,
    conductor_mismatches: u64,
    pv_ratio: Option<f64>,
}

fn check_modulus(q: u64) -> CliResult<CharacterRow> {
    let group = character_group(q)?;
    let phi = group.order();
    let chars: Vec<_> = group.characters().collect();
    let tables: Vec<_> = chars.iter().map(|c| c.table()).collect();
    let mut orthogonality = 0.0f64;
    for (chi, t) in chars.iter().zip(&tables) {
        let mut s = ComplexAccumulator::new();
        t.values().iter().for_each(|&z| s.add(z));
        let want = if chi.is_principal() { phi as f64 } else { 0.0 };
        orthogonality = orthogonality.max((s.value() - want).norm());
    }
    for n in 0..q {
        let mut s = ComplexAccumulator::new();
        tables.iter().for_each(|t| s.add(t.value(n)));
        let want = if n % q == 1 % q { phi as f64 } else { 0.0 };
        orthogonality = orthogonality.max((s.value() - want).norm());
    }
    let mut primitive = 0;
    let mut conductor_mismatches = 0;
    let mut pv_ratio: Option<f64> = None;
    for (chi, t) in chars.iter().zip(&tables) {
        if scanned_conductor(q, t.values()) != chi.conductor() {
            conductor_mismatches += 1;
        }
        if chi.is_primitive() {
            primitive += 1;
            if q >= 3 {
                let r = chi.polya_vinogradov_max()? / ((q as f64).sqrt() * (q as f64).ln());
                pv_ratio = Some(pv_ratio.map_or(r, |b| b.max(r)));
            }
        }
    }
    Ok(CharacterRow { phi, primitive, expected: primitive_count(q), orthogonality, conductor_mismatches, pv_ratio })
}

fn characters(q_max: u64) -> CliResult<Outcome> {
    if q_max < 1 {
        return Err(crate::error::CliError::Usage("q-max must be at least 1".into()));
    }
    if q_max > DEFAULT_MAX_MODULUS {
        return Err(crate::error::CliError::Resource(format!(
            "q-max = {q_max} exceeds the character-group limit {DEFAULT_MAX_MODULUS}"
        )));
    }
    let rows: Vec<CharacterRow> = (1..=q_max).into_par_iter().map(check_modulus).collect::<CliResult<_>>()?;
    let mut table = Table::new(&[
        "q", "phi", "primitive", "primitive_expected", "orthogonality_error",
        "conductor_mismatches", "pv_ratio", "passed",
    ]);
    let mut failures = Vec::new();
    let mut pv_max = 0.0f64;
    for (q, r) in (1..=q_max).zip(&rows) {
        let passed = r.primitive == r.expected
            && r.orthogonality < ORTHOGONALITY_TOLERANCE
            && r.conductor_mismatches == 0
            && r.pv_ratio.is_none_or(|p| p < 1.0);
        if !passed {
            failures.push(q);
        }
        pv_max = pv_max.max(r.pv_ratio.unwrap_or(0.0));
        table.push(vec![
            q.into(), r.phi.into(), r.primitive.into(), r.expected.into(), r.orthogonality.into(),
            r.conductor_mismatches.into(), r.pv_ratio.into(), passed.into(),
        ]);
    }
    let summary = vec![format!(
        "q<={q_max}: {} moduli failed; largest Pólya–Vinogradov ratio {}",
        failures.len(),
        g(pv_max)
    )];
    let violation = failures.first().map(|q| format!("character checks failed for q = {q}"));
    Ok(Outcome { table, summary, violation })
}

fn large_sieve(
    trials: u64,
    kind: SieveKind,
    seed: u64,
    q_max: Option<u64>,
    max_len: Option<u64>,
    max_start: Option<u64>,
) -> CliResult<Outcome> {
    let kinds: &[TrialKind] = match kind {
        SieveKind::Classical => &[TrialKind::Classical],
        SieveKind::Bilinear => &[TrialKind::Bilinear],
        SieveKind::Both => &[TrialKind::Classical, TrialKind::Bilinear],
    };
    let mut table = Table::new(&[
        "trial", "kind", "seed", "Q", "m_start", "m_len", "n_start", "n_len", "lhs", "rhs", "margin",
    ]);
    let mut summary = Vec::new();
    let mut violation = None;
    for &k in kinds {
        let base = match k {
            TrialKind::Classical => TrialLimits::CLASSICAL,
            TrialKind::Bilinear => TrialLimits::BILINEAR,
        };
        let limits = TrialLimits {
            max_q: q_max.unwrap_or(base.max_q),
            max_len: max_len.map_or(base.max_len, |v| v as usize),
            max_start: max_start.unwrap_or(base.max_start),
        };
        let name = match k {
            TrialKind::Classical => "classical",
            TrialKind::Bilinear => "bilinear",
        };
        let results = run_trials(k, trials as usize, seed, limits)?;
        let failed = results.iter().filter(|t| !t.holds()).count();
        let min_margin = results.iter().map(|t| t.margin / t.rhs.max(f64::MIN_POSITIVE)).fold(f64::INFINITY, f64::min);
        if failed > 0 && violation.is_none() {
            violation = Some(format!("{failed} {name} large-sieve trials violated the inequality"));
        }
        summary.push(format!(
            "{name}: {} trials, {failed} violations, smallest relative margin {}",
            results.len(),
            g(min_margin)
        ));
        for (i, t) in results.iter().enumerate() {
            let bilinear = k == TrialKind::Bilinear;
            table.push(vec![
                (i as u64).into(),
                name.into(),
                seed.wrapping_add(i as u64).into(),
                t.q_max.into(),
                t.m_start.into(),
                t.m_len.into(),
                bilinear.then_some(t.n_start).into(),
                bilinear.then_some(t.n_len).into(),
                t.lhs.into(),
                t.rhs.into(),
                t.margin.into(),
            ]);
        }
    }
    Ok(Outcome { table, summary, violation })
}

pub const LEMMA_LENGTHS: [u64; 3] = [1_000, 10_000, 100_000];
pub const COROLLARY_LENGTHS: [u64; 3] = [10_000, 100_000, 1_000_000];

fn graham(mode: GrahamMode, lengths: &[u64]) -> CliResult<Outcome> {
    let lemma_lengths = if lengths.is_empty() { &LEMMA_LENGTHS[..] } else { lengths };
    let corollary_lengths = if lengths.is_empty() { &COROLLARY_LENGTHS[..] } else { lengths };
    let mut jobs: Vec<(&str, u64)> = Vec::new();
    if mode != GrahamMode::Corollary {
        jobs.extend(lemma_lengths.iter().map(|&n| ("lemma", n)));
    }
    if mode != GrahamMode::Lemma {
        jobs.extend(corollary_lengths.iter().map(|&n| ("corollary", n)));
    }
    let top = jobs.iter().map(|j| j.1).max().unwrap_or(1).max(1);
    let sieve = FactorSieve::new(top)?;
    let mut table = Table::new(&[
        "kind", "length", "lower", "upper", "sum", "reference", "ratio", "normalized_deviation",
    ]);
    let mut summary = Vec::new();
    for (kind, len) in jobs {
        let l = len as f64;
        let report = if kind == "lemma" {
            let cut = l.powf(1.0 / 3.0);
            graham_lemma_sum(len, cut, cut, &sieve)?
        } else {
            graham_corollary_ratio(len, l.powf(1.0 / 7.0), l.powf(2.0 / 7.0), &sieve)?
        };
        summary.push(format!(
            "{kind} length={len}: sum {} reference {} ratio {} deviation/length {}",
            g(report.sum_value),
            g(report.reference_value),
            report.ratio.map_or_else(|| "-".into(), g),
            g(report.normalized_deviation())
        ));
        table.push(vec![
            kind.into(),
            len.into(),
            report.lower.into(),
            report.upper.into(),
            report.sum_value.into(),
            report.reference_value.into(),
            report.ratio.into(),
            report.normalized_deviation().into(),
        ]);
    }
    Ok(Outcome { table, summary, violation: None })
}

pub const SCAN_COLUMNS: [&str; 9] =
    ["x", "Q", "Q1", "baseline", "lhs", "rhs_theorem1", "rhs_corollary", "ratio", "wall_time_ms"];

fn scan(
    x_list: &[f64],
    q_rule: QRule,
    q1: f64,
    baseline: bvsieve::Baseline,
    settings: BoundSettings,
    timing: bool,
) -> CliResult<Outcome> {
    let top = x_list.iter().copied().fold(4.0, f64::max).floor() as u64;
    let sieve = FactorSieve::new(top)?;
    let mut table = Table::new(&SCAN_COLUMNS);
    let mut summary = Vec::new();
    for &x in x_list {
        let q = q_rule.modulus_bound(x);
        let start = Instant::now();
        let report = bv_aggregate(x, q, q1, baseline, settings, &sieve)?;
        let ms = start.elapsed().as_millis() as u64;
        let rhs_corollary = match baseline {
            bvsieve::Baseline::PiLiStyle => report.bounds.prime_count,
            _ => report.bounds.sifted,
        };
        summary.push(format!(
            "x={} Q={} Q1={} {}: {} moduli, lhs {} ratio {} ({ms} ms)",
            g(x),
            g(q),
            g(q1),
            baseline.name(),
            report.records.len(),
            g(report.lhs_sum),
            g(report.ratio)
        ));
        table.push(vec![
            x.into(),
            q.into(),
            q1.into(),
            baseline.name().into(),
            report.lhs_sum.into(),
            report.bounds.log_power.into(),
            rhs_corollary.into(),
            report.ratio.into(),
            timing.then_some(ms).into(),
        ]);
    }
    Ok(Outcome { table, summary, violation: None })
}
