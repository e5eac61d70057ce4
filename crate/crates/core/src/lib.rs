//! Computational companion to the weighted Vaughan identity and the
//! Bombieri–Vinogradov theorem.
//!
//! - [`arith`]: linear-sieve tables of Λ, μ, φ and smallest prime factors.
//! - [`dirichlet`]: character groups mod q with exact values, conductors,
//!   twisted Chebyshev sums and Pólya–Vinogradov maxima.
//! - [`vaughan`]: Graham's weight η, the weighted Vaughan identity, the
//!   s₀…s₃ decomposition of ψ(y, χ) and the parameter choice.
//! - [`sieve_weights`]: Barban–Vehov / Graham weight sums.
//! - [`large_sieve`]: randomized checks of the large-sieve inequalities.
//! - [`bv`]: ψ(y; q, a), maximal errors and averaged error sums.
//!
//! Scans over moduli use the ambient rayon pool and reduce in ascending
//! modulus order, so results do not depend on the number of threads.

pub mod arith;
pub mod bv;
pub mod dirichlet;
pub mod error;
pub mod large_sieve;
pub mod sieve_weights;
pub mod sum;
pub mod vaughan;

pub use arith::{build_factor_sieve, ArithmeticValues, FactorSieve};
pub use bv::{
    bv_aggregate, max_error, pi_aggregate, pi_progression, psi_progression, rhs_bounds, BVReport,
    Baseline, BoundSettings, ErrorRecord, RhsBounds,
};
pub use dirichlet::{character_group, CharValue, CharacterGroup, DirichletCharacter, RootOfUnity};
pub use error::{Error, Result};
pub use large_sieve::{
    bilinear_sieve_check, classical_large_sieve_check, SieveTrial, TrialKind, TrialLimits, C3,
};
pub use sieve_weights::{graham_corollary_ratio, graham_lemma_sum, WeightSumReport};
pub use vaughan::{
    choose_parameters, lambda_components, proposition_lhs, residual_check, s_decomposition,
    EtaWeight, LambdaComponents, Regime, SDecomposition, VaughanParams,
};
