//! Verdicts on the class: spectral equivalence, positivity, the zero mode,
//! square integrability of the ground state, and polynomial eigenfunctions.

mod groundstate;
mod polynomial;
mod quadrature;
mod ratmat;
mod spectrum;
mod suite;

use thiserror::Error;

use crate::eig::EigError;
use crate::lattice::LatticeError;
use crate::opalg::DeriveError;

pub use groundstate::{
    ground_state_closed_form, ground_state_exponent, integrability_classifier, normalization_closed_form,
    normalization_constant, printed_exponent, tail_diagnostics, verify_zero_mode, verify_zero_mode_with,
    GroundState, Integrability, TailDiagnostics, TailKind, ZeroModeReport,
};
pub use polynomial::{hermite_recurrence_holds, polynomial_eigenfunctions, simple_rational, PolyEigenpair};
pub use quadrature::{simpson, simpson_adaptive};
pub use spectrum::{
    e0_convergence, positivity_decomposition, positivity_decomposition_for, spectrum_compare, E0Estimate,
    PositivityTerms, SpectrumOptions, SpectrumReport,
};
pub use suite::{run_suite, CheckResult, SuiteOptions, SuiteSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Eig(#[from] EigError),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error("coupling must be positive (got g = {g})")]
    Domain { g: f64 },
    #[error("no closed-form ground state for epsilon = {epsilon}: the exponent contains ln(x)")]
    UndefinedExponent { epsilon: i32 },
    #[error("ground state for epsilon = {epsilon} is not normalizable")]
    NotNormalizable { epsilon: i32 },
    #[error("quadrature did not reach relative tolerance {tolerance:e} (last change {change:e})")]
    Quadrature { tolerance: f64, change: f64 },
    #[error("vector is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("asked for {k} levels on a grid of {n} points; at most N/4 are resolved")]
    TooManyLevels { k: usize, n: usize },
    #[error("epsilon = {epsilon} is outside the supported range {supported}")]
    UnsupportedEpsilon { epsilon: i32, supported: &'static str },
}
