//! Eigensolvers for the two matrix shapes the lattice produces.
//!
//! Symmetric tridiagonals go through implicit QL with a Wilkinson shift, with
//! Sturm bisection as an independent second route. General tridiagonals go
//! through Francis double-shift QR; when every `sub_i * super_i > 0` the matrix
//! is first balanced by the exact diagonal similarity, after which a banded
//! Francis sweep costs O(N) instead of O(N^2).

mod francis;
mod inverse;
mod ql;
mod sturm;

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{SymTridiagonal, TridiagonalMatrix};

pub use francis::{eig_general_dense, eig_hessenberg_dense, eig_upper_hessenberg};
pub use inverse::{eigenvector_inverse_iteration, InverseIteration};
pub use ql::{eig_sym_tridiag, eig_sym_tridiag_with, QlOptions};
pub use sturm::{bisect_eigenvalue, bisect_range, sturm_count};

/// Maximum QR/QL sweeps spent on a single eigenvalue.
pub const MAX_SWEEPS: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigError {
    #[error("no convergence for eigenvalue {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },
    #[error("inverse iteration broke down at shift {shift}: shifted matrix singular after {retries} retries")]
    Breakdown { shift: f64, retries: usize },
    #[error("inverse iteration residual {residual:.3e} above tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("matrix is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    /// Sorted by real part, ties broken by ascending imaginary part.
    pub values: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

impl EigenResult {
    pub(crate) fn from_unsorted(mut values: Vec<Complex64>, iterations: usize) -> Self {
        sort_spectrum(&mut values);
        Self { values, iterations, converged: true }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| match a.re.total_cmp(&b.re) {
        Ordering::Equal => a.im.total_cmp(&b.im),
        other => other,
    });
}

/// Why a tridiagonal could not be symmetrized by a real diagonal similarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inapplicable {
    pub index: usize,
    pub product: f64,
}

/// The symmetric tridiagonal `D M D^-1` when every `sub_i * super_i > 0`.
///
/// The off-diagonal keeps the sign of the original pair, so symmetric input
/// comes back unchanged.
pub fn symmetrize_if_possible(m: &TridiagonalMatrix) -> Result<SymTridiagonal, Inapplicable> {
    let mut off = Vec::with_capacity(m.sub.len());
    for (index, (&lo, &hi)) in m.sub.iter().zip(&m.sup).enumerate() {
        let product = lo * hi;
        if !(product > 0.0) {
            return Err(Inapplicable { index, product });
        }
        off.push(if lo == hi { lo } else { lo.signum() * product.sqrt() });
    }
    Ok(SymTridiagonal::new(m.diag.clone(), off))
}

/// All eigenvalues of a real tridiagonal (hence upper Hessenberg) matrix.
///
/// Symmetrizable input is balanced first and solved with banded Francis QR.
/// Anything else falls back to dense Francis QR, which is O(N^3).
pub fn eig_hessenberg(m: &TridiagonalMatrix) -> Result<EigenResult, EigError> {
    if m.is_empty() {
        return Err(EigError::Empty);
    }
    match symmetrize_if_possible(m) {
        Ok(s) => francis::eig_banded(&s.as_general()),
        Err(_) => eig_hessenberg_dense(m),
    }
}
