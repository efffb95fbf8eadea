use std::io::Write;

use serde::Serialize;

use super::AnalysisError;
use crate::eig::{
    bisect_eigenvalue, eig_hessenberg, eig_sym_tridiag, eigenvector_inverse_iteration, symmetrize_if_possible,
};
use crate::lattice::{discretize_hermitian, discretize_hermitian_for, discretize_nonhermitian, Grid, LatticeError};
use crate::opalg::Variant;

/// The three pieces of `<phi|h|phi>` for the plain class:
/// `||p phi||^2 + ||W' phi||^2 - 2 Im<W' phi | p phi>` with `W' = g x^eps / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityTerms {
    pub kinetic: f64,
    pub potential: f64,
    pub cross: f64,
    pub total: f64,
}

pub fn positivity_decomposition(phi: &[f64], epsilon: i32, g: f64, grid: &Grid) -> Result<PositivityTerms, AnalysisError> {
    positivity_decomposition_for(phi, epsilon, g, grid, Variant::Plain)
}

/// Discrete decomposition on a unit vector, closing on the lattice `h`.
///
/// The kinetic term uses forward differences with zero walls, which is exactly
/// the quadratic form of the second-difference stencil. The cross term lives on
/// the half-integer points, where summation by parts turns it into
/// `-sum phi_i^2 (s_(i+1/2) - s_(i-1/2)) / Δ`. With
/// `s = W'(x) - (Δ^2/24) W'''(x)` that difference reproduces `W''(x_i)` with no
/// O(Δ^2) error for `eps <= 3`, so `total` equals the Rayleigh quotient to
/// roundoff. The symmetrized class has no cross term.
pub fn positivity_decomposition_for(
    phi: &[f64],
    epsilon: i32,
    g: f64,
    grid: &Grid,
    variant: Variant,
) -> Result<PositivityTerms, AnalysisError> {
    let n = grid.len();
    assert_eq!(phi.len(), n, "vector length must match the grid");
    let norm_sq: f64 = phi.iter().map(|v| v * v).sum();
    if (norm_sq - 1.0).abs() > 1e-8 {
        return Err(AnalysisError::NotNormalized { norm_sq });
    }
    let x = grid.nodes();
    let d = grid.spacing();
    let e = epsilon as f64;
    let w1 = |x: f64| 0.5 * g * x.powi(epsilon);
    let w3 = |x: f64| if epsilon == 0 || epsilon == 1 { 0.0 } else { 0.5 * g * e * (e - 1.0) * x.powi(epsilon - 2) };
    let at = |i: isize| if i < 0 || i >= n as isize { 0.0 } else { phi[i as usize] };

    let mut kinetic = 0.0;
    let mut cross = 0.0;
    for i in -1..n as isize {
        let diff = (at(i + 1) - at(i)) / d;
        kinetic += diff * diff;
        if variant == Variant::Plain {
            let mid = if i < 0 { x[0] - 0.5 * d } else { x[i as usize] + 0.5 * d };
            if epsilon < 0 && mid.abs() < 1e-12 {
                return Err(LatticeError::Singularity { epsilon, index: (i + 1) as usize, x: mid }.into());
            }
            let s = w1(mid) - d * d / 24.0 * if !(0..2).contains(&epsilon) { w3(mid) } else { 0.0 };
            cross += 2.0 * s * 0.5 * (at(i) + at(i + 1)) * diff;
        }
    }
    let potential: f64 = x.iter().zip(phi).map(|(&xi, &p)| (w1(xi) * p).powi(2)).sum();
    Ok(PositivityTerms { kinetic, potential, cross, total: kinetic + potential + cross })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumOptions {
    pub k: usize,
    pub variant: Variant,
    /// Bound on `|E_n(H) - E_n(h)|`.
    pub deviation_tolerance: f64,
    /// Bound on `max |Im λ| / ||H||`.
    pub imag_tolerance: f64,
    /// Bound on `|total - E_n(h)| / (kinetic + potential)`.
    pub closure_tolerance: f64,
    /// Floor for every eigenvalue of `H`.
    pub positivity_floor: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            k: 8,
            variant: Variant::Plain,
            deviation_tolerance: 1e-3,
            imag_tolerance: 1e-8,
            closure_tolerance: 1e-6,
            positivity_floor: -1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub epsilon: i32,
    pub g: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub spacing: f64,
    pub variant: Variant,
    pub k: usize,
    pub eigenvalues_h: Vec<f64>,
    #[serde(rename = "eigenvalues_H")]
    pub eigenvalues_big_h: Vec<f64>,
    #[serde(rename = "eigenvalues_H_im")]
    pub eigenvalues_big_h_im: Vec<f64>,
    pub deviations: Vec<f64>,
    pub positivity: Vec<PositivityTerms>,
    /// `|total - E_n(h)| / (kinetic + potential)` per level.
    pub closure_errors: Vec<f64>,
    pub max_im: f64,
    #[serde(rename = "norm_H")]
    pub norm_big_h: f64,
    pub min_eigenvalue_h: f64,
    #[serde(rename = "min_eigenvalue_H")]
    pub min_eigenvalue_big_h: f64,
    pub trace_h: f64,
    pub eigenvalue_sum_h: f64,
    #[serde(rename = "trace_H")]
    pub trace_big_h: f64,
    #[serde(rename = "eigenvalue_sum_H")]
    pub eigenvalue_sum_big_h: f64,
    /// Whether `H` was balanced by the diagonal metric before QR.
    pub symmetrized_path: bool,
    pub converged_h: bool,
    #[serde(rename = "converged_H")]
    pub converged_big_h: bool,
    pub iterations_h: usize,
    #[serde(rename = "iterations_H")]
    pub iterations_big_h: usize,
    pub max_deviation: f64,
    pub real_spectrum: bool,
    pub equivalent: bool,
    pub positive: bool,
    pub decomposition_closes: bool,
    /// Flag only: the lattice `h` ground level sits O(Δ²) below zero.
    pub decomposition_nonnegative: bool,
    pub verdict: String,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per level.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "level", "E_h", "E_H", "E_H_im", "deviation", "kinetic", "potential", "cross", "total", "closure_error",
        ])?;
        for i in 0..self.eigenvalues_h.len() {
            let p = &self.positivity[i];
            let cells = [
                self.eigenvalues_h[i],
                self.eigenvalues_big_h[i],
                self.eigenvalues_big_h_im[i],
                self.deviations[i],
                p.kinetic,
                p.potential,
                p.cross,
                p.total,
                self.closure_errors[i],
            ];
            let mut row = vec![i.to_string()];
            row.extend(cells.iter().map(|v| format!("{v:.16e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves both lattice operators and compares the first `k` levels.
pub fn spectrum_compare(
    epsilon: i32,
    g: f64,
    grid: &Grid,
    opts: &SpectrumOptions,
) -> Result<SpectrumReport, AnalysisError> {
    let n = grid.len();
    let k = opts.k;
    if k == 0 || k > n / 4 {
        return Err(AnalysisError::TooManyLevels { k, n });
    }
    let h = discretize_hermitian_for(epsilon, g, grid, opts.variant)?;
    let big_h = discretize_nonhermitian(epsilon, g, grid, opts.variant)?;
    let eh = eig_sym_tridiag(&h)?;
    let ebig = eig_hessenberg(&big_h)?;
    let symmetrized_path = symmetrize_if_possible(&big_h).is_ok();

    let eigenvalues_h: Vec<f64> = eh.values[..k].iter().map(|z| z.re).collect();
    let eigenvalues_big_h: Vec<f64> = ebig.values[..k].iter().map(|z| z.re).collect();
    let eigenvalues_big_h_im: Vec<f64> = ebig.values[..k].iter().map(|z| z.im).collect();
    let deviations: Vec<f64> = eigenvalues_h.iter().zip(&eigenvalues_big_h).map(|(a, b)| (a - b).abs()).collect();

    let mut positivity = Vec::with_capacity(k);
    let mut closure_errors = Vec::with_capacity(k);
    for &lambda in &eigenvalues_h {
        let vec = eigenvector_inverse_iteration(&h, lambda)?;
        let terms = positivity_decomposition_for(&vec.vector, epsilon, g, grid, opts.variant)?;
        let scale = (terms.kinetic + terms.potential).max(f64::MIN_POSITIVE);
        closure_errors.push((terms.total - lambda).abs() / scale);
        positivity.push(terms);
    }

    let norm_big_h = big_h.norm_inf();
    let max_im = ebig.max_abs_imag();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    let min_eigenvalue_h = eh.values[0].re;
    let min_eigenvalue_big_h = ebig.values[0].re;
    let real_spectrum = max_im <= opts.imag_tolerance * norm_big_h;
    let equivalent = max_deviation <= opts.deviation_tolerance;
    let positive = min_eigenvalue_big_h >= opts.positivity_floor;
    let decomposition_closes = closure_errors.iter().all(|e| *e <= opts.closure_tolerance);
    let decomposition_nonnegative = positivity.iter().all(|p| p.total >= opts.positivity_floor);
    let pass = real_spectrum && equivalent && positive && decomposition_closes && eh.converged && ebig.converged;

    Ok(SpectrumReport {
        epsilon,
        g,
        n,
        l: grid.half_width(),
        spacing: grid.spacing(),
        variant: opts.variant,
        k,
        eigenvalues_h,
        eigenvalues_big_h,
        eigenvalues_big_h_im,
        deviations,
        positivity,
        closure_errors,
        max_im,
        norm_big_h,
        min_eigenvalue_h,
        min_eigenvalue_big_h,
        trace_h: h.trace(),
        eigenvalue_sum_h: eh.sum().re,
        trace_big_h: big_h.trace(),
        eigenvalue_sum_big_h: ebig.sum().re,
        symmetrized_path,
        converged_h: eh.converged,
        converged_big_h: ebig.converged,
        iterations_h: eh.iterations,
        iterations_big_h: ebig.iterations,
        max_deviation,
        real_spectrum,
        equivalent,
        positive,
        decomposition_closes,
        decomposition_nonnegative,
        verdict: if pass { "pass" } else { "fail" }.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct E0Estimate {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub e0: f64,
}

/// Lowest eigenvalue of the lattice `h` on each grid of the schedule, by
/// Sturm bisection. `g = 0` is allowed as a control (the box ground level).
pub fn e0_convergence(epsilon: i32, g: f64, schedule: &[(usize, f64)]) -> Result<Vec<E0Estimate>, AnalysisError> {
    if ![1, 3, 5].contains(&epsilon) {
        return Err(AnalysisError::UnsupportedEpsilon { epsilon, supported: "{1, 3, 5}" });
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(AnalysisError::Domain { g });
    }
    schedule
        .iter()
        .map(|&(n, l)| {
            let grid = Grid::new(l, n)?;
            let h = discretize_hermitian(epsilon, g, &grid)?;
            Ok(E0Estimate { n, l, e0: bisect_eigenvalue(&h, 0) })
        })
        .collect()
}
