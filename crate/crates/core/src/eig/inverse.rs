use super::EigError;
use crate::lattice::SymTridiagonal;

const MAX_RETRIES: usize = 3;
const MAX_STEPS: usize = 60;

/// An eigenvector with the Rayleigh quotient it converged to.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseIteration {
    pub vector: Vec<f64>,
    pub rayleigh: f64,
    /// `||T v - rayleigh v||`.
    pub residual: f64,
    pub steps: usize,
}

/// Unit eigenvector of `T` nearest the shift `lambda`.
///
/// Starts from all ones and falls back to a ramp orthogonal to it. The
/// residual is measured against the Rayleigh quotient and must not exceed
/// `1e-8 ||T||`.
pub fn eigenvector_inverse_iteration(t: &SymTridiagonal, lambda: f64) -> Result<InverseIteration, EigError> {
    let n = t.len();
    if n == 0 {
        return Err(EigError::Empty);
    }
    let norm = t.norm_inf().max(f64::MIN_POSITIVE);
    let tolerance = 1e-8 * norm;

    let ones = vec![1.0; n];
    let mean = (n as f64 - 1.0) / 2.0;
    let ramp: Vec<f64> = (0..n).map(|i| i as f64 - mean).collect();

    let mut shift = lambda;
    let mut retries = 0;
    let mut best: Option<InverseIteration> = None;
    for start in [ones, ramp] {
        let run = loop {
            match iterate(t, shift, &start, tolerance) {
                Ok(run) => break run,
                Err(Singular) => {
                    if retries == MAX_RETRIES {
                        return Err(EigError::Breakdown { shift, retries });
                    }
                    retries += 1;
                    shift += 1e-12 * norm;
                }
            }
        };
        if run.residual <= tolerance {
            return Ok(run);
        }
        if best.as_ref().is_none_or(|b| run.residual < b.residual) {
            best = Some(run);
        }
    }
    let residual = best.map_or(f64::INFINITY, |b| b.residual);
    Err(EigError::Residual { residual, tolerance })
}

struct Singular;

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn iterate(t: &SymTridiagonal, shift: f64, start: &[f64], tolerance: f64) -> Result<InverseIteration, Singular> {
    let lu = Lu::factor(t, shift)?;
    let mut v = start.to_vec();
    normalize(&mut v);
    let mut out = InverseIteration { vector: v.clone(), rayleigh: shift, residual: f64::INFINITY, steps: 0 };
    for step in 1..=MAX_STEPS {
        let mut y = lu.solve(&v);
        if normalize(&mut y) == 0.0 || y.iter().any(|x| !x.is_finite()) {
            return Err(Singular);
        }
        // Fix the sign so the largest component is positive.
        let pivot = y.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if pivot < 0.0 {
            y.iter_mut().for_each(|x| *x = -*x);
        }
        let ty = t.apply(&y);
        let rayleigh: f64 = ty.iter().zip(&y).map(|(a, b)| a * b).sum();
        let residual = ty.iter().zip(&y).map(|(a, b)| (a - rayleigh * b).powi(2)).sum::<f64>().sqrt();
        v = y;
        out = InverseIteration { vector: v.clone(), rayleigh, residual, steps: step };
        if residual <= 0.1 * tolerance || (step >= 3 && residual <= tolerance) {
            break;
        }
    }
    Ok(out)
}

/// LU factors of `T - shift I` with partial pivoting; `U` has two super-diagonals.
struct Lu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl Lu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Result<Self, Singular> {
        let n = t.len();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];

        // Current working row: (a, b, c) at columns (i, i+1, i+2).
        let mut a = t.diag[0] - shift;
        let mut b = t.off.first().copied().unwrap_or(0.0);
        let mut c = 0.0;
        for i in 0..n {
            if i + 1 == n {
                if a == 0.0 {
                    return Err(Singular);
                }
                u0[i] = a;
                u1[i] = b;
                u2[i] = c;
                break;
            }
            let sub = t.off[i];
            let next_d = t.diag[i + 1] - shift;
            let next_e = t.off.get(i + 1).copied().unwrap_or(0.0);
            if sub.abs() > a.abs() {
                swapped[i] = true;
                u0[i] = sub;
                u1[i] = next_d;
                u2[i] = next_e;
                let m = a / sub;
                mult[i] = m;
                a = b - m * next_d;
                b = c - m * next_e;
                c = 0.0;
            } else {
                if a == 0.0 {
                    return Err(Singular);
                }
                u0[i] = a;
                u1[i] = b;
                u2[i] = c;
                let m = sub / a;
                mult[i] = m;
                a = next_d - m * b;
                b = next_e - m * c;
                c = 0.0;
            }
        }
        Ok(Self { u0, u1, u2, mult, swapped })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.mult[i] * y[i];
        }
        let tiny = f64::EPSILON * self.u0.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in (0..n).rev() {
            let mut acc = y[i];
            if i + 1 < n {
                acc -= self.u1[i] * y[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * y[i + 2];
            }
            let d = if self.u0[i].abs() < tiny { tiny.copysign(self.u0[i]) } else { self.u0[i] };
            y[i] = acc / d;
        }
        y
    }
}
