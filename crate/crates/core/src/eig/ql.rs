use num_complex::Complex64;

use super::{EigError, EigenResult, MAX_SWEEPS};
use crate::lattice::SymTridiagonal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlOptions {
    /// An off-diagonal is treated as zero once `|e_i| <= deflation * (|d_i| + |d_{i+1}|)`.
    pub deflation: f64,
    pub max_sweeps: usize,
}

impl Default for QlOptions {
    fn default() -> Self {
        Self { deflation: 1e-14, max_sweeps: MAX_SWEEPS }
    }
}

pub fn eig_sym_tridiag(t: &SymTridiagonal) -> Result<EigenResult, EigError> {
    eig_sym_tridiag_with(t, QlOptions::default())
}

/// Implicit QL with a Wilkinson-type shift from the leading 2x2 block.
pub fn eig_sym_tridiag_with(t: &SymTridiagonal, opts: QlOptions) -> Result<EigenResult, EigError> {
    let n = t.len();
    if n == 0 {
        return Err(EigError::Empty);
    }
    let mut d = t.diag.clone();
    let mut e = t.off.clone();
    e.push(0.0);
    let mut total = 0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= opts.deflation * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == opts.max_sweeps {
                return Err(EigError::NoConvergence { index: l, iterations: iter });
            }
            iter += 1;
            total += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(EigenResult::from_unsorted(d.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let t = SymTridiagonal::new(vec![2.0, 2.0], vec![-1.0]);
        let r = eig_sym_tridiag(&t).unwrap();
        assert!((r.values[0].re - 1.0).abs() < 1e-14);
        assert!((r.values[1].re - 3.0).abs() < 1e-14);
        assert!(r.values.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn dirichlet_laplacian() {
        let n = 200;
        let delta = 0.05f64;
        let inv = 1.0 / (delta * delta);
        let t = SymTridiagonal::new(vec![2.0 * inv; n], vec![-inv; n - 1]);
        let r = eig_sym_tridiag(&t).unwrap();
        for (k, z) in r.values.iter().enumerate() {
            let theta = (k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0);
            let want = (2.0 - 2.0 * theta.cos()) * inv;
            assert!((z.re - want).abs() < 1e-10 * inv, "k = {k}");
        }
    }

    #[test]
    fn single_entry() {
        let t = SymTridiagonal::new(vec![7.0], vec![]);
        assert_eq!(eig_sym_tridiag(&t).unwrap().values[0].re, 7.0);
    }
}
