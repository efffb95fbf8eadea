//! Francis double-shift QR for upper Hessenberg matrices, eigenvalues only.
//!
//! The core is written once against [`Store`]. The dense store is the usual
//! full array. The banded store keeps three sub-diagonals (room for the bulge)
//! and a few super-diagonals; it is only used on symmetric tridiagonal input,
//! where everything outside that band stays at roundoff level and is dropped.

use num_complex::Complex64;

use super::{EigError, EigenResult, MAX_SWEEPS};
use crate::lattice::TridiagonalMatrix;

trait Store {
    fn n(&self) -> usize;
    fn get(&self, i: usize, j: usize) -> f64;
    fn set(&mut self, i: usize, j: usize, v: f64);
    /// One past the last stored column in row `i`.
    fn row_end(&self, i: usize) -> usize;
    /// First stored row in column `j`.
    fn col_start(&self, j: usize) -> usize;
}

struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Store for Dense {
    fn n(&self) -> usize {
        self.n
    }
    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }
    fn row_end(&self, _i: usize) -> usize {
        self.n
    }
    fn col_start(&self, _j: usize) -> usize {
        0
    }
}

const LOWER: usize = 3;
const UPPER: usize = 4;
const WIDTH: usize = LOWER + UPPER + 1;

struct Banded {
    n: usize,
    a: Vec<f64>,
}

impl Banded {
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        (j + LOWER >= i && j <= i + UPPER).then(|| i * WIDTH + j + LOWER - i)
    }
}

impl Store for Banded {
    fn n(&self) -> usize {
        self.n
    }
    fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.a[s])
    }
    fn set(&mut self, i: usize, j: usize, v: f64) {
        if let Some(s) = self.slot(i, j) {
            self.a[s] = v;
        }
    }
    fn row_end(&self, i: usize) -> usize {
        (i + UPPER + 1).min(self.n)
    }
    fn col_start(&self, j: usize) -> usize {
        j.saturating_sub(UPPER)
    }
}

fn fill<S: Store>(store: &mut S, m: &TridiagonalMatrix) {
    for i in 0..m.len() {
        store.set(i, i, m.diag[i]);
        if i + 1 < m.len() {
            store.set(i + 1, i, m.sub[i]);
            store.set(i, i + 1, m.sup[i]);
        }
    }
}

/// Dense Francis QR on a tridiagonal matrix, with no balancing.
pub fn eig_hessenberg_dense(m: &TridiagonalMatrix) -> Result<EigenResult, EigError> {
    let n = m.len();
    if n == 0 {
        return Err(EigError::Empty);
    }
    let mut store = Dense { n, a: vec![0.0; n * n] };
    fill(&mut store, m);
    hqr(&mut store, MAX_SWEEPS)
}

/// Dense Francis QR on a general upper Hessenberg matrix given row by row.
/// Entries below the first sub-diagonal are ignored.
pub fn eig_upper_hessenberg(rows: &[Vec<f64>]) -> Result<EigenResult, EigError> {
    let n = rows.len();
    if n == 0 {
        return Err(EigError::Empty);
    }
    let mut store = Dense { n, a: vec![0.0; n * n] };
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), n, "matrix must be square");
        for (j, &v) in row.iter().enumerate() {
            if j + 1 >= i {
                store.set(i, j, v);
            }
        }
    }
    hqr(&mut store, MAX_SWEEPS)
}

/// Eigenvalues of a general dense matrix: Gaussian reduction to Hessenberg
/// form with pivoting, then Francis QR. Meant for small matrices.
pub fn eig_general_dense(rows: &[Vec<f64>]) -> Result<EigenResult, EigError> {
    let n = rows.len();
    if n == 0 {
        return Err(EigError::Empty);
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    for row in &a {
        assert_eq!(row.len(), n, "matrix must be square");
    }
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut piv = m;
        for (j, row) in a.iter().enumerate().skip(m) {
            if row[m - 1].abs() > x.abs() {
                x = row[m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let y = a[i][m - 1] / x;
                if y == 0.0 {
                    continue;
                }
                a[i][m - 1] = 0.0;
                for j in m..n {
                    a[i][j] -= y * a[m][j];
                }
                for row in a.iter_mut() {
                    row[m] += y * row[i];
                }
            }
        }
    }
    eig_upper_hessenberg(&a)
}

/// Banded Francis QR; the caller guarantees the input is symmetric.
pub(crate) fn eig_banded(m: &TridiagonalMatrix) -> Result<EigenResult, EigError> {
    let n = m.len();
    let mut store = Banded { n, a: vec![0.0; n * WIDTH] };
    fill(&mut store, m);
    hqr(&mut store, MAX_SWEEPS)
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

fn hqr<S: Store>(a: &mut S, max_sweeps: usize) -> Result<EigenResult, EigError> {
    let n = a.n();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..a.row_end(i) {
            anorm += a.get(i, j).abs();
        }
    }

    let mut total = 0;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nn;
            while l >= 1 {
                let lu = l as usize;
                let mut s = a.get(lu - 1, lu - 1).abs() + a.get(lu, lu).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.get(lu, lu - 1).abs() + s == s {
                    a.set(lu, lu - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            let l = l.max(0);
            let mut x = a.get(nu, nu);
            if l == nn {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                let mut y = a.get(nu - 1, nu - 1);
                let mut w = a.get(nu, nu - 1) * a.get(nu - 1, nu);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == max_sweeps {
                        return Err(EigError::NoConvergence { index: nu, iterations: its });
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 0..=nu {
                            let v = a.get(i, i) - x;
                            a.set(i, i, v);
                        }
                        let s = a.get(nu, nu - 1).abs() + a.get(nu - 1, nu - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    total += 1;
                    francis_step(a, l as usize, nu, x, y, w);
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }

    let values = wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect();
    Ok(EigenResult::from_unsorted(values, total))
}

fn francis_step<S: Store>(a: &mut S, l: usize, nn: usize, x0: f64, y0: f64, w: f64) {
    let (mut p, mut q, mut r);
    let mut m = nn - 2;
    loop {
        let z = a.get(m, m);
        let rr = x0 - z;
        let ss = y0 - z;
        p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
        q = a.get(m + 1, m + 1) - z - rr - ss;
        r = a.get(m + 2, m + 1);
        let s = p.abs() + q.abs() + r.abs();
        p /= s;
        q /= s;
        r /= s;
        if m == l {
            break;
        }
        let u = a.get(m, m - 1).abs() * (q.abs() + r.abs());
        let v = p.abs() * (a.get(m - 1, m - 1).abs() + z.abs() + a.get(m + 1, m + 1).abs());
        if u + v == v {
            break;
        }
        m -= 1;
    }
    for i in m + 2..=nn {
        a.set(i, i - 2, 0.0);
        if i != m + 2 {
            a.set(i, i - 3, 0.0);
        }
    }
    let mut x = 0.0;
    for k in m..nn {
        if k != m {
            p = a.get(k, k - 1);
            q = a.get(k + 1, k - 1);
            r = if k != nn - 1 { a.get(k + 2, k - 1) } else { 0.0 };
            x = p.abs() + q.abs() + r.abs();
            if x != 0.0 {
                p /= x;
                q /= x;
                r /= x;
            }
        }
        let s = sign((p * p + q * q + r * r).sqrt(), p);
        if s == 0.0 {
            continue;
        }
        if k == m {
            if l != m {
                let v = a.get(k, k - 1);
                a.set(k, k - 1, -v);
            }
        } else {
            a.set(k, k - 1, -s * x);
        }
        p += s;
        let hx = p / s;
        let hy = q / s;
        let hz = r / s;
        q /= p;
        r /= p;

        let last_row = (k + 2).min(nn);
        let j_end = a.row_end(last_row).min(nn + 1);
        for j in k..j_end {
            let mut pp = a.get(k, j) + q * a.get(k + 1, j);
            if k != nn - 1 {
                pp += r * a.get(k + 2, j);
                let v = a.get(k + 2, j) - pp * hz;
                a.set(k + 2, j, v);
            }
            let v = a.get(k + 1, j) - pp * hy;
            a.set(k + 1, j, v);
            let v = a.get(k, j) - pp * hx;
            a.set(k, j, v);
        }

        let mmin = nn.min(k + 3);
        for i in l.max(a.col_start(k))..=mmin {
            let mut pp = hx * a.get(i, k) + hy * a.get(i, k + 1);
            if k != nn - 1 {
                pp += hz * a.get(i, k + 2);
                let v = a.get(i, k + 2) - pp * r;
                a.set(i, k + 2, v);
            }
            let v = a.get(i, k + 1) - pp * q;
            a.set(i, k + 1, v);
            let v = a.get(i, k) - pp;
            a.set(i, k, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::eig_sym_tridiag;
    use crate::lattice::SymTridiagonal;

    #[test]
    fn rotation_block_gives_complex_pair() {
        let m = TridiagonalMatrix::new(vec![0.0, 0.0], vec![1.0], vec![-1.0]);
        let r = eig_hessenberg_dense(&m).unwrap();
        assert!((r.values[0].im + 1.0).abs() < 1e-14);
        assert!((r.values[1].im - 1.0).abs() < 1e-14);
        assert!(r.values[0].re.abs() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // (t - 1)(t - 2)(t - 3)(t - 4) = t^4 - 10 t^3 + 35 t^2 - 50 t + 24
        let rows = vec![
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let r = eig_upper_hessenberg(&rows).unwrap();
        for (k, z) in r.values.iter().enumerate() {
            assert!((z.re - (k + 1) as f64).abs() < 1e-9 && z.im.abs() < 1e-9);
        }
    }

    #[test]
    fn general_dense_similarity() {
        // S diag(1, 2, 3) S^-1 with a non-trivial S.
        let rows = vec![vec![2.0, 1.0, -1.0], vec![0.0, 3.0, 1.0], vec![0.0, 0.0, 1.0]];
        let r = eig_general_dense(&rows).unwrap();
        for (k, z) in r.values.iter().enumerate() {
            assert!((z.re - (k + 1) as f64).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        let full = vec![vec![4.0, 1.0, 2.0], vec![1.0, 3.0, 0.5], vec![2.0, 0.5, 5.0]];
        let r = eig_general_dense(&full).unwrap();
        let sum: f64 = r.real_parts().iter().sum();
        assert!((sum - 12.0).abs() < 1e-12);
    }

    #[test]
    fn banded_matches_dense_and_ql() {
        let n = 120;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + ((i * 13 % 7) as f64) / 7.0).collect();
        let s = SymTridiagonal::new(diag, off);
        let banded = eig_banded(&s.as_general()).unwrap();
        let dense = eig_hessenberg_dense(&s.as_general()).unwrap();
        let ql = eig_sym_tridiag(&s).unwrap();
        for k in 0..n {
            assert!((banded.values[k].re - dense.values[k].re).abs() < 1e-10);
            assert!((banded.values[k].re - ql.values[k].re).abs() < 1e-10);
            assert!(banded.values[k].im.abs() < 1e-10);
        }
    }
}
