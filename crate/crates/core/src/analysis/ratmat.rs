//! Row reduction over exact rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type Mat = Vec<Vec<BigRational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub(crate) fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..cols {
                let delta = &factor * &m[r][j];
                m[i][j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of `{v : m v = 0}`; `cols` is needed when `m` has no rows.
pub(crate) fn kernel(m: &Mat, cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

/// Row-reduced basis of the span of `vectors`, with the pivot coordinate of
/// each basis vector.
pub(crate) fn span_basis(vectors: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a: Mat = vectors.to_vec();
    let pivots = rref(&mut a);
    a.truncate(pivots.len());
    (a, pivots)
}
