use crate::lattice::SymTridiagonal;

/// Number of eigenvalues strictly below `x`, from the signs of the pivots of
/// `T - x I`.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + t.norm_inf());
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..t.len() {
        let coupling = if i > 0 { t.off[i - 1] * t.off[i - 1] / q } else { 0.0 };
        q = t.diag[i] - x - coupling;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(t: &SymTridiagonal) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..t.len() {
        let r = (if i > 0 { t.off[i - 1].abs() } else { 0.0 }) + t.off.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
    (lo - pad, hi + pad)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn bisect_eigenvalue(t: &SymTridiagonal, k: usize) -> f64 {
    assert!(k < t.len(), "index {k} out of range for a {}x{} matrix", t.len(), t.len());
    let (mut lo, mut hi) = gershgorin(t);
    let scale = lo.abs().max(hi.abs());
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 2.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
            return mid;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Eigenvalues `lo..hi` (0-based, ascending) by bisection.
pub fn bisect_range(t: &SymTridiagonal, range: std::ops::Range<usize>) -> Vec<f64> {
    range.map(|k| bisect_eigenvalue(t, k)).collect()
}
