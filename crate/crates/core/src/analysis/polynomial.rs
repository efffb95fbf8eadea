use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::ratmat::{kernel, span_basis, Mat};
use crate::coeff::{format_rational, rational_from_f64};
use crate::eig::eig_general_dense;

/// A polynomial `psi` with `-psi'' + g x^eps psi' = E psi`, normalized to be monic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyEigenpair {
    pub degree: usize,
    #[serde(serialize_with = "rational")]
    pub eigenvalue: BigRational,
    /// Ascending powers, `coefficients[degree] = 1`.
    #[serde(serialize_with = "rationals")]
    pub coefficients: Vec<BigRational>,
}

fn rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_rational(r))
}

fn rationals<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

/// The simplest rational that reproduces `x` to 1e-15 relative, falling back
/// to the exact binary value. Decimal inputs such as 0.1 come back as 1/10.
pub fn simple_rational(x: f64) -> BigRational {
    continued_fraction(x, 1e-15 * x.abs().max(f64::MIN_POSITIVE), 1u64 << 53)
        .or_else(|| rational_from_f64(x))
        .unwrap_or_else(BigRational::zero)
}

fn continued_fraction(x: f64, tol: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            return None;
        }
        let approx = h2.to_f64()? / k2.to_f64()?;
        if (approx - x).abs() <= tol {
            return Some(BigRational::new(h2, k2));
        }
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}

/// Exact polynomial eigenpairs of `-d^2/dx^2 + g x^eps d/dx` up to degree `dmax`.
///
/// The action on monomials up to `dmax` is assembled as an exact rectangular
/// matrix. The largest subspace mapped into itself is found by repeated
/// kernel computations, eigenvalue candidates on it are located numerically
/// and rationalized, and every candidate is confirmed by an exact kernel.
pub fn polynomial_eigenfunctions(epsilon: i32, g: f64, dmax: usize) -> Vec<PolyEigenpair> {
    assert!(dmax <= 64, "dmax must be at most 64");
    let gq = simple_rational(g);
    let cols = dmax + 1;

    // Image of x^n: -n(n-1) x^(n-2) + g n x^(n+eps-1).
    let mut images: Vec<BTreeMap<i64, BigRational>> = Vec::with_capacity(cols);
    let mut rows: BTreeMap<i64, usize> = (0..cols as i64).map(|p| (p, 0)).collect();
    for n in 0..cols as i64 {
        let mut img = BTreeMap::new();
        let mut push = |p: i64, v: BigRational| {
            if !v.is_zero() {
                *img.entry(p).or_insert_with(BigRational::zero) += v;
            }
        };
        push(n - 2, BigRational::from_integer((-n * (n - 1)).into()));
        push(n + epsilon as i64 - 1, &gq * BigRational::from_integer(n.into()));
        img.retain(|_, v: &mut BigRational| !v.is_zero());
        for p in img.keys() {
            rows.entry(*p).or_insert(0);
        }
        images.push(img);
    }
    for (i, v) in rows.values_mut().enumerate() {
        *v = i;
    }
    let nrows = rows.len();
    let apply = |v: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); nrows];
        for (n, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (p, a) in &images[n] {
                out[rows[p]] += c * a;
            }
        }
        out
    };
    let embed = |v: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); nrows];
        for (n, c) in v.iter().enumerate() {
            out[rows[&(n as i64)]] = c.clone();
        }
        out
    };

    // Largest invariant subspace: keep the part of S whose image stays in S.
    let mut basis: Vec<Vec<BigRational>> = (0..cols)
        .map(|n| (0..cols).map(|j| if j == n { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    loop {
        if basis.is_empty() {
            return Vec::new();
        }
        let r = basis.len();
        let a_s: Vec<Vec<BigRational>> = basis.iter().map(|s| apply(s)).collect();
        let e_s: Vec<Vec<BigRational>> = basis.iter().map(|s| embed(s)).collect();
        let system: Mat = (0..nrows)
            .map(|row| {
                a_s.iter().map(|v| v[row].clone()).chain(e_s.iter().map(|v| -v[row].clone())).collect()
            })
            .collect();
        let combos: Vec<Vec<BigRational>> = kernel(&system, 2 * r)
            .into_iter()
            .map(|k| {
                let mut v = vec![BigRational::zero(); cols];
                for (y, s) in k[..r].iter().zip(&basis) {
                    for (acc, x) in v.iter_mut().zip(s) {
                        *acc += y * x;
                    }
                }
                v
            })
            .collect();
        let (next, _) = span_basis(&combos);
        if next.len() == r {
            break;
        }
        basis = next;
    }
    let (basis, pivots) = span_basis(&basis);
    let r = basis.len();

    // Restriction: A s_k = sum_j M[j][k] s_j, read off at the pivot coordinates.
    let a_s: Vec<Vec<BigRational>> = basis.iter().map(|s| apply(s)).collect();
    let restricted: Mat = (0..r)
        .map(|j| (0..r).map(|k| a_s[k][rows[&(pivots[j] as i64)]].clone()).collect())
        .collect();

    let mut candidates: Vec<BigRational> = (0..r).map(|j| restricted[j][j].clone()).collect();
    let numeric: Vec<Vec<f64>> =
        restricted.iter().map(|row| row.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    if let Ok(eig) = eig_general_dense(&numeric) {
        for z in eig.values.iter().filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs())) {
            if let Some(q) = continued_fraction(z.re, 1e-9 * z.re.abs().max(1.0), 1_000_000) {
                candidates.push(q);
            }
        }
    }
    candidates.sort();
    candidates.dedup();

    let mut out = Vec::new();
    for e in candidates {
        let shifted: Mat = (0..r)
            .map(|j| {
                (0..r)
                    .map(|k| if j == k { &restricted[j][k] - &e } else { restricted[j][k].clone() })
                    .collect()
            })
            .collect();
        for y in kernel(&shifted, r) {
            let mut c = vec![BigRational::zero(); cols];
            for (yj, s) in y.iter().zip(&basis) {
                for (acc, x) in c.iter_mut().zip(s) {
                    *acc += yj * x;
                }
            }
            let Some(degree) = c.iter().rposition(|v| !v.is_zero()) else { continue };
            let scaled: Vec<BigRational> = c.iter().map(|v| v * &e).collect();
            if apply(&c) != embed(&scaled) {
                continue;
            }
            let lead = c[degree].clone();
            c.truncate(degree + 1);
            c.iter_mut().for_each(|v| *v = &*v / &lead);
            out.push(PolyEigenpair { degree, eigenvalue: e.clone(), coefficients: c });
        }
    }
    out.sort_by(|a, b| a.eigenvalue.cmp(&b.eigenvalue).then(a.degree.cmp(&b.degree)));
    out
}

/// Checks the monic recurrence `P_(n+1) = x P_n - (n/g) P_(n-1)` with `P_0 = 1`,
/// `P_1 = x`, and `E_n = g n`, for pairs of consecutive degree `0..`.
pub fn hermite_recurrence_holds(pairs: &[PolyEigenpair], g: f64) -> bool {
    let gq = simple_rational(g);
    let mut sorted: Vec<&PolyEigenpair> = pairs.iter().collect();
    sorted.sort_by_key(|p| p.degree);
    let mut prev: Vec<BigRational> = Vec::new();
    let mut cur: Vec<BigRational> = vec![BigRational::one()];
    for (n, pair) in sorted.iter().enumerate() {
        if pair.degree != n || pair.coefficients != cur || pair.eigenvalue != &gq * BigRational::from_integer(n.into()) {
            return false;
        }
        let mut next = vec![BigRational::zero(); n + 2];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += c;
        }
        let factor = BigRational::from_integer(n.into()) / &gq;
        for (k, c) in prev.iter().enumerate() {
            next[k] -= &factor * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    !sorted.is_empty()
}

impl PolyEigenpair {
    pub fn eigenvalue_f64(&self) -> f64 {
        self.eigenvalue.to_f64().unwrap_or(f64::NAN)
    }

    /// `c_0 + c_1 x + ...` with exact coefficients.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = format_rational(&c.abs());
            let body = match (k, mag.as_str()) {
                (0, _) => mag.clone(),
                (_, "1") => String::new(),
                _ => format!("({mag})"),
            };
            let var = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            parts.push((c.is_negative(), format!("{body}{var}")));
        }
        let mut out = String::new();
        for (i, (neg, body)) in parts.into_iter().enumerate() {
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_family() {
        let pairs = polynomial_eigenfunctions(1, 2.0, 8);
        assert_eq!(pairs.len(), 9);
        for (n, p) in pairs.iter().enumerate() {
            assert_eq!(p.degree, n);
            assert_eq!(p.eigenvalue, BigRational::from_integer((2 * n as i64).into()));
        }
        assert!(hermite_recurrence_holds(&pairs, 2.0));
        assert_eq!(pairs[2].render(), "x^2 - 1/2");
    }

    #[test]
    fn only_constants_otherwise() {
        for (eps, g, dmax) in [(2, 1.0, 12), (0, 1.0, 4), (3, 0.5, 10)] {
            let pairs = polynomial_eigenfunctions(eps, g, dmax);
            assert_eq!(pairs.len(), 1, "eps = {eps}");
            assert_eq!(pairs[0].degree, 0);
            assert!(pairs[0].eigenvalue.is_zero());
        }
    }

    #[test]
    fn decimal_coupling() {
        assert_eq!(simple_rational(0.1), BigRational::new(1.into(), 10.into()));
        let pairs = polynomial_eigenfunctions(1, 0.1, 4);
        assert_eq!(pairs.len(), 5);
        assert!(hermite_recurrence_holds(&pairs, 0.1));
    }
}
