//! Normal-ordered operator algebra in `x` and `p` with `[x, p] = i`.
//!
//! Every operator is kept as a sum of `c(g) x^a p^b` with the `x` factor on
//! the left. Products are re-ordered with
//! `p^b x^c = sum_k C(b,k) (-i)^k c^(k) x^(c-k) p^(b-k)`, where `c^(k)` is the
//! falling factorial, which also holds for negative `c`.

mod metric;
mod xfunction;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use metric::{
    adjoint_action, bch_conjugate_truncated, build_class_hamiltonian, conjugate_by_exp,
    derive_metric, hermitian_equivalent, pseudo_hermiticity_residual, BchOutcome, DeriveError,
    Variant,
};
pub use xfunction::{XFunction, XFunctionError};

use crate::coeff::{binomial, falling_factorial, Coefficient, ComplexRational};

/// `x^xpow p^ppow`, in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub xpow: i32,
    pub ppow: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { xpow: 0, ppow: 0 };

    pub fn new(xpow: i32, ppow: u32) -> Self {
        Self { xpow, ppow }
    }
}

/// An exact operator in canonical normal-ordered form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperatorPolynomial {
    terms: BTreeMap<Monomial, Coefficient>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::term(Monomial::ONE, Coefficient::one())
    }

    pub fn term(m: Monomial, c: Coefficient) -> Self {
        let mut out = Self::zero();
        out.add_term(m, &c);
        out
    }

    pub fn scalar(c: ComplexRational) -> Self {
        Self::term(Monomial::ONE, Coefficient::constant(c))
    }

    pub fn x() -> Self {
        Self::term(Monomial::new(1, 0), Coefficient::one())
    }

    pub fn p() -> Self {
        Self::term(Monomial::new(0, 1), Coefficient::one())
    }

    /// `x^a p^b` with unit coefficient.
    pub fn monomial(xpow: i32, ppow: u32) -> Self {
        Self::term(Monomial::new(xpow, ppow), Coefficient::one())
    }

    /// The formal coupling as a multiplication operator.
    pub fn g() -> Self {
        Self::term(Monomial::ONE, Coefficient::g())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> Coefficient {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// True when no term carries a power of `p`.
    pub fn is_pure_x(&self) -> bool {
        self.terms.keys().all(|m| m.ppow == 0)
    }

    pub fn max_ppow(&self) -> u32 {
        self.terms.keys().map(|m| m.ppow).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, &(v * c));
        }
        out
    }

    pub fn scale_scalar(&self, c: &ComplexRational) -> Self {
        self.scale(&Coefficient::constant(c.clone()))
    }

    /// Canonical product `self * rhs`.
    pub fn mul_op(&self, rhs: &Self) -> Self {
        normal_order_product(self, rhs)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = normal_order_product(&acc, self);
        }
        acc
    }

    /// Highest power of `g` present in any coefficient.
    pub fn max_g_power(&self) -> u32 {
        self.terms.values().flat_map(|c| c.powers()).max().unwrap_or(0)
    }
}

/// Reorders `p^b x^c` into normal order, scaled by `coef`, and accumulates
/// `x^a (p^b x^c) p^d` into `out`.
fn accumulate_reordered(
    out: &mut OperatorPolynomial,
    coef: &Coefficient,
    a: i32,
    b: u32,
    c: i32,
    d: u32,
) {
    for k in 0..=b {
        let ff = falling_factorial(c as i64, k);
        if ff == 0.into() {
            // c >= 0 and k > c: every higher k vanishes as well.
            break;
        }
        let factor = &ComplexRational::neg_i_pow(k) * &ComplexRational::from_bigint(binomial(b, k) * ff);
        out.add_term(Monomial::new(a + c - k as i32, b - k + d), &coef.scale(&factor));
    }
}

/// The canonical normal-ordered product `A * B`.
pub fn normal_order_product(a: &OperatorPolynomial, b: &OperatorPolynomial) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let coef = ca * cb;
            accumulate_reordered(&mut out, &coef, ma.xpow, ma.ppow, mb.xpow, mb.ppow);
        }
    }
    out
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &OperatorPolynomial, b: &OperatorPolynomial) -> OperatorPolynomial {
    &normal_order_product(a, b) - &normal_order_product(b, a)
}

/// `{A, B} = AB + BA`.
pub fn anticommutator(a: &OperatorPolynomial, b: &OperatorPolynomial) -> OperatorPolynomial {
    &normal_order_product(a, b) + &normal_order_product(b, a)
}

/// Hermitian adjoint with `g` real: `(c x^a p^b)^dagger = conj(c) p^b x^a`.
pub fn adjoint(a: &OperatorPolynomial) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::zero();
    for (m, c) in &a.terms {
        accumulate_reordered(&mut out, &c.conj(), 0, m.ppow, m.xpow, 0);
    }
    out
}

impl Add for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn add(self, rhs: Self) -> OperatorPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl Sub for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn sub(self, rhs: Self) -> OperatorPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl Mul for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: Self) -> OperatorPolynomial {
        normal_order_product(self, rhs)
    }
}

impl Neg for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        self.scale_scalar(&ComplexRational::from_integer(-1))
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::hparser::format(self))
    }
}
