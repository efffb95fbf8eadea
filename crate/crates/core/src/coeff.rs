//! Exact complex-rational scalars and coefficients graded by powers of the coupling `g`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::real(BigRational::from_integer(n))
    }

    /// `re + im i` with integer parts.
    pub fn gaussian(re: i64, im: i64) -> Self {
        Self { re: BigRational::from_integer(re.into()), im: BigRational::from_integer(im.into()) }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    /// `(-i)^k`.
    pub fn neg_i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Self::from_integer(1),
            1 => -Self::i(),
            2 => Self::from_integer(-1),
            _ => Self::i(),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let den = &self.re * &self.re + &self.im * &self.im;
        Some(Self { re: &self.re / &den, im: -(&self.im / &den) })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Leading sign used when rendering: the sign of the real part, or of the
    /// imaginary part for pure imaginary values.
    pub fn is_negative(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.im.is_zero() && self.re.is_negative()
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from a finite double (binary expansion, no rounding).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub(crate) fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => write!(f, "{}i", format_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{} {} {}i", format_rational(&self.re), sign, format_rational(&self.im.abs()))
            }
        }
    }
}

impl Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: Self) -> ComplexRational {
        ComplexRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: Self) -> ComplexRational {
        ComplexRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: Self) -> ComplexRational {
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        -self.clone()
    }
}

/// A polynomial in the formal coupling `g` with exact complex-rational
/// coefficients. Zero terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<u32, ComplexRational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ComplexRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn one() -> Self {
        Self::constant(ComplexRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(ComplexRational::from_integer(n))
    }

    /// `c * g^power`.
    pub fn monomial(power: u32, c: ComplexRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(power, c);
        }
        Self { terms }
    }

    /// The coupling itself, `g`.
    pub fn g() -> Self {
        Self::monomial(1, ComplexRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates `(g_power, value)` in ascending power.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, &ComplexRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn get(&self, power: u32) -> Option<&ComplexRational> {
        self.terms.get(&power)
    }

    pub fn powers(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.keys().copied()
    }

    /// The value when the coefficient has no `g` dependence.
    pub fn as_constant(&self) -> Option<ComplexRational> {
        match self.terms.len() {
            0 => Some(ComplexRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, power: u32, c: &ComplexRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_default();
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.conj())).collect() }
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Numerical value at a real coupling.
    pub fn eval(&self, g: f64) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(re, im), (k, v)| {
            let (a, b) = v.to_f64_pair();
            let gk = g.powi(*k as i32);
            (re + a * gk, im + b * gk)
        })
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: Self) -> Coefficient {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v);
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Self) -> Coefficient {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, &-v);
        }
        out
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Self) -> Coefficient {
        let mut out = Coefficient::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(ka + kb, &(va * vb));
            }
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl From<ComplexRational> for Coefficient {
    fn from(c: ComplexRational) -> Self {
        Self::constant(c)
    }
}

/// `C(n, k)` as an exact integer.
pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Falling factorial `c (c-1) ... (c-k+1)`, valid for negative `c`.
pub(crate) fn falling_factorial(c: i64, k: u32) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(c - j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_terms_are_dropped() {
        let mut c = Coefficient::g();
        c.add_term(1, &ComplexRational::from_integer(-1));
        assert!(c.is_zero());
        assert_eq!(c, Coefficient::zero());
    }

    #[test]
    fn complex_multiplication_and_inverse() {
        let a = ComplexRational::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer(3.into()));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(&ComplexRational::i() * &ComplexRational::i(), ComplexRational::from_integer(-1));
    }

    #[test]
    fn falling_factorial_negative_base() {
        assert_eq!(falling_factorial(-1, 3), BigInt::from(-6));
        assert_eq!(falling_factorial(2, 3), BigInt::from(0));
        assert_eq!(binomial(5, 2), BigInt::from(10));
    }

    #[test]
    fn display_forms() {
        assert_eq!(ComplexRational::ratio(-2, 3).to_string(), "-2/3");
        assert_eq!(ComplexRational::i().to_string(), "1i");
        let z = ComplexRational::new(BigRational::from_integer(1.into()), BigRational::new((-3).into(), 4.into()));
        assert_eq!(z.to_string(), "1 - 3/4i");
    }
}
