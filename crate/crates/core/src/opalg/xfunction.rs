use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Monomial, OperatorPolynomial};
use crate::coeff::{Coefficient, ComplexRational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XFunctionError {
    #[error("ln(x) is undefined at x = {x}")]
    LogDomain { x: f64 },
    #[error("function carries a ln(x) term and has no operator-polynomial form")]
    HasLogTerm,
    #[error("operator contains powers of p and is not a function of x")]
    NotPureX,
}

/// A Laurent polynomial in `x` plus an optional `c ln(x)` term, with
/// coefficients polynomial in `g`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XFunction {
    laurent: BTreeMap<i32, Coefficient>,
    log: Coefficient,
}

impl XFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c x^xpow`.
    pub fn monomial(xpow: i32, c: Coefficient) -> Self {
        let mut out = Self::zero();
        out.add_laurent(xpow, &c);
        out
    }

    /// `c ln(x)`.
    pub fn log(c: Coefficient) -> Self {
        Self { laurent: BTreeMap::new(), log: c }
    }

    pub fn is_zero(&self) -> bool {
        self.laurent.is_empty() && self.log.is_zero()
    }

    pub fn has_log(&self) -> bool {
        !self.log.is_zero()
    }

    pub fn log_coefficient(&self) -> &Coefficient {
        &self.log
    }

    pub fn laurent_terms(&self) -> impl Iterator<Item = (i32, &Coefficient)> {
        self.laurent.iter().map(|(k, v)| (*k, v))
    }

    pub fn laurent_coefficient(&self, xpow: i32) -> Coefficient {
        self.laurent.get(&xpow).cloned().unwrap_or_default()
    }

    fn add_laurent(&mut self, xpow: i32, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        let entry = self.laurent.entry(xpow).or_default();
        *entry += c;
        if entry.is_zero() {
            self.laurent.remove(&xpow);
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::log(&self.log * c);
        for (k, v) in &self.laurent {
            out.add_laurent(*k, &(v * c));
        }
        out
    }

    pub fn scale_scalar(&self, c: &ComplexRational) -> Self {
        self.scale(&Coefficient::constant(c.clone()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.log += &rhs.log;
        for (k, v) in &rhs.laurent {
            out.add_laurent(*k, v);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale_scalar(&ComplexRational::from_integer(-1)))
    }

    /// `d/dx`; `ln x` maps to `x^-1`, so the result never has a log term.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.laurent {
            if *k != 0 {
                out.add_laurent(k - 1, &v.scale(&ComplexRational::from_integer(*k as i64)));
            }
        }
        out.add_laurent(-1, &self.log);
        out
    }

    /// Multiplication by this function as an operator. Fails when a log
    /// term is present.
    pub fn to_operator(&self) -> Result<OperatorPolynomial, XFunctionError> {
        if self.has_log() {
            return Err(XFunctionError::HasLogTerm);
        }
        Ok(self.laurent_operator())
    }

    /// The Laurent part as a multiplication operator, ignoring any log term.
    pub fn laurent_operator(&self) -> OperatorPolynomial {
        let mut out = OperatorPolynomial::zero();
        for (k, v) in &self.laurent {
            out.add_term(Monomial::new(*k, 0), v);
        }
        out
    }

    pub fn from_operator(op: &OperatorPolynomial) -> Result<Self, XFunctionError> {
        let mut out = Self::zero();
        for (m, c) in op.iter() {
            if m.ppow != 0 {
                return Err(XFunctionError::NotPureX);
            }
            out.add_laurent(m.xpow, c);
        }
        Ok(out)
    }

    /// True when every coefficient is exactly linear in `g`.
    pub fn is_first_order_in_g(&self) -> bool {
        self.laurent
            .values()
            .chain(std::iter::once(&self.log).filter(|c| !c.is_zero()))
            .all(|c| c.powers().eq(std::iter::once(1)))
    }

    /// Real part of the value at `x` for a numeric coupling.
    pub fn eval(&self, x: f64, g: f64) -> Result<f64, XFunctionError> {
        let mut acc = 0.0;
        for (k, v) in &self.laurent {
            acc += v.eval(g).0 * x.powi(*k);
        }
        if self.has_log() {
            if x <= 0.0 {
                return Err(XFunctionError::LogDomain { x });
            }
            acc += self.log.eval(g).0 * x.ln();
        }
        Ok(acc)
    }
}

impl fmt::Display for XFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let laurent = self.laurent_operator();
        if !self.has_log() {
            return write!(f, "{laurent}");
        }
        let log = crate::hparser::format(&OperatorPolynomial::term(Monomial::ONE, self.log.clone()));
        let log = if log == "1" { String::new() } else { format!("{log} ") };
        if laurent.is_zero() {
            write!(f, "{log}ln(x)")
        } else {
            write!(f, "{laurent} + {log}ln(x)")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_differentiates_to_inverse() {
        let q = XFunction::log(Coefficient::g());
        assert_eq!(q.derivative(), XFunction::monomial(-1, Coefficient::g()));
        assert!(q.to_operator().is_err());
        assert_eq!(q.to_string(), "g ln(x)");
    }

    #[test]
    fn derivative_of_laurent() {
        let f = XFunction::monomial(3, Coefficient::g()).add(&XFunction::monomial(-2, Coefficient::one()));
        let want = XFunction::monomial(2, Coefficient::g().scale(&ComplexRational::from_integer(3)))
            .add(&XFunction::monomial(-3, Coefficient::from_integer(-2)));
        assert_eq!(f.derivative(), want);
    }

    #[test]
    fn evaluation() {
        let q = XFunction::monomial(2, Coefficient::g().scale(&ComplexRational::ratio(1, 2)));
        assert!((q.eval(1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let l = XFunction::log(Coefficient::g());
        assert!(l.eval(-1.0, 1.0).is_err());
    }

    #[test]
    fn grading() {
        assert!(XFunction::monomial(3, Coefficient::g()).is_first_order_in_g());
        assert!(!XFunction::monomial(3, Coefficient::g().pow(2)).is_first_order_in_g());
        assert!(XFunction::log(Coefficient::g()).is_first_order_in_g());
    }
}
