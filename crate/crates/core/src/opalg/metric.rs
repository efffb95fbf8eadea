//! Metric operators `eta = exp(-Q)` for `H = p^2 + i g x^eps p` and the
//! equivalent Hermitian Hamiltonians `h = exp(-Q/2) H exp(Q/2)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{adjoint, anticommutator, commutator, normal_order_product, Monomial, OperatorPolynomial, XFunction};
use crate::coeff::{binomial, Coefficient, ComplexRational};

/// Operator ordering of the interaction term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `i g x^eps p`
    #[default]
    Plain,
    /// `(i g / 2) {x^eps, p}`
    Symmetrized,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plain => "plain",
            Variant::Symmetrized => "symmetrized",
        })
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Variant::Plain),
            "symmetrized" => Ok(Variant::Symmetrized),
            other => Err(format!("unknown variant '{other}' (expected plain or symmetrized)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeriveError {
    #[error("no monomial or logarithmic ansatz solves the metric equation for eps = {epsilon} (tried {tried} candidates)")]
    NoSolution { epsilon: i32, tried: usize },
    #[error("metric for eps = {epsilon} is not first order in g")]
    NotFirstOrder { epsilon: i32 },
    #[error("transformed Hamiltonian for eps = {epsilon} is not self-adjoint")]
    NotSelfAdjoint { epsilon: i32 },
}

/// `H = p^2 + g H_I` with `H_I = i x^eps p` or `(i/2){x^eps, p}`.
pub fn build_class_hamiltonian(epsilon: i32, variant: Variant) -> OperatorPolynomial {
    let kinetic = OperatorPolynomial::monomial(0, 2);
    &kinetic + &interaction(epsilon, variant).scale(&Coefficient::g())
}

fn interaction(epsilon: i32, variant: Variant) -> OperatorPolynomial {
    let x_eps = OperatorPolynomial::monomial(epsilon, 0);
    match variant {
        Variant::Plain => OperatorPolynomial::monomial(epsilon, 1).scale_scalar(&ComplexRational::i()),
        Variant::Symmetrized => anticommutator(&x_eps, &OperatorPolynomial::p())
            .scale_scalar(&ComplexRational::new(num_rational::BigRational::from_integer(0.into()), num_rational::BigRational::new(1.into(), 2.into()))),
    }
}

/// `exp(-Q) A exp(Q)` for a function `Q(x)`, computed exactly through the
/// substitution `p -> p - i Q'(x)`.
pub fn conjugate_by_exp(q: &XFunction, a: &OperatorPolynomial) -> OperatorPolynomial {
    let shift = q.derivative().laurent_operator().scale_scalar(&-ComplexRational::i());
    let shifted_p = &OperatorPolynomial::p() + &shift;

    let mut powers = vec![OperatorPolynomial::identity()];
    let mut out = OperatorPolynomial::zero();
    for (m, c) in a.iter() {
        while powers.len() <= m.ppow as usize {
            let next = normal_order_product(powers.last().expect("non-empty"), &shifted_p);
            powers.push(next);
        }
        let left = OperatorPolynomial::term(Monomial::new(m.xpow, 0), c.clone());
        out = &out + &normal_order_product(&left, &powers[m.ppow as usize]);
    }
    out
}

/// `[f(x), A]`. Laurent parts go through operator products; a `ln x` part uses
/// `[f, p^b] = -sum_{k>=1} C(b,k) (-i)^k f^(k) p^(b-k)`.
pub fn adjoint_action(f: &XFunction, a: &OperatorPolynomial) -> OperatorPolynomial {
    let mut out = commutator(&f.laurent_operator(), a);
    let log = f.log_coefficient();
    if log.is_zero() {
        return out;
    }
    for (m, c) in a.iter() {
        for k in 1..=m.ppow {
            // k-th derivative of ln x is (-1)^(k-1) (k-1)! x^-k
            let fact: i64 = (1..k as i64).product();
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let scalar = &ComplexRational::neg_i_pow(k)
                * &ComplexRational::from_bigint(binomial(m.ppow, k) * (-sign * fact));
            let coef = &(c * log) * &Coefficient::constant(scalar);
            out.add_term(Monomial::new(m.xpow - k as i32, m.ppow - k), &coef);
        }
    }
    out
}

/// Partial sum of `sum_k ad_{-Q}^k(A) / k!` and whether the series ended.
#[derive(Clone, Debug, PartialEq)]
pub struct BchOutcome {
    pub result: OperatorPolynomial,
    /// True when a nested commutator vanished identically within `max_order`.
    pub terminated: bool,
    /// Order of the last non-zero term that was summed.
    pub order: u32,
}

pub fn bch_conjugate_truncated(q: &XFunction, a: &OperatorPolynomial, max_order: u32) -> BchOutcome {
    let neg_q = q.scale_scalar(&ComplexRational::from_integer(-1));
    let mut term = a.clone();
    let mut sum = a.clone();
    for k in 1..=max_order.max(1) {
        term = adjoint_action(&neg_q, &term).scale_scalar(&ComplexRational::ratio(1, k as i64));
        if term.is_zero() {
            return BchOutcome { result: sum, terminated: true, order: k - 1 };
        }
        sum = &sum + &term;
    }
    BchOutcome { result: sum, terminated: false, order: max_order.max(1) }
}

/// `exp(-Q) H exp(Q) - H^dagger`; zero certifies `exp(-Q)` as a metric for `H`.
pub fn pseudo_hermiticity_residual(q: &XFunction, h: &OperatorPolynomial) -> OperatorPolynomial {
    &conjugate_by_exp(q, h) - &adjoint(h)
}

/// If `lhs = c * rhs` for a scalar `c`, returns it.
fn scalar_ratio(lhs: &OperatorPolynomial, rhs: &OperatorPolynomial) -> Option<ComplexRational> {
    let (m, r) = rhs.iter().next()?;
    let c = lhs.coefficient(*m).as_constant()?;
    let c = &c * &r.as_constant()?.inverse()?;
    (&rhs.scale_scalar(&c) == lhs).then_some(c)
}

/// Solves `H_I^dagger - H_I = [-Q_1, p^2]` with a monomial `c x^m` or `c ln x`
/// ansatz and returns `Q = g Q_1`, checked against the exact identity
/// `exp(-Q) H exp(Q) = H^dagger` for both orderings of the interaction.
pub fn derive_metric(epsilon: i32) -> Result<XFunction, DeriveError> {
    let kinetic = OperatorPolynomial::monomial(0, 2);
    let h_int = interaction(epsilon, Variant::Plain);
    let lhs = &adjoint(&h_int) - &h_int;

    let lo = (epsilon - 2).min(0);
    let hi = (epsilon + 3).max(0);
    let candidates = (lo..=hi)
        .filter(|m| *m != 0)
        .map(|m| XFunction::monomial(m, Coefficient::one()))
        .chain(std::iter::once(XFunction::log(Coefficient::one())));

    let mut tried = 0;
    for shape in candidates {
        tried += 1;
        let rhs = adjoint_action(&shape.scale_scalar(&ComplexRational::from_integer(-1)), &kinetic);
        let Some(c) = scalar_ratio(&lhs, &rhs) else { continue };
        let q = shape.scale(&Coefficient::monomial(1, c));
        let certified = [Variant::Plain, Variant::Symmetrized]
            .iter()
            .all(|v| pseudo_hermiticity_residual(&q, &build_class_hamiltonian(epsilon, *v)).is_zero());
        if !certified {
            continue;
        }
        if !q.is_first_order_in_g() {
            return Err(DeriveError::NotFirstOrder { epsilon });
        }
        return Ok(q);
    }
    Err(DeriveError::NoSolution { epsilon, tried })
}

/// `h = exp(-Q/2) H exp(Q/2)`, verified self-adjoint.
pub fn hermitian_equivalent(epsilon: i32, variant: Variant) -> Result<OperatorPolynomial, DeriveError> {
    let q = derive_metric(epsilon)?;
    let half = q.scale_scalar(&ComplexRational::ratio(1, 2));
    let h = conjugate_by_exp(&half, &build_class_hamiltonian(epsilon, variant));
    if adjoint(&h) != h {
        return Err(DeriveError::NotSelfAdjoint { epsilon });
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hparser::parse;

    fn op(s: &str) -> OperatorPolynomial {
        parse(s).unwrap()
    }

    #[test]
    fn conjugation_shifts_momentum() {
        let q = XFunction::monomial(2, Coefficient::g().scale(&ComplexRational::ratio(1, 2)));
        assert_eq!(conjugate_by_exp(&q, &OperatorPolynomial::p()), op("p - 1i*g*x"));
        let any = op("x^3*p^2 + 2*p - 1i*g*x^-1");
        assert_eq!(conjugate_by_exp(&XFunction::zero(), &any), any);
    }

    #[test]
    fn metric_maps_h_to_its_adjoint() {
        for eps in 1..=3 {
            let q = derive_metric(eps).unwrap();
            let h = build_class_hamiltonian(eps, Variant::Plain);
            assert_eq!(conjugate_by_exp(&q, &h), adjoint(&h));
        }
    }

    #[test]
    fn bch_matches_exact_conjugation() {
        let q = XFunction::monomial(2, Coefficient::g().scale(&ComplexRational::ratio(1, 2)));
        let p2 = OperatorPolynomial::monomial(0, 2);
        let out = bch_conjugate_truncated(&q, &p2, 5);
        assert!(out.terminated);
        assert_eq!(out.order, 2);
        assert_eq!(out.result, conjugate_by_exp(&q, &p2));

        let zero = bch_conjugate_truncated(&XFunction::zero(), &p2, 3);
        assert!(zero.terminated);
        assert_eq!(zero.order, 0);
        assert_eq!(zero.result, p2);

        let q3 = XFunction::monomial(3, Coefficient::g().scale(&ComplexRational::ratio(1, 3)));
        let h2 = build_class_hamiltonian(2, Variant::Plain);
        let out = bch_conjugate_truncated(&q3, &h2, 6);
        assert!(out.terminated);
        assert_eq!(out.result, adjoint(&h2));
    }

    #[test]
    fn bch_with_log_metric() {
        let q = derive_metric(-1).unwrap();
        let h = build_class_hamiltonian(-1, Variant::Plain);
        let out = bch_conjugate_truncated(&q, &h, 6);
        assert!(out.terminated);
        assert_eq!(out.result, conjugate_by_exp(&q, &h));
    }

    #[test]
    fn class_hamiltonians() {
        assert_eq!(build_class_hamiltonian(1, Variant::Plain), op("p^2 + 1i*g*x*p"));
        assert_eq!(build_class_hamiltonian(2, Variant::Symmetrized), op("p^2 + 1i*g*x^2*p + g*x"));
        assert_eq!(build_class_hamiltonian(0, Variant::Plain), op("p^2 + 1i*g*p"));
    }

    #[test]
    fn derived_metrics() {
        assert_eq!(derive_metric(1).unwrap(), XFunction::from_operator(&op("1/2*g*x^2")).unwrap());
        assert_eq!(derive_metric(2).unwrap(), XFunction::from_operator(&op("1/3*g*x^3")).unwrap());
        assert_eq!(derive_metric(-1).unwrap(), XFunction::log(Coefficient::g()));
        assert_eq!(derive_metric(0).unwrap(), XFunction::from_operator(&op("g*x")).unwrap());
        assert_eq!(derive_metric(-3).unwrap(), XFunction::from_operator(&op("-1/2*g*x^-2")).unwrap());
    }

    #[test]
    fn hermitian_images() {
        assert_eq!(hermitian_equivalent(1, Variant::Plain).unwrap(), op("p^2 + 1/4*g^2*x^2 - 1/2*g"));
        assert_eq!(hermitian_equivalent(2, Variant::Plain).unwrap(), op("p^2 + 1/4*g^2*x^4 - g*x"));
        assert_eq!(hermitian_equivalent(-1, Variant::Plain).unwrap(), op("p^2 + (g^2 + 2*g)*1/4*x^-2"));
        assert_eq!(hermitian_equivalent(3, Variant::Symmetrized).unwrap(), op("p^2 + 1/4*g^2*x^6"));
    }

    #[test]
    fn residual_controls() {
        let wrong = XFunction::monomial(1, Coefficient::g());
        assert!(!pseudo_hermiticity_residual(&wrong, &build_class_hamiltonian(1, Variant::Plain)).is_zero());
        let p2 = OperatorPolynomial::monomial(0, 2);
        assert!(pseudo_hermiticity_residual(&XFunction::zero(), &p2).is_zero());
    }
}
