use std::fmt;

use serde::{Serialize, Serializer};
use statrs::function::gamma::gamma;

use super::quadrature::simpson_adaptive;
use super::AnalysisError;
use crate::coeff::{Coefficient, ComplexRational};
use crate::opalg::{hermitian_equivalent, Variant, XFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrability {
    Normalizable,
    NonNormalizable,
    Undefined,
}

impl fmt::Display for Integrability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrability::Normalizable => "normalizable",
            Integrability::NonNormalizable => "non-normalizable",
            Integrability::Undefined => "undefined",
        })
    }
}

fn display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `phi_0 = C exp(-W)` for the Hermitian image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    pub epsilon: i32,
    pub g: f64,
    #[serde(serialize_with = "display")]
    pub exponent: XFunction,
    pub normalization: Option<f64>,
    pub verdict: Integrability,
}

impl GroundState {
    /// `C exp(-W(x))`, or `exp(-W(x))` when `C` is undefined.
    pub fn eval(&self, x: f64) -> f64 {
        let w = self.exponent.eval(x, self.g).unwrap_or(f64::NAN);
        self.normalization.unwrap_or(1.0) * (-w).exp()
    }
}

fn check_coupling(g: f64) -> Result<(), AnalysisError> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::Domain { g })
    }
}

/// `W = g x^(eps+1) / (2 (eps+1))`.
pub fn ground_state_exponent(epsilon: i32) -> Result<XFunction, AnalysisError> {
    if epsilon == -1 {
        return Err(AnalysisError::UndefinedExponent { epsilon });
    }
    let m = epsilon as i64 + 1;
    Ok(XFunction::monomial(epsilon + 1, Coefficient::monomial(1, ComplexRational::ratio(1, 2 * m))))
}

/// The exponent without the factor 1/2, `g x^(eps+1) / (eps+1)`; it is not a
/// zero mode and serves as a negative control.
pub fn printed_exponent(epsilon: i32) -> Result<XFunction, AnalysisError> {
    Ok(ground_state_exponent(epsilon)?.scale_scalar(&ComplexRational::from_integer(2)))
}

/// Square integrability of `exp(-2W)` on the real line.
///
/// Odd `eps >= 1`: `x^(eps+1)` is even and coercive. Even `eps >= 0`: the
/// exponent is odd and `exp(-2W)` grows on the negative side. `eps = -1` and
/// `eps = -3` are left undefined. Other negative `eps`: `exp(-2W) -> 1` at
/// infinity, so never integrable.
pub fn integrability_classifier(epsilon: i32, g: f64) -> Result<Integrability, AnalysisError> {
    check_coupling(g)?;
    Ok(match epsilon {
        -1 | -3 => Integrability::Undefined,
        e if e >= 1 && e % 2 == 1 => Integrability::Normalizable,
        _ => Integrability::NonNormalizable,
    })
}

/// `integral exp(-g |x|^m / m) dx = 2 Gamma(1 + 1/m) (m/g)^(1/m)` for even `m = eps + 1`.
pub fn normalization_closed_form(epsilon: i32, g: f64) -> Result<f64, AnalysisError> {
    check_coupling(g)?;
    if integrability_classifier(epsilon, g)? != Integrability::Normalizable {
        return Err(AnalysisError::NotNormalizable { epsilon });
    }
    let m = (epsilon + 1) as f64;
    let integral = 2.0 * gamma(1.0 + 1.0 / m) * (m / g).powf(1.0 / m);
    Ok(integral.powf(-0.5))
}

fn density(epsilon: i32, g: f64) -> impl Fn(f64) -> f64 {
    let m = epsilon + 1;
    move |x: f64| (-g * x.powi(m) / m as f64).exp()
}

/// `C = (integral exp(-2W))^(-1/2)` by adaptive Simpson on `[-X, X]`, with `X`
/// doubled until the integrand is below `1e-16`.
pub fn normalization_constant(epsilon: i32, g: f64) -> Result<f64, AnalysisError> {
    check_coupling(g)?;
    if integrability_classifier(epsilon, g)? != Integrability::Normalizable {
        return Err(AnalysisError::NotNormalizable { epsilon });
    }
    let f = density(epsilon, g);
    let mut cut = 1.0;
    while f(cut) >= 1e-16 {
        cut *= 2.0;
    }
    let integral = simpson_adaptive(&f, -cut, cut, 1e-10)?;
    Ok(integral.powf(-0.5))
}

pub fn ground_state_closed_form(epsilon: i32, g: f64) -> Result<GroundState, AnalysisError> {
    check_coupling(g)?;
    let exponent = ground_state_exponent(epsilon)?;
    let verdict = integrability_classifier(epsilon, g)?;
    let normalization = match verdict {
        Integrability::Normalizable => Some(normalization_constant(epsilon, g)?),
        _ => None,
    };
    Ok(GroundState { epsilon, g, exponent, normalization, verdict })
}

fn mul(a: &XFunction, b: &XFunction) -> XFunction {
    XFunction::from_operator(&(&a.laurent_operator() * &b.laurent_operator())).expect("product of functions of x")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeReport {
    pub epsilon: i32,
    #[serde(serialize_with = "display")]
    pub exponent: XFunction,
    /// `exp(W) h exp(-W)`, which must vanish.
    #[serde(serialize_with = "display")]
    pub residual_h: XFunction,
    /// `H` applied to a constant.
    #[serde(serialize_with = "display", rename = "residual_H")]
    pub residual_big_h: XFunction,
}

impl ZeroModeReport {
    pub fn is_zero_mode(&self) -> bool {
        self.residual_h.is_zero() && self.residual_big_h.is_zero()
    }
}

/// Exact check that `exp(-W)` is annihilated by the plain Hermitian image and
/// that constants are annihilated by `H`.
pub fn verify_zero_mode(epsilon: i32) -> Result<ZeroModeReport, AnalysisError> {
    verify_zero_mode_with(epsilon, &ground_state_exponent(epsilon)?)
}

/// As [`verify_zero_mode`] with an arbitrary log-free exponent.
///
/// `p^b exp(-W) = P_b exp(-W)` with `P_0 = 1` and `P_(b+1) = -i (P_b' - W' P_b)`,
/// so the residual is an exact Laurent polynomial.
pub fn verify_zero_mode_with(epsilon: i32, exponent: &XFunction) -> Result<ZeroModeReport, AnalysisError> {
    if epsilon == -1 || exponent.has_log() {
        return Err(AnalysisError::UndefinedExponent { epsilon });
    }
    let h = hermitian_equivalent(epsilon, Variant::Plain)?;
    let big_h = crate::opalg::build_class_hamiltonian(epsilon, Variant::Plain);
    let w_prime = exponent.derivative();
    let minus_i = ComplexRational::neg_i_pow(1);

    let mut powers = vec![XFunction::monomial(0, Coefficient::one())];
    let mut residual_h = XFunction::zero();
    for (m, c) in h.iter() {
        while powers.len() <= m.ppow as usize {
            let prev = powers.last().expect("non-empty");
            let next = prev.derivative().sub(&mul(&w_prime, prev)).scale_scalar(&minus_i);
            powers.push(next);
        }
        let term = mul(&XFunction::monomial(m.xpow, c.clone()), &powers[m.ppow as usize]);
        residual_h = residual_h.add(&term);
    }

    let mut residual_big_h = XFunction::zero();
    for (m, c) in big_h.iter().filter(|(m, _)| m.ppow == 0) {
        residual_big_h = residual_big_h.add(&XFunction::monomial(m.xpow, c.clone()));
    }
    Ok(ZeroModeReport { epsilon, exponent: exponent.clone(), residual_h, residual_big_h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// Tail integrals beyond growing cuts.
    Decaying,
    /// Running integral toward the divergent side.
    Divergent,
}

/// Quadrature evidence for the integrability verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailDiagnostics {
    pub epsilon: i32,
    pub g: f64,
    pub kind: TailKind,
    pub cuts: Vec<f64>,
    pub values: Vec<f64>,
    /// Decaying: every tail at most half the previous one. Divergent: the
    /// increments never shrink and the running integral passes `1e12`.
    pub consistent: bool,
}

/// Tail behaviour of `exp(-2W)` for `eps >= 0`, sampled at cuts spaced by the
/// natural length `(m/g)^(1/m)`.
pub fn tail_diagnostics(epsilon: i32, g: f64) -> Result<TailDiagnostics, AnalysisError> {
    check_coupling(g)?;
    if epsilon < 0 {
        return Err(AnalysisError::UnsupportedEpsilon { epsilon, supported: "eps >= 0" });
    }
    let m = (epsilon + 1) as f64;
    let scale = (m / g).powf(1.0 / m);
    let f = density(epsilon, g);
    let step = |a: f64, b: f64| simpson_adaptive(&f, a, b, 1e-10);

    if integrability_classifier(epsilon, g)? == Integrability::Normalizable {
        let mut far = scale;
        while f(far) >= 1e-300 {
            far *= 2.0;
        }
        let mut cuts = Vec::new();
        let mut values = Vec::new();
        let mut x = scale;
        while x < far && cuts.len() < 16 {
            // even integrand: both tails are equal
            values.push(2.0 * step(x, far)?);
            cuts.push(x);
            x += scale;
        }
        let consistent = values.len() >= 2 && values.windows(2).all(|w| w[1] <= 0.5 * w[0]);
        return Ok(TailDiagnostics { epsilon, g, kind: TailKind::Decaying, cuts, values, consistent });
    }

    // Even eps: exp(-g x^m / m) with odd m grows as x -> -infinity.
    const BOUND: f64 = 1e12;
    let mut cuts = Vec::new();
    let mut values = Vec::new();
    let mut running = 0.0;
    let mut increments: Vec<f64> = Vec::new();
    let mut x = 0.0;
    while running <= BOUND && cuts.len() < 200 {
        let inc = step(-(x + scale), -x)?;
        increments.push(inc);
        running += inc;
        x += scale;
        cuts.push(x);
        values.push(running);
    }
    let growing = increments.windows(2).all(|w| w[1] >= w[0]);
    Ok(TailDiagnostics { epsilon, g, kind: TailKind::Divergent, cuts, values, consistent: growing && running > BOUND })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_ground_state() {
        let gs = ground_state_closed_form(1, 2.0).unwrap();
        assert_eq!(gs.verdict, Integrability::Normalizable);
        let c = gs.normalization.unwrap();
        assert!((c - PI.powf(-0.25)).abs() < 1e-10);
        assert!((c - 0.7511).abs() < 1e-4);
        assert!((gs.eval(1.0) - PI.powf(-0.25) * (-0.5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn quartic_ground_state() {
        let gs = ground_state_closed_form(3, 1.0).unwrap();
        assert_eq!(gs.exponent.to_string(), "(1/8)g x^4");
        let closed = normalization_closed_form(3, 1.0).unwrap();
        assert!((gs.normalization.unwrap() - closed).abs() <= 1e-10 * closed);
    }

    #[test]
    fn coupling_scaling() {
        // C(g) = pi^(-1/4) (g/2)^(1/4) for eps = 1
        let c4 = normalization_constant(1, 4.0).unwrap();
        assert!((c4 - PI.powf(-0.25) * 2f64.powf(0.25)).abs() < 1e-10);
    }

    #[test]
    fn verdicts() {
        assert_eq!(integrability_classifier(2, 1.0).unwrap(), Integrability::NonNormalizable);
        assert_eq!(integrability_classifier(-3, 1.0).unwrap(), Integrability::Undefined);
        assert_eq!(integrability_classifier(-2, 1.0).unwrap(), Integrability::NonNormalizable);
        assert!(integrability_classifier(1, 0.0).is_err());
        assert!(ground_state_closed_form(-1, 1.0).is_err());
        let gs = ground_state_closed_form(-3, 1.0).unwrap();
        assert_eq!(gs.verdict, Integrability::Undefined);
        assert_eq!(gs.normalization, None);
        assert!(matches!(normalization_constant(2, 1.0), Err(AnalysisError::NotNormalizable { .. })));
    }

    #[test]
    fn zero_modes() {
        for eps in [1, 2, 3, 4, 5, -2, -3] {
            assert!(verify_zero_mode(eps).unwrap().is_zero_mode(), "eps = {eps}");
        }
        for eps in [1, 2, 3] {
            let bad = verify_zero_mode_with(eps, &printed_exponent(eps).unwrap()).unwrap();
            assert!(!bad.residual_h.is_zero());
        }
    }

    #[test]
    fn tails() {
        let t = tail_diagnostics(1, 2.0).unwrap();
        assert_eq!(t.kind, TailKind::Decaying);
        assert!(t.consistent, "{t:?}");
        let t = tail_diagnostics(2, 1.0).unwrap();
        assert_eq!(t.kind, TailKind::Divergent);
        assert!(t.consistent, "{t:?}");
    }
}
