//! The full verification run behind `pseudoherm verify`.

use rand::Rng;
use serde::Serialize;

use super::{
    e0_convergence, hermite_recurrence_holds, integrability_classifier, polynomial_eigenfunctions,
    printed_exponent, spectrum_compare, tail_diagnostics, verify_zero_mode, verify_zero_mode_with,
    Integrability, SpectrumOptions,
};
use crate::coeff::{Coefficient, ComplexRational};
use crate::eig::{bisect_range, eig_sym_tridiag};
use crate::hparser::{format, parse};
use crate::lattice::Grid;
use crate::opalg::{
    bch_conjugate_truncated, build_class_hamiltonian, conjugate_by_exp, derive_metric, hermitian_equivalent,
    pseudo_hermiticity_residual, Variant, XFunction,
};
use crate::random::{random_operator, random_sym_tridiagonal, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replace every derived metric by twice itself, which the metric checks must catch.
    pub inject_wrong_metric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { name: name.to_string(), passed, detail: detail.into() }
}

const SYMBOLIC_RANGE: [i32; 7] = [-1, 0, 1, 2, 3, 4, 5];

fn expected_metric(epsilon: i32) -> XFunction {
    if epsilon == -1 {
        XFunction::log(Coefficient::g())
    } else {
        XFunction::monomial(epsilon + 1, Coefficient::monomial(1, ComplexRational::ratio(1, epsilon as i64 + 1)))
    }
}

fn symbolic(opts: &SuiteOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let mut failures = Vec::new();
    for eps in SYMBOLIC_RANGE {
        match derive_metric(eps) {
            Ok(q) => {
                let q = if opts.inject_wrong_metric { q.scale_scalar(&ComplexRational::from_integer(2)) } else { q };
                let exact = q == expected_metric(eps);
                let certified = [Variant::Plain, Variant::Symmetrized]
                    .iter()
                    .all(|v| pseudo_hermiticity_residual(&q, &build_class_hamiltonian(eps, *v)).is_zero());
                if !(exact && certified) {
                    failures.push(format!("eps={eps}: Q = {q}"));
                }
            }
            Err(e) => failures.push(format!("eps={eps}: {e}")),
        }
    }
    out.push(check("symbolic_metric", failures.is_empty(), failures.join("; ")));

    let images = [
        (1, Variant::Plain, "p^2 + 1/4*g^2*x^2 - 1/2*g"),
        (2, Variant::Plain, "p^2 + 1/4*g^2*x^4 - g*x"),
        (3, Variant::Plain, "p^2 + 1/4*g^2*x^6 - 3/2*g*x^2"),
        (-1, Variant::Plain, "p^2 + (g^2 + 2*g)*1/4*x^-2"),
        (1, Variant::Symmetrized, "p^2 + 1/4*g^2*x^2"),
        (2, Variant::Symmetrized, "p^2 + 1/4*g^2*x^4"),
        (3, Variant::Symmetrized, "p^2 + 1/4*g^2*x^6"),
    ];
    let mut failures = Vec::new();
    for (eps, variant, text) in images {
        let want = parse(text).expect("reference text parses");
        let got = if opts.inject_wrong_metric {
            derive_metric(eps).map(|q| {
                // The true image uses Q/2; a doubled metric conjugates by Q itself.
                let doubled = q;
                conjugate_by_exp(&doubled, &build_class_hamiltonian(eps, variant))
            })
        } else {
            hermitian_equivalent(eps, variant)
        };
        match got {
            Ok(h) if h == want => {}
            Ok(h) => failures.push(format!("eps={eps} {variant}: {}", format(&h))),
            Err(e) => failures.push(format!("eps={eps} {variant}: {e}")),
        }
    }
    out.push(check("hermitian_images", failures.is_empty(), failures.join("; ")));

    let mut failures = Vec::new();
    for eps in SYMBOLIC_RANGE {
        let Ok(q) = derive_metric(eps) else {
            failures.push(format!("eps={eps}: no metric"));
            continue;
        };
        let q = if opts.inject_wrong_metric { q.scale_scalar(&ComplexRational::from_integer(2)) } else { q };
        for variant in [Variant::Plain, Variant::Symmetrized] {
            let h = build_class_hamiltonian(eps, variant);
            let bch = bch_conjugate_truncated(&q, &h, 8);
            if !(bch.terminated && bch.order <= 3 && bch.result == conjugate_by_exp(&q, &h)) {
                failures.push(format!("eps={eps} {variant}: order {}", bch.order));
            }
        }
    }
    out.push(check("bch_termination", failures.is_empty(), failures.join("; ")));
    out
}

fn spectral() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let cases = [(1, 2.0, 10.0, 8), (2, 1.0, 10.0, 5), (3, 1.0, 6.0, 5), (2, 2.0, 8.0, 5)];
    let mut details = Vec::new();
    let mut ok = true;
    for (eps, g, l, k) in cases {
        let grid = Grid::new(l, 2000).expect("valid grid");
        match spectrum_compare(eps, g, &grid, &SpectrumOptions { k, ..Default::default() }) {
            Ok(r) => {
                let pass = r.real_spectrum && r.equivalent;
                ok &= pass;
                details.push(format!("eps={eps} g={g}: max dev {:.3e}, max |Im| {:.3e}", r.max_deviation, r.max_im));
            }
            Err(e) => {
                ok = false;
                details.push(format!("eps={eps} g={g}: {e}"));
            }
        }
    }
    out.push(check("spectral_equivalence", ok, details.join("; ")));

    let mut details = Vec::new();
    let mut ok = true;
    for eps in [1, 2, 3] {
        for g in [0.5, 1.0, 2.0] {
            let grid = Grid::for_ground_state(eps, g, 1000).expect("valid grid");
            match spectrum_compare(eps, g, &grid, &SpectrumOptions { k: 8, ..Default::default() }) {
                Ok(r) => {
                    let pass = r.positive && r.decomposition_closes;
                    ok &= pass;
                    let worst = r.closure_errors.iter().copied().fold(0.0, f64::max);
                    if !pass {
                        details.push(format!(
                            "eps={eps} g={g}: min E(H) {:.3e}, closure {worst:.3e}",
                            r.min_eigenvalue_big_h
                        ));
                    }
                }
                Err(e) => {
                    ok = false;
                    details.push(format!("eps={eps} g={g}: {e}"));
                }
            }
        }
    }
    out.push(check("positivity", ok, details.join("; ")));
    out
}

fn ground_states() -> Vec<CheckResult> {
    let mut out = Vec::new();

    let mut failures = Vec::new();
    for eps in 1..=5 {
        match verify_zero_mode(eps) {
            Ok(r) if r.is_zero_mode() => {}
            Ok(r) => failures.push(format!("eps={eps}: residual {}", r.residual_h)),
            Err(e) => failures.push(format!("eps={eps}: {e}")),
        }
        let control = printed_exponent(eps).and_then(|w| verify_zero_mode_with(eps, &w));
        if !matches!(control, Ok(ref r) if !r.residual_h.is_zero()) {
            failures.push(format!("eps={eps}: control exponent was not rejected"));
        }
    }
    let schedule = [(1000, 8.0), (2000, 10.0), (4000, 12.0)];
    for (eps, g) in [(1, 2.0), (3, 1.0)] {
        match e0_convergence(eps, g, &schedule) {
            Ok(est) => {
                let last = est.last().map_or(f64::INFINITY, |e| e.e0.abs());
                let monotone = est.windows(2).all(|w| w[1].e0.abs() <= w[0].e0.abs());
                if !(monotone && last <= 1e-3) {
                    failures.push(format!("eps={eps}: E0 estimates {:?}", est.iter().map(|e| e.e0).collect::<Vec<_>>()));
                }
            }
            Err(e) => failures.push(format!("eps={eps}: {e}")),
        }
    }
    out.push(check("zero_mode", failures.is_empty(), failures.join("; ")));

    let mut failures = Vec::new();
    let expect = [
        (1, Integrability::Normalizable),
        (3, Integrability::Normalizable),
        (5, Integrability::Normalizable),
        (0, Integrability::NonNormalizable),
        (2, Integrability::NonNormalizable),
        (4, Integrability::NonNormalizable),
        (-1, Integrability::Undefined),
        (-3, Integrability::Undefined),
    ];
    for (eps, want) in expect {
        match integrability_classifier(eps, 1.0) {
            Ok(v) if v == want => {}
            other => failures.push(format!("eps={eps}: {other:?}")),
        }
        if eps >= 0 {
            match tail_diagnostics(eps, 1.0) {
                Ok(t) if t.consistent => {}
                Ok(_) => failures.push(format!("eps={eps}: tail behaviour disagrees")),
                Err(e) => failures.push(format!("eps={eps}: {e}")),
            }
        }
    }
    out.push(check("integrability_parity", failures.is_empty(), failures.join("; ")));

    let harmonic = polynomial_eigenfunctions(1, 2.0, 8);
    let cubic = polynomial_eigenfunctions(2, 1.0, 12);
    let ok = harmonic.len() == 9
        && hermite_recurrence_holds(&harmonic, 2.0)
        && cubic.len() == 1
        && cubic[0].degree == 0;
    out.push(check(
        "polynomial_eigenfunctions",
        ok,
        format!("eps=1: {} pairs; eps=2: {} pairs", harmonic.len(), cubic.len()),
    ));
    out
}

fn randomized(seed: u64) -> Vec<CheckResult> {
    let mut rng = seeded(seed);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=200usize);
        let t = random_sym_tridiagonal(&mut rng, n);
        let ql = eig_sym_tridiag(&t).map(|r| r.real_parts());
        let sturm = bisect_range(&t, 0..n);
        let scale = t.norm_inf().max(1.0);
        let agree = ql.is_ok_and(|v| v.iter().zip(&sturm).all(|(a, b)| (a - b).abs() <= 1e-10 * scale));
        if !agree {
            bad += 1;
        }
    }
    let mut out = vec![check("ql_vs_sturm", bad == 0, format!("{bad} of 100 disagree"))];

    let mut bad = 0;
    for _ in 0..1000 {
        let a = random_operator(&mut rng);
        if parse(&format(&a)).ok() != Some(a) {
            bad += 1;
        }
    }
    out.push(check("parse_round_trip", bad == 0, format!("{bad} of 1000 fail")));
    out
}

pub fn run_suite(opts: &SuiteOptions) -> SuiteSummary {
    let mut checks = symbolic(opts);
    checks.extend(spectral());
    checks.extend(ground_states());
    checks.extend(randomized(opts.seed));
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().all(|c| c.passed);
    SuiteSummary { seed: opts.seed, passed, checks }
}
