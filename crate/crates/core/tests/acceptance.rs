//! Acceptance run: one [PASS]/[FAIL] line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;

use pseudoherm::analysis::{
    e0_convergence, hermite_recurrence_holds, integrability_classifier, polynomial_eigenfunctions, printed_exponent,
    spectrum_compare, tail_diagnostics, verify_zero_mode, verify_zero_mode_with, Integrability, SpectrumOptions,
    SpectrumReport,
};
use pseudoherm::coeff::{Coefficient, ComplexRational};
use pseudoherm::eig::{bisect_range, eig_sym_tridiag};
use pseudoherm::lattice::{discretize_hermitian, Grid};
use pseudoherm::opalg::{
    bch_conjugate_truncated, build_class_hamiltonian, conjugate_by_exp, derive_metric, hermitian_equivalent,
    pseudo_hermiticity_residual,
};
use pseudoherm::random::{random_operator, random_sym_tridiagonal, seeded};
use pseudoherm::{format, parse, Variant, XFunction};

const VARIANTS: [Variant; 2] = [Variant::Plain, Variant::Symmetrized];

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { ok: true, notes: Vec::new() }
    }

    fn require(&mut self, cond: bool, note: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            self.notes.push(note());
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for eps in [-1, 1, 2, 3, 4, 5] {
        let want = if eps == -1 {
            XFunction::log(Coefficient::g())
        } else {
            XFunction::monomial(eps + 1, Coefficient::monomial(1, ComplexRational::ratio(1, eps as i64 + 1)))
        };
        match derive_metric(eps) {
            Ok(q) => {
                out.require(q == want, || format!("eps={eps}: Q = {q}"));
                for v in VARIANTS {
                    let r = pseudo_hermiticity_residual(&q, &build_class_hamiltonian(eps, v));
                    out.require(r.is_zero(), || format!("eps={eps} {v}: residual {r}"));
                }
            }
            Err(e) => out.require(false, || format!("eps={eps}: {e}")),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    out.require(elapsed < 1.0, || format!("took {elapsed:.2} s"));
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let mut cases = vec![
        (1, Variant::Plain, "p^2 + 1/4*g^2*x^2 - 1/2*g".to_string()),
        (2, Variant::Plain, "p^2 + 1/4*g^2*x^4 - g*x".to_string()),
        (3, Variant::Plain, "p^2 + 1/4*g^2*x^6 - 3/2*g*x^2".to_string()),
        (-1, Variant::Plain, "p^2 + (g^2 + 2*g)*(1/4)*x^-2".to_string()),
    ];
    for eps in 1..=5 {
        cases.push((eps, Variant::Symmetrized, format!("p^2 + 1/4*g^2*x^{}", 2 * eps)));
    }
    for (eps, v, text) in cases {
        let want = parse(&text).expect("reference parses");
        match hermitian_equivalent(eps, v) {
            Ok(h) => out.require(h == want, || format!("eps={eps} {v}: {}", format(&h))),
            Err(e) => out.require(false, || format!("eps={eps} {v}: {e}")),
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    for eps in -1..=5 {
        let q = match derive_metric(eps) {
            Ok(q) => q,
            Err(e) => {
                out.require(false, || format!("eps={eps}: {e}"));
                continue;
            }
        };
        for v in VARIANTS {
            let h = build_class_hamiltonian(eps, v);
            let bch = bch_conjugate_truncated(&q, &h, 10);
            out.require(bch.terminated && bch.order <= 3, || format!("eps={eps} {v}: order {}", bch.order));
            out.require(bch.result == conjugate_by_exp(&q, &h), || format!("eps={eps} {v}: BCH differs"));
        }
    }
    out
}

/// Trace identity for the h solver (QL) and the H solver (Francis).
fn trace_identity(r: &SpectrumReport, out: &mut Outcome, label: &str) {
    out.require(rel(r.trace_h, r.eigenvalue_sum_h) <= 1e-10, || {
        format!("{label}: h trace {} vs {}", r.trace_h, r.eigenvalue_sum_h)
    });
    out.require(rel(r.trace_big_h, r.eigenvalue_sum_big_h) <= 1e-10, || {
        format!("{label}: H trace {} vs {}", r.trace_big_h, r.eigenvalue_sum_big_h)
    });
}

fn criterion_4(reports: &mut Vec<SpectrumReport>) -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let cases = [(1, 2.0, 10.0, 4000, 8), (2, 1.0, 10.0, 2000, 5), (3, 1.0, 6.0, 2000, 5), (2, 2.0, 8.0, 2000, 5)];
    for (eps, g, l, n, k) in cases {
        let label = format!("eps={eps} g={g}");
        let grid = Grid::new(l, n).expect("grid");
        let r = match spectrum_compare(eps, g, &grid, &SpectrumOptions { k, ..Default::default() }) {
            Ok(r) => r,
            Err(e) => {
                out.require(false, || format!("{label}: {e}"));
                continue;
            }
        };
        if eps == 1 {
            for (i, e) in r.eigenvalues_h.iter().enumerate() {
                let exact = g * i as f64;
                out.require((e - exact).abs() <= 5e-3, || format!("{label}: E_{i} = {e}"));
            }
        }
        for (i, im) in r.eigenvalues_big_h_im.iter().enumerate() {
            out.require(im.abs() <= 1e-8 * r.norm_big_h, || format!("{label}: Im E_{i} = {im}"));
        }
        for (i, d) in r.deviations.iter().enumerate() {
            out.require(*d <= 1e-3, || format!("{label}: level {i} deviates by {d}"));
        }
        // second route on the same h: Sturm bisection
        let h = discretize_hermitian(eps, g, &grid).expect("h");
        let sturm = bisect_range(&h, 0..k);
        for (i, (a, b)) in sturm.iter().zip(&r.eigenvalues_h).enumerate() {
            out.require((a - b).abs() <= 1e-3, || format!("{label}: level {i} QL {b} vs Sturm {a}"));
        }
        trace_identity(&r, &mut out, &label);
        reports.push(r);
    }
    let elapsed = start.elapsed().as_secs_f64();
    out.require(elapsed < 30.0, || format!("took {elapsed:.1} s"));
    out
}

fn criterion_5(reports: &mut Vec<SpectrumReport>) -> Outcome {
    let mut out = Outcome::new();
    for eps in [1, 2, 3] {
        for g in [0.5, 1.0, 2.0] {
            let label = format!("eps={eps} g={g}");
            let grid = Grid::for_ground_state(eps, g, 1000).expect("grid");
            let r = match spectrum_compare(eps, g, &grid, &SpectrumOptions::default()) {
                Ok(r) => r,
                Err(e) => {
                    out.require(false, || format!("{label}: {e}"));
                    continue;
                }
            };
            for e in &r.eigenvalues_big_h {
                out.require(*e >= -1e-8, || format!("{label}: H eigenvalue {e}"));
            }
            for (i, (t, e)) in r.positivity.iter().zip(&r.eigenvalues_h).enumerate() {
                let closure = (t.total - e).abs() / (t.kinetic + t.potential);
                out.require(closure <= 1e-6, || format!("{label}: level {i} closes to {closure:e}"));
            }
            trace_identity(&r, &mut out, &label);
            reports.push(r);
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    for eps in 1..=5 {
        match verify_zero_mode(eps) {
            Ok(r) => out.require(r.is_zero_mode(), || format!("eps={eps}: residual {}", r.residual_h)),
            Err(e) => out.require(false, || format!("eps={eps}: {e}")),
        }
        let control = printed_exponent(eps).and_then(|w| verify_zero_mode_with(eps, &w));
        match control {
            Ok(r) => out.require(!r.residual_h.is_zero(), || format!("eps={eps}: printed exponent accepted")),
            Err(e) => out.require(false, || format!("eps={eps}: control {e}")),
        }
    }
    for (eps, g) in [(1, 2.0), (3, 1.0)] {
        match e0_convergence(eps, g, &[(1000, 8.0), (2000, 10.0), (4000, 12.0)]) {
            Ok(est) => {
                let last = est.last().expect("non-empty schedule");
                out.require(last.e0.abs() <= 1e-3, || format!("eps={eps}: E0 = {}", last.e0));
            }
            Err(e) => out.require(false, || format!("eps={eps}: {e}")),
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
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
        let got = integrability_classifier(eps, 1.0);
        out.require(got.as_ref() == Ok(&want), || format!("eps={eps}: {got:?}"));
        if eps >= 0 {
            match tail_diagnostics(eps, 1.0) {
                Ok(t) => out.require(t.consistent, || format!("eps={eps}: tails {:?}", t.values)),
                Err(e) => out.require(false, || format!("eps={eps}: {e}")),
            }
        }
    }
    out
}

/// `-psi'' + g x psi'` on ascending coefficients, independent of the library.
fn harmonic_action(c: &[BigRational], g: &BigRational) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); c.len()];
    for (n, cn) in c.iter().enumerate() {
        let nq = BigRational::from_integer(n.into());
        if n >= 2 {
            out[n - 2] -= cn * &nq * BigRational::from_integer((n - 1).into());
        }
        out[n] += cn * &nq * g;
    }
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let g = BigRational::from_integer(2.into());
    let pairs = polynomial_eigenfunctions(1, 2.0, 8);
    out.require(pairs.len() == 9, || format!("eps=1: {} pairs", pairs.len()));
    for (n, p) in pairs.iter().enumerate() {
        let e = BigRational::from_integer((2 * n).into());
        out.require(p.eigenvalue == e, || format!("pair {n}: E = {}", p.eigenvalue));
        let lhs = harmonic_action(&p.coefficients, &g);
        let rhs: Vec<BigRational> = p.coefficients.iter().map(|c| c * &e).collect();
        out.require(lhs == rhs, || format!("pair {n}: not an eigenfunction"));
    }
    out.require(hermite_recurrence_holds(&pairs, 2.0), || "recurrence fails".into());
    let cubic = polynomial_eigenfunctions(2, 1.0, 12);
    out.require(cubic.len() == 1 && cubic[0].degree == 0, || format!("eps=2: {} pairs", cubic.len()));
    out
}

fn criterion_9(reports: &[SpectrumReport]) -> Outcome {
    let mut out = Outcome::new();
    let mut rng = seeded(9);
    for trial in 0..100 {
        let n = 1 + (trial * 37) % 200;
        let t = random_sym_tridiagonal(&mut rng, n);
        let scale = t.norm_inf();
        let ql = match eig_sym_tridiag(&t) {
            Ok(r) => r.real_parts(),
            Err(e) => {
                out.require(false, || format!("trial {trial}: {e}"));
                continue;
            }
        };
        let sturm = bisect_range(&t, 0..n);
        let worst = ql.iter().zip(&sturm).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.require(worst <= 1e-10 * scale, || format!("trial {trial}: QL vs Sturm {worst:e}"));
        let trace = t.trace();
        for (name, values) in [("QL", &ql), ("Sturm", &sturm)] {
            let sum: f64 = values.iter().sum();
            out.require((sum - trace).abs() <= 1e-10 * scale * n as f64, || {
                format!("trial {trial}: {name} sum {sum} vs trace {trace}")
            });
        }
    }
    out.require(!reports.is_empty(), || "no acceptance matrices".into());
    for r in reports {
        trace_identity(r, &mut out, &format!("eps={} g={} N={}", r.epsilon, r.g, r.n));
    }
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = seeded(10);
    for i in 0..1000 {
        let a = random_operator(&mut rng);
        let text = format(&a);
        match parse(&text) {
            Ok(b) => out.require(a == b, || format!("#{i}: {text}")),
            Err(e) => out.require(false, || format!("#{i}: {text}: {e}")),
        }
    }
    let anchored = [
        ("p^2 + 1i*g*x^2*p", 2, Variant::Plain),
        ("p^2 + 1i*g*x*p", 1, Variant::Plain),
        ("p^2 + 1i*g*x^3*p", 3, Variant::Plain),
    ];
    for (text, eps, v) in anchored {
        match parse(text) {
            Ok(h) => out.require(h == build_class_hamiltonian(eps, v), || format!("{text}: {}", format(&h))),
            Err(e) => out.require(false, || format!("{text}: {e}")),
        }
    }
    out
}

fn main() -> ExitCode {
    let mut reports = Vec::new();
    let mut all = true;
    let mut report = |n: usize, title: &str, o: Outcome| {
        all &= o.ok;
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {n}. {title}");
        for note in o.notes.iter().take(10) {
            println!("       {note}");
        }
    };
    report(1, "symbolic metric", criterion_1());
    report(2, "Hermitian images", criterion_2());
    report(3, "BCH termination", criterion_3());
    report(4, "spectral equivalence", criterion_4(&mut reports));
    report(5, "positivity", criterion_5(&mut reports));
    report(6, "zero mode", criterion_6());
    report(7, "integrability parity", criterion_7());
    report(8, "polynomial eigenfunctions", criterion_8());
    report(9, "eigensolver oracles", criterion_9(&reports));
    report(10, "parser", criterion_10());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
