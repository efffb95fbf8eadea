use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pseudoherm::analysis::{
    ground_state_closed_form, integrability_classifier, run_suite, spectrum_compare, AnalysisError, Integrability,
    SpectrumOptions, SuiteOptions,
};
use pseudoherm::hparser::{term_table, TermRow};
use pseudoherm::lattice::Grid;
use pseudoherm::opalg::{build_class_hamiltonian, derive_metric, hermitian_equivalent, pseudo_hermiticity_residual};
use pseudoherm::{format, parse, Variant};

const EXIT_DERIVE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_NUMERIC: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pseudoherm", version, about = "Metric operators and spectra for H = p^2 + i g x^eps p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    epsilon: i32,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    g: f64,
    /// Interior lattice points.
    #[arg(long = "N", global = true, default_value_t = 2000)]
    n: usize,
    /// Half-width of the box.
    #[arg(long = "L", global = true, default_value_t = 10.0, allow_negative_numbers = true)]
    l: f64,
    /// Number of levels.
    #[arg(long, global = true, default_value_t = 8)]
    k: usize,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Plain)]
    variant: VariantArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the metric Q and the Hermitian image h.
    Derive,
    /// Parse an expression and echo its canonical form.
    Parse {
        #[arg(allow_hyphen_values = true)]
        expression: String,
    },
    /// Compare the lattice spectra of h and H.
    Spectrum,
    /// Closed-form ground state and its integrability.
    Groundstate {
        /// Number of profile samples on [-L, L].
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Run the full verification suite.
    Verify {
        #[arg(long, hide = true)]
        inject_wrong_metric: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Plain,
    Symmetrized,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Symmetrized => Variant::Symmetrized,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

type Outcome = Result<u8, Failure>;

fn emit(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| fail(EXIT_NUMERIC, e))?;
    Ok(0)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct DeriveOutput {
    epsilon: i32,
    variant: Variant,
    #[serde(rename = "H")]
    big_h: String,
    #[serde(rename = "Q")]
    q: String,
    h: String,
    residual: String,
    certified: bool,
}

fn cmd_derive(cli: &Cli) -> Outcome {
    let variant = cli.variant.into();
    let q = derive_metric(cli.epsilon).map_err(|e| fail(EXIT_DERIVE, e))?;
    let h = hermitian_equivalent(cli.epsilon, variant).map_err(|e| fail(EXIT_DERIVE, e))?;
    let big_h = build_class_hamiltonian(cli.epsilon, variant);
    let residual = pseudo_hermiticity_residual(&q, &big_h);
    let out = DeriveOutput {
        epsilon: cli.epsilon,
        variant,
        big_h: format(&big_h),
        q: q.to_string(),
        h: format(&h),
        residual: format(&residual),
        certified: residual.is_zero(),
    };
    let text = match cli.format {
        Format::Json => to_json(&out),
        Format::Csv => csv_rows(&["epsilon", "variant", "H", "Q", "h", "residual"], &[vec![
            out.epsilon.to_string(),
            out.variant.to_string(),
            out.big_h.clone(),
            out.q.clone(),
            out.h.clone(),
            out.residual.clone(),
        ]])?,
        Format::Text => format!("H = {}\nQ = {}\nh = {}\nresidual = {}\n", out.big_h, out.q, out.h, out.residual),
    };
    emit(&text)?;
    if out.certified {
        Ok(0)
    } else {
        Err(fail(EXIT_DERIVE, "metric residual is not zero"))
    }
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| fail(EXIT_NUMERIC, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| fail(EXIT_NUMERIC, e))?;
    }
    let bytes = w.into_inner().map_err(|e| fail(EXIT_NUMERIC, e))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

#[derive(Serialize)]
struct ParseOutput {
    canonical: String,
    terms: Vec<TermRow>,
}

fn cmd_parse(cli: &Cli, expression: &str) -> Outcome {
    let op = parse(expression).map_err(|e| fail(EXIT_USAGE, format!("{e}\n  {expression}\n  {}^", " ".repeat(e.offset))))?;
    let out = ParseOutput { canonical: format(&op), terms: term_table(&op) };
    let text = match cli.format {
        Format::Text => format!("{}\n", out.canonical),
        Format::Json => to_json(&out),
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .terms
                .iter()
                .map(|t| vec![t.xpow.to_string(), t.ppow.to_string(), t.gpow.to_string(), t.re.clone(), t.im.clone()])
                .collect();
            csv_rows(&["xpow", "ppow", "gpow", "re", "im"], &rows)?
        }
    };
    emit(&text)
}

fn numeric_failure(e: AnalysisError) -> Failure {
    match e {
        AnalysisError::TooManyLevels { .. } | AnalysisError::Domain { .. } => fail(EXIT_USAGE, e),
        AnalysisError::Derive(_) => fail(EXIT_DERIVE, e),
        _ => fail(EXIT_NUMERIC, e),
    }
}

fn cmd_spectrum(cli: &Cli) -> Outcome {
    let grid = Grid::new(cli.l, cli.n).map_err(|e| fail(EXIT_USAGE, e))?;
    let opts = SpectrumOptions { k: cli.k, variant: cli.variant.into(), ..Default::default() };
    let report = spectrum_compare(cli.epsilon, cli.g, &grid, &opts).map_err(numeric_failure)?;
    let text = match cli.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| fail(EXIT_NUMERIC, e))?;
            String::from_utf8(buf).expect("utf-8")
        }
        Format::Text => {
            let mut s = format!(
                "epsilon = {}, g = {}, N = {}, L = {}, spacing = {:.16e}, variant = {}\n",
                report.epsilon, report.g, report.n, report.l, report.spacing, report.variant
            );
            s.push_str(&format!("{:>5} {:>24} {:>24} {:>24}\n", "level", "E(h)", "E(H)", "deviation"));
            for i in 0..report.k {
                s.push_str(&format!(
                    "{:>5} {:>24.16e} {:>24.16e} {:>24.16e}\n",
                    i, report.eigenvalues_h[i], report.eigenvalues_big_h[i], report.deviations[i]
                ));
            }
            s.push_str(&format!(
                "max deviation = {:.16e}\nmax |Im E(H)| = {:.16e}\nmin E(H) = {:.16e}\nverdict = {}\n",
                report.max_deviation, report.max_im, report.min_eigenvalue_big_h, report.verdict
            ));
            s
        }
    };
    emit(&text)?;
    Ok(if report.passed() { 0 } else { EXIT_VERIFY })
}

#[derive(Serialize)]
struct GroundStateOutput {
    epsilon: i32,
    g: f64,
    exponent: Option<String>,
    verdict: Integrability,
    normalization: Option<f64>,
    note: Option<String>,
    profile: Vec<[f64; 2]>,
}

fn cmd_groundstate(cli: &Cli, samples: usize) -> Outcome {
    let samples = if cli.format == Format::Csv && samples == 0 { 201 } else { samples };
    let verdict = integrability_classifier(cli.epsilon, cli.g).map_err(numeric_failure)?;
    let mut out = GroundStateOutput {
        epsilon: cli.epsilon,
        g: cli.g,
        exponent: None,
        verdict,
        normalization: None,
        note: None,
        profile: Vec::new(),
    };
    match ground_state_closed_form(cli.epsilon, cli.g) {
        Ok(gs) => {
            out.exponent = Some(gs.exponent.to_string());
            out.normalization = gs.normalization;
            if samples > 0 {
                let step = if samples > 1 { 2.0 * cli.l / (samples - 1) as f64 } else { 0.0 };
                out.profile = (0..samples)
                    .map(|i| {
                        let x = -cli.l + step * i as f64;
                        [x, gs.eval(x)]
                    })
                    .collect();
            }
        }
        Err(e @ AnalysisError::UndefinedExponent { .. }) => out.note = Some(e.to_string()),
        Err(e) => return Err(numeric_failure(e)),
    }
    if out.verdict == Integrability::Undefined && out.note.is_none() {
        out.note = Some(format!("the class does not admit epsilon = {}", cli.epsilon));
    }
    let text = match cli.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                out.profile.iter().map(|[x, y]| vec![format!("{x:.16e}"), format!("{y:.16e}")]).collect();
            csv_rows(&["x", "phi0"], &rows)?
        }
        Format::Text => {
            let mut s = format!("epsilon = {}, g = {}\n", out.epsilon, out.g);
            if let Some(w) = &out.exponent {
                s.push_str(&format!("phi0 = C exp(-W), W = {w}\n"));
            }
            s.push_str(&format!("verdict = {}\n", out.verdict));
            if let Some(c) = out.normalization {
                s.push_str(&format!("C = {c:.16e}\n"));
            }
            if let Some(n) = &out.note {
                s.push_str(&format!("note: {n}\n"));
            }
            for [x, y] in &out.profile {
                s.push_str(&format!("{x:.16e} {y:.16e}\n"));
            }
            s
        }
    };
    emit(&text)
}

fn cmd_verify(cli: &Cli, inject_wrong_metric: bool) -> Outcome {
    let summary = run_suite(&SuiteOptions { seed: cli.seed, inject_wrong_metric });
    let text = match cli.format {
        Format::Json => to_json(&summary),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                summary.checks.iter().map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]).collect();
            csv_rows(&["check", "passed", "detail"], &rows)?
        }
        Format::Text => {
            let mut s = String::new();
            for c in &summary.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("[{tag}] {}", c.name));
                if !c.detail.is_empty() {
                    s.push_str(&format!(": {}", c.detail));
                }
                s.push('\n');
            }
            s
        }
    };
    emit(&text)?;
    Ok(if summary.passed { 0 } else { EXIT_VERIFY })
}

fn validate(cli: &Cli) -> Result<(), Failure> {
    if cli.n < 3 {
        return Err(fail(EXIT_USAGE, "--N must be at least 3"));
    }
    if !(cli.l > 0.0 && cli.l.is_finite()) {
        return Err(fail(EXIT_USAGE, "--L must be positive"));
    }
    if cli.k < 1 {
        return Err(fail(EXIT_USAGE, "--k must be at least 1"));
    }
    if !cli.g.is_finite() {
        return Err(fail(EXIT_USAGE, "--g must be finite"));
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    validate(cli)?;
    match &cli.command {
        Command::Derive => cmd_derive(cli),
        Command::Parse { expression } => cmd_parse(cli, expression),
        Command::Spectrum => cmd_spectrum(cli),
        Command::Groundstate { samples } => cmd_groundstate(cli, *samples),
        Command::Verify { inject_wrong_metric } => cmd_verify(cli, *inject_wrong_metric),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
