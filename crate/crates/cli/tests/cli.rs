use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoherm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn derive_prints_exact_forms() {
    let o = run(&["derive", "--epsilon", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("Q = (1/3)g x^3"), "{s}");
    assert!(s.contains("h = p^2 + (1/4)g^2 x^4 - g x"), "{s}");
    assert!(s.contains("residual = 0"));

    let s = stdout(&run(&["derive", "--epsilon", "1"]));
    assert!(s.contains("Q = (1/2)g x^2"));
    assert!(s.contains("h = p^2 + (1/4)g^2 x^2 - (1/2)g"));

    let o = run(&["derive", "--epsilon", "-1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["Q"], "g ln(x)");
    assert_eq!(v["h"], "p^2 + (1/4)g^2 x^-2 + (1/2)g x^-2");
    assert_eq!(v["certified"], true);
}

#[test]
fn parse_echoes_canonical_form() {
    assert_eq!(stdout(&run(&["parse", "{x,p}"])), "2 x p - (1i)\n");
    let o = run(&["parse", "p^2 + 1i*g*x^2*p", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["canonical"], "p^2 + (1i)g x^2 p");
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["parse", "x^1.5"]).status.code(), Some(64));
    assert_eq!(run(&["parse", "x $ p"]).status.code(), Some(64));
    assert_eq!(run(&["spectrum", "--N", "2"]).status.code(), Some(64));
    assert_eq!(run(&["spectrum", "--L", "-1"]).status.code(), Some(64));
    assert_eq!(run(&["nonsense"]).status.code(), Some(64));
    assert_eq!(run(&["groundstate", "--g", "0"]).status.code(), Some(64));
}

#[test]
fn spectrum_acceptance_run_as_csv() {
    let o = run(&["spectrum", "--epsilon", "1", "--g", "2", "--N", "4000", "--L", "10", "--k", "8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let dev: f64 = r[4].parse().unwrap();
        assert!(dev <= 1e-3);
    }
}

#[test]
fn spectrum_checks_and_controls() {
    let o = run(&["spectrum", "--epsilon", "2", "--g", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["real_spectrum"], true);
    assert_eq!(v["positive"], true);

    let o = run(&["spectrum", "--epsilon", "1", "--g", "0", "--N", "600", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for (a, b) in v["eigenvalues_h"].as_array().unwrap().iter().zip(v["eigenvalues_H"].as_array().unwrap()) {
        assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-9);
    }

    // a coarse grid cannot meet the deviation tolerance
    assert_eq!(run(&["spectrum", "--epsilon", "1", "--g", "2", "--N", "200", "--k", "8"]).status.code(), Some(3));
    // node at the origin for a singular member
    assert_eq!(run(&["spectrum", "--epsilon", "-1", "--N", "201"]).status.code(), Some(4));
}

#[test]
fn groundstate_verdicts() {
    let o = run(&["groundstate", "--epsilon", "1", "--g", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "normalizable");
    assert!((v["normalization"].as_f64().unwrap() - 0.7511).abs() < 1e-4);

    let s = stdout(&run(&["groundstate", "--epsilon", "2", "--g", "1"]));
    assert!(s.contains("verdict = non-normalizable"));

    let o = run(&["groundstate", "--epsilon", "-3", "--g", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict = undefined"));

    let o = run(&["groundstate", "--epsilon", "1", "--g", "2", "--format", "csv", "--samples", "5"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "x,phi0");
}

#[test]
fn verify_is_deterministic_and_catches_a_wrong_metric() {
    let a = run(&["verify", "--seed", "7", "--format", "json"]);
    let b = run(&["verify", "--seed", "7", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);

    let bad = run(&["verify", "--inject-wrong-metric", "--format", "json"]);
    assert_eq!(bad.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["hermitian_images", "symbolic_metric"]);
}
