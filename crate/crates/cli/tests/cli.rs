use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BUNDLED: &[&str] = &[
    "tetrahedron",
    "esselmann",
    "mirror_double",
    "cube_a",
    "cube_b",
    "cube_c",
    "dodecahedron",
    "loebell5",
    "loebell6",
    "loebell7",
    "loebell8",
];

fn coxdeform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxdeform"))
        .args(args)
        .env_remove("COXDEFORM_BUILTIN_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn bundled_document(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn tetrahedron_dimension_report() {
    let out = coxdeform(&["dim", "tetrahedron"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(&out);
    let s = &report["summary"];
    assert_eq!(s["dimension"], 0);
    assert_eq!(s["rank_phi"], 13);
    assert_eq!(s["full_rank"], true);
    assert_eq!(s["kernel_psi"], 6);
    assert_eq!(s["rank_sum_holds"], true);
    assert_eq!(report["config"]["tol"].as_f64(), Some(1e-9));
    assert_eq!(report["config"]["seed"], 0);
}

#[test]
fn esselmann_curve_passes_through_the_singular_point() {
    let out = coxdeform(&["curve", "esselmann"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# coxdeform curve esselmann tol=1e-9"));
    assert_eq!(lines.next(), Some("x,y,det"));
    let samples: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    assert_eq!(samples.len(), 101 * 101);
    // The determinant changes sign in every neighbourhood of (1, 1).
    let near: Vec<f64> = samples
        .iter()
        .filter(|[x, y, _]| (x - 1.0).abs() < 0.05 && (y - 1.0).abs() < 0.05)
        .map(|s| s[2])
        .collect();
    assert!(near.iter().any(|&d| d > 0.0) && near.iter().any(|&d| d < 0.0));

    let out = coxdeform(&["curve", "esselmann", "--format", "json", "--res", "41"]);
    let report = json(&out);
    let closest = report["curve"]["contour"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|line| line.as_array().unwrap().iter())
        .map(|p| (p[0].as_f64().unwrap() - 1.0).hypot(p[1].as_f64().unwrap() - 1.0))
        .fold(f64::INFINITY, f64::min);
    assert!(closest < 0.03, "{closest}");
    assert_eq!(report["singular_point"]["value"].as_f64(), Some(0.0));
}

#[test]
fn doubled_cube_is_not_weakly_orderable() {
    let out = coxdeform(&["check", "mirror_double"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["weakly_orderable"], false);
    assert_eq!(report["weak_order"]["outcome"], "stuck");
    let certificate: Vec<u64> =
        report["weak_order"]["certificate"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(certificate, (0..9).collect::<Vec<_>>());
}

#[test]
fn every_bundled_example_checks() {
    for name in BUNDLED {
        let out = coxdeform(&["check", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        let report = json(&out);
        assert_eq!(report["valid"], true, "{name}");
        assert_eq!(report["input"]["name"], *name);
    }
}

#[test]
fn order_one_is_reported_with_its_ridge() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = bundled_document("tetrahedron");
    doc["orders"][4] = serde_json::json!([2, 4, 1]);
    doc["ridges"][0] = serde_json::json!([1, 12]);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = coxdeform(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("schema error at /orders/4/2: ridge (2, 4) has order 1"), "{err}");
    assert!(err.contains("semantic error at /ridges/0/1: facet 12 does not exist"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"n\": 3,").unwrap();
    let out = coxdeform(&["dim", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("parse error"));
    let out = coxdeform(&["check", "no_such_orbifold"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("input error"));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["stats", "dodecahedron", "--d", "7,20", "--samples", "400", "--seed", "17"][..],
        &["dim", "cube_c"][..],
        &["stats", "prism3", "--mode", "exact", "--d", "7,8", "--format", "csv"][..],
    ] {
        let a = coxdeform(args);
        let b = coxdeform(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seeds_change_sampled_reports() {
    let a = json(&coxdeform(&["stats", "prism4", "--d", "5", "--samples", "300", "--seed", "1"]));
    let b = json(&coxdeform(&["stats", "prism4", "--d", "5", "--samples", "300", "--seed", "2"]));
    assert_eq!(a["config"]["seed"], 1);
    assert_ne!(a["results"], b["results"]);
    assert!(a["counting"].as_str().unwrap().starts_with("labeled assignments"));
}

#[test]
fn stats_csv_has_one_row_per_bound() {
    let out = coxdeform(&["stats", "cube", "--mode", "exact", "--d", "4,5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines, ["d,fraction,ci_low,ci_high", "4,1,1,1", "5,1,1,1"]);
    let out = coxdeform(&["stats", "dodecahedron", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("budget"));
}

#[test]
fn numbers_carry_at_most_twelve_significant_digits() {
    let out = coxdeform(&["realize", "loebell5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut seen = 0;
    for token in text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-')) {
        let mantissa = token.split('e').next().unwrap().trim_start_matches('-');
        if mantissa.contains('.') {
            let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
            assert!(digits.trim_start_matches('0').trim_end_matches('0').len() <= 12, "{token}");
            seen += 1;
        }
    }
    assert!(seen > 50);
}

#[test]
fn uncertain_ranks_need_force() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.json");
    std::fs::write(&path, "[[2, -1], [-1, 2]]").unwrap();
    let p = path.to_str().unwrap();
    // A threshold between the singular values 3 and 1 is not a confident cut.
    let out = coxdeform(&["cartan", p, "--rank-tol", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--force"));
    assert_eq!(json(&out)["classification"]["rank"]["uncertain"], true);
    let out = coxdeform(&["cartan", p, "--rank-tol", "0.2", "--force"]);
    assert_eq!(out.status.code(), Some(0));
    let out = coxdeform(&["cartan", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["classification"]["class"], "elliptic");
}

#[test]
fn cartan_reports_for_bundled_and_file_matrices() {
    let report = json(&coxdeform(&["cartan", "tetrahedron"]));
    assert_eq!(report["conditions_passed"], true);
    assert_eq!(report["classification"]["class"], "negative_irreducible");
    assert!(report["factorization"]["reconstruction_error"].as_f64().unwrap() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "[[2, 0.5], [-1, 2]]").unwrap();
    let out = coxdeform(&["cartan", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["conditions"]["violations"][0]["condition"], "sign_pattern");
}

#[test]
fn newton_failure_is_a_numerical_error() {
    let out = coxdeform(&["realize", "cube_a", "--tol", "1e-40"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("realization"));
}

#[test]
fn builtin_directory_can_be_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = bundled_document("tetrahedron");
    doc["name"] = "relabelled".into();
    std::fs::write(dir.path().join("tetrahedron.json"), serde_json::to_string(&doc).unwrap()).unwrap();
    let run = |name: &str| {
        Command::new(env!("CARGO_BIN_EXE_coxdeform"))
            .args(["check", name])
            .env("COXDEFORM_BUILTIN_DIR", dir.path())
            .output()
            .unwrap()
    };
    let out = run("tetrahedron");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["input"]["name"], "relabelled");
    let out = run("cube_a");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("COXDEFORM_BUILTIN_DIR"));
}

#[test]
fn reports_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = coxdeform(&["check", "cube_b", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["counts"]["e_plus"], 8);
}

#[test]
fn bad_arguments_are_rejected() {
    assert_eq!(coxdeform(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(coxdeform(&["dim", "tetrahedron", "--tol", "-1"]).status.code(), Some(1));
    assert_eq!(coxdeform(&["curve", "other"]).status.code(), Some(1));
    assert_eq!(coxdeform(&["--help"]).status.code(), Some(0));
}
