use std::io::Write;
use std::process::{Command, Output};

use toricpo::lte::LteValue;
use toricpo::ResidueReport;
use toricpo_cli::{AnalyzeReport, BettiReport, CatalogList, CriticalPointsReport, LteReport, PotentialReport};

fn toricpo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricpo"))
        .args(args)
        .env_remove("TORICPO_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_file(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

/// Parses JSON output into `T` and checks it serializes back to the same text.
fn round_trip<T: serde::de::DeserializeOwned + serde::Serialize>(text: &str) -> T {
    let value: T = serde_json::from_str(text).expect("output parses");
    assert_eq!(serde_json::to_string_pretty(&value).unwrap(), text.trim_end());
    value
}

#[test]
fn potential_of_cp3() {
    let out = stdout(&toricpo(&["potential", "--catalog", "simplex:3"]));
    assert!(out.contains("y1 + y2 + y3 + T (y1 y2 y3)^-1"), "{out}");
}

#[test]
fn potential_in_shifted_frame() {
    let out = stdout(&toricpo(&["potential", "--catalog", "simplex:2", "--u", "1/3,1/3", "--format", "json"]));
    let r: PotentialReport = round_trip(&out);
    let frame = r.frame.expect("frame requested");
    assert_eq!(frame.potential, "T^1/3 ybar1 + T^1/3 ybar2 + T^1/3 (ybar1 ybar2)^-1");
}

#[test]
fn critical_points_of_blowup() {
    let out = stdout(&toricpo(&["critical-points", "--catalog", "blowup1:0.4", "--format", "json"]));
    let r: CriticalPointsReport = round_trip(&out);
    assert_eq!(r.report.points.len(), 4);
    for p in &r.report.points {
        let u: Vec<f64> = p.u.iter().map(toricpo::rational::to_f64).collect();
        assert!((u[0] - 0.35).abs() < 1e-12 && (u[1] - 0.3).abs() < 1e-12, "{u:?}");
        assert!(p.nondegenerate);
    }
}

#[test]
fn lte_on_blowup2_segment() {
    let out = stdout(&toricpo(&["lte", "--catalog", "blowup2:0.5,0.25", "--u", "0.3,0.25"]));
    assert!(out.contains("strongly-bulk-balanced: true"), "{out}");
    let out = stdout(&toricpo(&["lte", "--catalog", "blowup2:0.5,0.25", "--u", "0.3,0.25", "--format", "json"]));
    match round_trip::<LteReport>(&out) {
        LteReport::Point { verdict, .. } => {
            assert!(verdict.balanced);
            let w = verdict.witness.unwrap();
            assert_eq!(w.ybar[0], LteValue::Free);
            let y2 = w.ybar[1].fixed().unwrap();
            assert!((y2.re + 1.0).abs() < 1e-12 && y2.im.abs() < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn lte_grid_on_hirzebruch() {
    let out = stdout(&toricpo(&[
        "lte", "--catalog", "hirzebruch:2,1/2", "--grid", "50", "--u", "3/4,1/4", "--format", "json",
    ]));
    match round_trip::<LteReport>(&out) {
        LteReport::Grid { grid, balanced, .. } => {
            assert_eq!(grid, 50);
            assert_eq!(balanced.len(), 1);
            assert_eq!(toricpo_cli::parse_point("3/4,1/4").unwrap(), balanced[0].u);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn betti_of_two_point_blowup() {
    let out = stdout(&toricpo(&["betti", "--catalog", "blowup2:0.5,0.25", "--format", "json"]));
    let r: BettiReport = round_trip(&out);
    assert_eq!(r.betti, 5);
    assert!(stdout(&toricpo(&["betti", "--catalog", "blowup2:0.5,0.25"])).starts_with("rank H = 5"));
}

#[test]
fn residue_check_on_hirzebruch() {
    let out = stdout(&toricpo(&["residue-check", "--catalog", "hirzebruch:2,1/3", "--format", "json"]));
    let r: ResidueReport = round_trip(&out);
    assert_eq!(r.points.len(), 4);
    assert!(r.trace.vanishes);
}

#[test]
fn analyze_round_trips() {
    let out = stdout(&toricpo(&["analyze", "--catalog", "blowup1:1/3", "--format", "json"]));
    let r: AnalyzeReport = round_trip(&out);
    assert_eq!(r.betti.betti, 4);
    assert!(r.morse.morse);
    assert!(r.residue.is_some());
}

#[test]
fn catalog_list_names_every_entry() {
    let out = stdout(&toricpo(&["catalog-list", "--format", "json"]));
    let r: CatalogList = round_trip(&out);
    let names: Vec<_> = r.entries.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names, ["simplex", "blowup1", "blowup2", "hirzebruch"]);
}

#[test]
fn polytope_file_input() {
    let json = r#"{"dim": 2, "facets": [
        {"normal": [1, 0], "constant": "0"},
        {"normal": [0, 1], "constant": "0"},
        {"normal": [-1, -1], "constant": "1"}
    ]}"#;
    let f = temp_file(json, ".json");
    let out = stdout(&toricpo(&["potential", "--polytope", f.path().to_str().unwrap()]));
    assert!(out.contains("y1 + y2 + T (y1 y2)^-1"), "{out}");
}

#[test]
fn malformed_json_is_a_validation_failure() {
    let f = temp_file("{\"dim\": 2, \"facets\": [\n  {\"normal\": [1, 0],", ".json");
    let out = toricpo(&["betti", "--polytope", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn invalid_inputs_exit_with_two() {
    for args in [
        &["potential", "--catalog", "nosuch:1"][..],
        &["potential", "--catalog", "blowup1:3/2"],
        &["potential", "--catalog", "simplex:2", "--u", "2,2"],
        &["potential", "--catalog", "simplex:2", "--truncation", "-1"],
        &["lte", "--catalog", "simplex:2"],
        &["betti"],
        &["no-such-command"],
    ] {
        let out = toricpo(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn config_file_sets_truncation_and_format() {
    let cfg = temp_file("truncation = \"2\"\nformat = \"json\"\n", ".toml");
    let out = Command::new(env!("CARGO_BIN_EXE_toricpo"))
        .args(["potential", "--catalog", "simplex:1"])
        .env("TORICPO_CONFIG", cfg.path())
        .output()
        .unwrap();
    let r: PotentialReport = round_trip(&stdout(&out));
    assert_eq!(r.truncation, "2");

    let out = toricpo(&["--config", cfg.path().to_str().unwrap(), "potential", "--catalog", "simplex:1", "--format", "text"]);
    assert!(stdout(&out).starts_with("PO = y1 + T y1^-1"));
}

#[test]
fn bad_config_is_rejected() {
    let cfg = temp_file("grid = \"many\"\n", ".toml");
    let out = toricpo(&["--config", cfg.path().to_str().unwrap(), "catalog-list"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn non_fano_warning_and_assume_fano() {
    let out = stdout(&toricpo(&["potential", "--catalog", "hirzebruch:3,1/3"]));
    assert!(out.contains("warning:"), "{out}");
    let out = stdout(&toricpo(&["potential", "--catalog", "hirzebruch:3,1/3", "--assume-fano"]));
    assert!(!out.contains("warning:"), "{out}");
}

#[test]
fn jobs_flag_is_accepted() {
    let out = stdout(&toricpo(&["--jobs", "2", "critical-points", "--catalog", "simplex:2"]));
    assert!(out.contains("3 critical point(s)"), "{out}");
}
