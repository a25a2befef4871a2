use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use apf_core::RamificationReport;

fn apf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apf")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_catalog_certifies() {
    let out = apf(&["analyze", "catalog", "increasing-degree", "--p", "2", "--r", "const:1", "--depth", "20"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: RamificationReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, apf_core::Verdict::CertifiedStrictlyApf);
    assert_eq!(report.certified_c_lower.unwrap().to_string(), "1/2");
    assert!(stdout(&out).contains("\"certified_c_lower\": \"1/2\""));
}

#[test]
fn analyze_s_sequence_non_apf_like() {
    let out = apf(&["analyze", "--catalog", "s-sequence", "--p", "5", "--s", "linear", "--depth", "50", "--format", "text"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("verdict: EMPIRICAL_NON_APF_LIKE"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_degree = write(dir.path(), "q3.json", r#"{"base": {"p": 2}, "steps": [{"q": 2}, {"q": 3}]}"#);
    let out = apf(&["analyze", &bad_degree]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("step 2"), "{}", stderr(&out));

    let malformed = write(dir.path(), "broken.json", "{\"base\": {\"p\": 2},\n \"steps\": [");
    let out = apf(&["analyze", &malformed]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let impure = write(
        dir.path(),
        "impure.json",
        r#"{"base": {"p": 2, "e": 1}, "steps": [{"q": 4, "coeffs": {"2": "1/4"}}, {"q": 2}]}"#,
    );
    let out = apf(&["analyze", &impure]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("purity"), "{}", stderr(&out));

    let out = apf(&["analyze", "catalog", "increasing-degree", "--param", "r=const:1", "--depth", "1"]);
    assert_eq!(code(&out), 2);

    let out = apf(&["analyze", "catalog", "power-compatible", "--depth", "3", "--plot", "/nonexistent/dir/phi.csv"]);
    assert_eq!(code(&out), 4);

    let out = apf(&["analyze", &dir.path().join("missing.json").to_string_lossy()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn indeterminate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let vague = write(
        dir.path(),
        "vague.json",
        r#"{"base": {"p": 2, "e": 1}, "cycle": [{"q": 2, "coeffs": {"1": {"min": "1/2"}}}]}"#,
    );
    let out = apf(&["analyze", &vague, "--depth", "4"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let report: RamificationReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.per_step.iter().any(|s| s.uncertainty));
}

#[test]
fn plot_csv_and_convention() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("phi.csv");
    let csv_arg = csv.to_string_lossy().into_owned();
    let out = apf(&["plot", "catalog", "increasing-degree", "--depth", "3", "--plot", &csv_arg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("series,x,y,x_exact,y_exact\n"));
    assert!(text.contains("Phi,2.000000000000,2.000000000000,2/1,2/1\n"));
    assert!(text.contains("Phi,4.000000000000,3.000000000000,4/1,3/1\n"));

    let out = apf(&["plot", "catalog", "increasing-degree", "--depth", "3", "--plot", &csv_arg, "--convention", "serre"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.contains("Phi,1.000000000000,1.000000000000,1/1,1/1\n"));
    assert!(text.contains("Phi,3.000000000000,2.000000000000,3/1,2/1\n"));

    let svg = dir.path().join("phi.svg");
    let out = apf(&["analyze", "catalog", "char-p", "--depth", "4", "--plot", &svg.to_string_lossy()]);
    assert_eq!(code(&out), 0);
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));

    let out = apf(&["plot", "catalog", "char-p", "--depth", "4"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn certify_and_catalog_commands() {
    let out = apf(&["certify", "catalog", "power-compatible", "--format", "text"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("c_lower = 1/2"));

    let out = apf(&["certify", "catalog", "char-p"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("tail of tower unspecified"));

    let out = apf(&["catalog"]);
    assert_eq!(stdout(&out).lines().count(), 4);

    // the printed spec analyzes like the catalog entry itself
    let dir = tempfile::tempdir().unwrap();
    let out = apf(&["catalog", "s-sequence", "--depth", "12", "--param", "s=floor-geom-over-n"]);
    assert_eq!(code(&out), 0);
    let spec = write(dir.path(), "spec.json", &stdout(&out));
    let from_file = apf(&["analyze", &spec]);
    let direct = apf(&["analyze", "catalog", "s-sequence", "--depth", "12", "--s", "floor-geom-over-n"]);
    assert_eq!(code(&from_file), 0, "{}", stderr(&from_file));
    assert_eq!(stdout(&from_file), stdout(&direct));

    let out = apf(&["catalog", "nope"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn report_written_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = apf(&["analyze", "catalog", "power-compatible", "--depth", "5", "--output", &path.to_string_lossy()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let report: RamificationReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.depth, 5);
}
