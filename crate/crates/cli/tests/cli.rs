use std::fs;
use std::process::{Command, Output};

fn pfk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfk")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value_of(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .trim()
        .parse()
        .unwrap()
}

const SQUARE_CATALOG: &str = r#"{"domains":[{"name":"square","domain":{"type":"rectangle","a":1,"b":1}}],"p_list":[2],"resolution":24}"#;

#[test]
fn eig_radial_disk() {
    let o = pfk(&["eig", "--domain", r#"{"type":"ball","n":2,"r":1}"#, "--p", "2", "--method", "radial"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lambda = 5.783185"), "{}", stdout(&o));
}

#[test]
fn eig_grid_square() {
    let o = pfk(&["eig", "--domain", r#"{"type":"rectangle","a":1,"b":1}"#, "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let l = value_of(&stdout(&o), "lambda");
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    assert!((l - exact).abs() / exact < 0.01, "{l}");
}

#[test]
fn eig_rejects_small_p() {
    let o = pfk(&["eig", "--domain", "disk(1)", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p must exceed 1"));
}

#[test]
fn eig_writes_eigenfunction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let o = pfk(&["eig", "--domain", "rectangle(2,1)", "--p", "2", "--resolution", "16", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# {"));
    assert!(text.lines().count() > 10);
}

#[test]
fn environment_sets_default_resolution() {
    let run = |res: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_pfk"))
            .args(["eig", "--domain", "rectangle(1,1)", "--p", "2"])
            .env("PFK_DEFAULT_RESOLUTION", res)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        value_of(&stdout(&o), "lambda")
    };
    assert_ne!(run("12"), run("20"));
    let bad = Command::new(env!("CARGO_BIN_EXE_pfk"))
        .args(["eig", "--domain", "rectangle(1,1)", "--p", "2"])
        .env("PFK_DEFAULT_RESOLUTION", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn cap_analytic_ball() {
    let o = pfk(&["cap", "--analytic", "--n", "3", "--p", "2", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let c = value_of(&stdout(&o), "capacity");
    assert!((c - 4.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn cap_grid_with_gap() {
    let o = pfk(&["cap", "--inner", "disk(0.5)", "--outer", "disk(1)", "--p", "2", "--analytic", "--resolution", "48"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(value_of(&out, "relative_gap") < 0.02, "{out}");
}

#[test]
fn cap_rejects_non_nested_sets() {
    let o = pfk(&["cap", "--inner", "disk(2)", "--outer", "disk(1)", "--p", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pfk(&["cap", "--inner", "{not json", "--outer", "disk(1)", "--p", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cheeger_square() {
    let o = pfk(&["cheeger", "--domain", r#"{"type":"rectangle","a":1,"b":1}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert!((value_of(&stdout(&o), "h") - 3.77245).abs() < 1e-5);
}

#[test]
fn verify_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    fs::write(&cat, SQUARE_CATALOG).unwrap();
    let o = pfk(&["verify", "--catalog", cat.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("name,paper_ref,lhs,rhs,relation,tolerance,margin,pass"));
    assert!(lines.all(|l| l.ends_with(",true") || l.ends_with(",false")));
}

#[test]
fn verify_corrupted_tolerance_fails_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    fs::write(&cat, SQUARE_CATALOG).unwrap();
    let o = pfk(&["verify", "--catalog", cat.to_str().unwrap(), "--tolerance", "faber_krahn=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAILED: faber_krahn"), "{}", stderr(&o));
}

#[test]
fn verify_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    fs::write(&cat, SQUARE_CATALOG).unwrap();
    let out = dir.path().join("reports");
    let o = pfk(&["verify", "--catalog", cat.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["summary"]["failed"], 0);
    let first = &json["reports"][0];
    for key in ["name", "paper_ref", "lhs", "rhs", "relation", "tolerance", "margin", "pass", "context"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(out.join("report.csv").exists() && out.join("report.txt").exists());
}

#[test]
fn verify_rejects_bad_catalogs() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    fs::write(&cat, r#"{"domains":[{"name":"a","domain":{"type":"blob"}}]}"#).unwrap();
    assert_eq!(pfk(&["verify", "--catalog", cat.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(pfk(&["verify", "--catalog", "/definitely/missing.json"]).status.code(), Some(2));
    assert_eq!(pfk(&["verify", "--p-list", "0.5"]).status.code(), Some(2));
}

#[test]
fn sweep_disk_decreases_towards_two() {
    let o = pfk(&["sweep", "--domain", "disk(1)", "--p-from", "2", "--p-to", "1.1", "--steps", "3", "--resolution", "32"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.windows(2).all(|w| w[1] < w[0]), "{rows:?}");
    assert!(rows[3] > 2.0);
}

#[test]
fn sweep_rejects_zero_steps() {
    let o = pfk(&["sweep", "--domain", "disk(1)", "--p-from", "2", "--p-to", "3", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
