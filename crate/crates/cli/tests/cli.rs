use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn burniat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burniat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn certs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../certs")
}

#[test]
fn invariants_pass() {
    let o = burniat(&["invariants"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("PASS K^2"), "{s}");
    assert!(!s.contains("FAIL"));
}

#[test]
fn invariants_json() {
    let o = burniat(&["--format", "json", "invariants"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("valid json");
    assert_eq!(v["command"], "invariants");
    let items = v["items"].as_array().unwrap();
    assert!(items.len() >= 20);
    assert!(items.iter().all(|i| i["pass"] == true));
}

#[test]
fn corrupted_catalog_fails_building_checks() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/catalog.toml")).unwrap();
    let needle = "name = \"h12\"\nclass = [1, -1, -1, 0, 0]\nbranch = 3";
    assert!(text.contains(needle));
    let bad = text.replace(needle, "name = \"h12\"\nclass = [1, -1, -1, 0, 0]\nbranch = 1");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.toml");
    std::fs::write(&path, bad).unwrap();
    let o = burniat(&["--catalog", path.to_str().unwrap(), "invariants"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn unreadable_catalog_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.toml");
    std::fs::write(&path, "[[curve]]\nname = 3\n").unwrap();
    let o = burniat(&["--catalog", path.to_str().unwrap(), "invariants"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("catalog"));
}

#[test]
fn lct_of_a_divisor() {
    let o = burniat(&["lct", "4*H13 + 2*E3 + 2*E1 + 2*H24"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1/4"), "{s}");
    assert!(s.contains("E1∩H13"), "{s}");

    let o = burniat(&["lct", "2*E1"]);
    assert!(stdout(&o).contains("1/2"));
}

#[test]
fn lct_of_a_witness() {
    let o = burniat(&["lct", "@D1-odd", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("1/4"));

    let o = burniat(&["lct", "@D1-odd"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lct_reports_bad_input_with_a_column() {
    let o = burniat(&["lct", "2*E1 + 3*E5"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("column 10") && e.contains("E5"), "{e}");
}

#[test]
fn glct_upper_bounds() {
    let o = burniat(&["glct-upper"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1/4") && s.contains("1/2"), "{s}");
    assert!(s.contains("up to symmetry"), "{s}");

    let o = burniat(&["glct-upper", "--max-coeff", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1/2"));

    let o = burniat(&["glct-upper", "--max-coeff", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eigensystem_two() {
    let o = burniat(&["eigensystem", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn check_one_file() {
    let path = certs().join("thm2-anti-case1.cert");
    let o = burniat(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("PASS thm2-anti-case1"), "{s}");
    assert!(s.contains("Theorem 2, Case 1"), "{s}");
}

#[test]
fn check_all() {
    let o = burniat(&["check", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn check_needs_paths_or_all() {
    assert_eq!(burniat(&["check"]).status.code(), Some(2));
    let path = certs().join("thm1-case1.cert");
    assert_eq!(burniat(&["check", "--all", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn broken_certificate_exits_one() {
    let text = std::fs::read_to_string(certs().join("thm2-anti-case1.cert")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thm2-anti-case1.cert");
    std::fs::write(&path, text.replace("(step ixn D T33 4n)\n", "")).unwrap();
    let o = burniat(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("INVALID at step 1"));
}

#[test]
fn cert_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["thm1-case1.cert", "thm2-anti-case1.cert"] {
        std::fs::copy(certs().join(name), dir.path().join(name)).unwrap();
    }
    let o = Command::new(env!("CARGO_BIN_EXE_burniat"))
        .args(["check", "--all"])
        .env("BURNIAT_CERT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("thm1-case1") && s.contains("thm2-anti-case1"));
    assert!(!s.contains("thm3-anti"), "{s}");
}
