use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_npannulus"))
}

fn paper_map() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../paper_map.json")
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn write_map(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn shipped_map_matches_builtin_example() {
    let file = npannulus::geometry::MapFile::load(paper_map()).unwrap();
    let geom = file.geometry().unwrap();
    let builtin = npannulus::geometry::ConformalMap::paper_example();
    assert_eq!(geom.map, builtin);
    assert_eq!((geom.r_inner(), geom.r_outer()), (1.1, 1.15));
}

#[test]
fn grunsky_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let map = paper_map();
    let status = run(&[
        "grunsky",
        "--map",
        map.to_str().unwrap(),
        "--order",
        "5",
        "--radius",
        "1.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let text = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,n=1,n=2,n=3,n=4,n=5");
    assert_eq!(lines.len(), 6);
    // c_11 = a_1 = 0.3 + 0.5i.
    let c11 = lines[1].split(',').nth(1).unwrap();
    assert_eq!(c11, "2.9999999999999999e-1+5.0000000000000000e-1j");
}

#[test]
fn strong_grunsky_violation_is_an_invariant_failure() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(
        dir.path(),
        "j.json",
        r#"{"a0": [0, 0], "coeffs": [[1, 0.25, 0]], "ri": 1.0, "re": 1.2}"#,
    );
    let out = run(&[
        "grunsky",
        "--map",
        map.to_str().unwrap(),
        "--order",
        "6",
        "--radius",
        "0.4",
        "--out",
        dir.path().join("g.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let record: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(record["error"]["kind"], "invariant");
}

#[test]
fn matrix_dump_format() {
    let dir = tempfile::tempdir().unwrap();
    for (which, size) in [("np", 22usize), ("b", 10)] {
        let out = dir.path().join(format!("{which}.txt"));
        let status = run(&[
            "matrix",
            "--order",
            "5",
            "--which",
            which,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
        let text = fs::read_to_string(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("{size} {size}"));
        let pairs: Vec<&str> = lines.collect();
        assert_eq!(pairs.len(), size * size);
        assert!(pairs.iter().all(|l| l.split(' ').count() == 2));
    }
}

#[test]
fn identity_map_reproduces_circular_reference() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(
        dir.path(),
        "id.json",
        r#"{"a0": [0, 0], "coeffs": [], "ri": 1.1, "re": 1.15}"#,
    );
    let out = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let status = run(&[
        "spectrum",
        "--map",
        map.to_str().unwrap(),
        "--order",
        "250",
        "--out",
        out.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("index,lambda,reference,rel_diff\n"));
    let rel = csv_column(&text, 3);
    assert_eq!(rel.len(), 1002);
    assert!(rel.iter().all(|r| r.abs() < 1e-10));
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn sweep_reports_each_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = run(&[
        "sweep",
        "--ratios",
        "0.5,0.8",
        "--order",
        "60",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("r,hausdorff\n"));
    let d = csv_column(&text, 1);
    assert_eq!(d.len(), 2);
    assert!(d[1] < d[0]);
}

#[test]
fn gershgorin_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("disks.json");
    let status = run(&[
        "gershgorin",
        "--order",
        "40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["analytic_disks"].as_array().unwrap().len(), 160);
    assert_eq!(report["entry_disks"].as_array().unwrap().len(), 80);
    assert_eq!(report["rho_source"], "fit");
    assert_eq!(report["entry_containment"]["contained"], true);

    let status = run(&[
        "gershgorin",
        "--order",
        "40",
        "--rho",
        "0.95",
        "--m-max",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["rho"], 0.95);
    assert_eq!(report["rho_source"], "override");
}

#[test]
fn oracle_and_crosscheck_agree() {
    let dir = tempfile::tempdir().unwrap();
    let oracle = dir.path().join("oracle.csv");
    let circles = write_map(
        dir.path(),
        "id.json",
        r#"{"a0": [0, 0], "coeffs": [], "ri": 1, "re": 2}"#,
    );
    let status = run(&[
        "oracle",
        "--map",
        circles.to_str().unwrap(),
        "--nq",
        "64",
        "--out",
        oracle.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    assert_eq!(
        csv_column(&fs::read_to_string(oracle).unwrap(), 1).len(),
        128
    );

    let cross = dir.path().join("cross.csv");
    let status = run(&[
        "crosscheck",
        "--order",
        "100",
        "--nq",
        "512",
        "--out",
        cross.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let text = fs::read_to_string(cross).unwrap();
    assert!(text.starts_with("index,grunsky,oracle,abs_gap,rel_gap\n"));
    assert!(csv_column(&text, 3).iter().all(|g| *g < 1e-6));
}

#[test]
fn input_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_map(dir.path(), "bad.json", r#"{"a0": [0, 0], "coefs": []}"#);
    assert_eq!(
        run(&["spectrum", "--map", bad.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["oracle", "--nq", "17"]).status.code(), Some(3));
    assert_eq!(
        run(&["spectrum", "--ri", "1.2", "--re", "1.1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    // Critical point of the Joukowski map outside the inner circle.
    let folded = write_map(
        dir.path(),
        "fold.json",
        r#"{"a0": [0, 0], "coeffs": [[1, 4, 0]], "ri": 1.1, "re": 1.15}"#,
    );
    assert_eq!(
        run(&["spectrum", "--map", folded.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(
        dir.path(),
        "id.json",
        r#"{"a0": [0, 0], "coeffs": [], "ri": 1, "re": 2}"#,
    );
    let cfg = write_map(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"order": 3, "ri": 0.55, "re": 1.0, "map": {:?}}}"#,
            map.to_str().unwrap()
        ),
    );
    let out = dir.path().join("s.csv");
    let status = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "spectrum",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    assert_eq!(csv_column(&fs::read_to_string(out).unwrap(), 1).len(), 14);
}

#[test]
fn reproduce_is_complete_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = run(&["reproduce", "--out", out.to_str().unwrap()]);
        assert!(status.status.success(), "{status:?}");
    }
    for name in [
        "eigenvalues.csv",
        "rel_diff.csv",
        "disks.json",
        "crosscheck.csv",
        "summary.json",
        "eigenvalues.svg",
        "rel_diff.svg",
        "crosscheck.svg",
    ] {
        let first = fs::read(a.join(name)).unwrap();
        assert_eq!(
            first,
            fs::read(b.join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
    let eig = fs::read_to_string(a.join("eigenvalues.csv")).unwrap();
    let distorted = csv_column(&eig, 1);
    assert_eq!(distorted.len(), 1002);
    let n = distorted.len();
    assert!((0..n).all(|i| (distorted[i] + distorted[n - 1 - i]).abs() < 1e-8));
    assert!(distorted.iter().all(|v| v.abs() <= 0.5 + 1e-8));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert!(summary["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}
