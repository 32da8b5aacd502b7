//! End-to-end runs of the command-line binary.

mod common;

use std::path::Path;
use std::process::Command;

use common::{JordanCell, Steplike};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-gbdt"))
}

/// Header row and data rows of a CSV artifact, comments skipped.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (head, rows)
}

fn col(head: &[String], name: &str) -> usize {
    head.iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name} in {head:?}"))
}

fn run_example(name: &str, extra: &[&str]) -> (tempfile::TempDir, std::process::Output) {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["example", name, "--out"])
        .arg(dir.path())
        .args(extra)
        .output()
        .unwrap();
    (dir, out)
}

#[test]
fn steplike_example_artifacts() {
    let (dir, out) = run_example("ee-dw0", &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (head, rows) = table(&dir.path().join("potential.csv"));
    assert_eq!(
        head,
        [
            "x",
            "re_v_1_1",
            "im_v_1_1",
            "omega",
            "min_eig_s",
            "re_s_1_1",
            "im_s_1_1"
        ]
    );
    let at0 = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((at0[col(&head, "omega")] + 2.2).abs() < 1e-12);

    let cf = Steplike::new(1.0, 2.0, 1.0, 1.0);
    let (head, rows) = table(&dir.path().join("asymptotics.csv"));
    assert_eq!(head, ["x", "omega", "limit", "abs_diff"]);
    for r in rows.iter().filter(|r| r[0].abs() == 8.0) {
        let want = if r[0] > 0.0 {
            cf.limit_growing_side()
        } else {
            cf.limit_decaying_side()
        };
        assert!((r[1] - want).abs() <= 1e-4, "{r:?}");
    }
    let text = std::fs::read_to_string(dir.path().join("potential.csv")).unwrap();
    assert!(text.contains("# example = ee-dw0\n"));
    assert!(text.contains("# param lambda = 2.0\n"));
}

#[test]
fn jordan_cell_example_s22_column() {
    let (dir, out) = run_example("ee-dw1", &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cf = JordanCell::new(1.0, 2.0, 1.0, 1.0, 1.0);
    let (head, rows) = table(&dir.path().join("potential.csv"));
    let k = col(&head, "re_s_2_2");
    for r in &rows {
        let want = cf.s22(r[0]);
        assert!((r[k] - want).abs() <= 1e-8 * want, "x = {}", r[0]);
    }
    let (head, _) = table(&dir.path().join("asymptotics.csv"));
    assert_eq!(
        head,
        ["x", "omega", "omega_over_x2", "growth_constant", "ratio"]
    );
}

#[test]
fn trivial_weyl_has_unit_modulus() {
    let (dir, out) = run_example("trivial-sa", &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (head, rows) = table(&dir.path().join("weyl.csv"));
    assert_eq!(
        head,
        [
            "re_z",
            "im_z",
            "re_phi_1_1",
            "im_phi_1_1",
            "norm_phi",
            "membership"
        ]
    );
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!((r[col(&head, "norm_phi")] - 1.0).abs() < 1e-12);
    }
}

const SHIFTED_TRIVIAL: &str = r#"
kind = "skew-self-adjoint"
a = [0.5, 1.5]
c = 0.75
f1 = [[[0, 0]]]
f2 = [[[0, 0]]]
S0 = [[[1, 0]]]
outputs = ["potential", "dynamical", "verify"]

[A]
dense = [[[2, 0]]]

[grids.x]
start = -1
stop = 1
count = 9
"#;

#[test]
fn trivial_scenario_returns_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.toml");
    std::fs::write(&file, SHIFTED_TRIVIAL).unwrap();
    let out = bin()
        .arg("run")
        .arg(&file)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (head, rows) = table(&dir.path().join("potential.csv"));
    assert_eq!(rows.len(), 9);
    for r in rows {
        let x = r[0];
        let want =
            num_complex::Complex64::new(0.5, 1.5) * num_complex::Complex64::new(0.0, 1.5 * x).exp();
        assert!((r[col(&head, "re_v_1_1")] - want.re).abs() < 1e-14);
        assert!((r[col(&head, "im_v_1_1")] - want.im).abs() < 1e-14);
    }
    let (head, _) = table(&dir.path().join("dynamical.csv"));
    assert_eq!(head, ["x", "xi", "abs_psi_1_1", "abs_psi_2_1"]);
    let verify = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(verify.contains("\ncheck_id,grid,worst_residual,threshold,pass,location\n"));
}

#[test]
fn failing_verification_sets_exit_code() {
    // S0 = -1 is accepted by the identity (Π ≡ 0) but is not positive
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.toml");
    let text = SHIFTED_TRIVIAL
        .replace("kind = \"skew-self-adjoint\"", "kind = \"self-adjoint\"")
        .replace("S0 = [[[1, 0]]]", "S0 = [[[-1, 0]]]");
    std::fs::write(&file, text).unwrap();
    let out = bin()
        .arg("verify")
        .arg(&file)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL positivity"), "{stdout}");
    assert!(!dir.path().join("potential.csv").exists());
}

#[test]
fn weyl_command_uses_given_points() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.toml");
    let out = bin()
        .args(["example", "ee-dw0", "--print-scenario"])
        .output()
        .unwrap();
    std::fs::write(&file, &out.stdout).unwrap();
    let out = bin()
        .arg("weyl")
        .arg(&file)
        .args(["--z", "-1,6", "--z", "0.5,7"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = table(&dir.path().join("weyl.csv"));
    assert_eq!(
        rows.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>(),
        [(-1.0, 6.0), (0.5, 7.0)]
    );
}

#[test]
fn parameter_overrides_reach_the_header() {
    let (dir, out) = run_example("ee-dw0", &["--set", "lambda=3", "--set", "mu_sign=-1"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("potential.csv")).unwrap();
    assert!(text.contains("# param lambda = 3.0\n"));
    assert!(text.contains("# param mu_sign = -1.0\n"));
    let cf = Steplike::new(1.0, 3.0, 1.0, -1.0);
    let (head, rows) = table(&dir.path().join("potential.csv"));
    for r in rows {
        assert!((r[col(&head, "omega")] - cf.omega(r[0])).abs() < 1e-9);
    }
}

#[test]
fn errors_exit_with_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.toml");
    std::fs::write(&file, SHIFTED_TRIVIAL.replace("count = 9", "count = ")).unwrap();
    let out = bin().arg("run").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");

    std::fs::write(
        &file,
        SHIFTED_TRIVIAL.replace("f2 = [[[0, 0]]]", "f2 = [[[0, 0], [1, 0]]]"),
    )
    .unwrap();
    let out = bin().arg("run").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`f2`"));

    let out = bin().args(["example", "ee-dw9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["example", "ee-dw0", "--set", "lambda=0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("example.params.lambda"));
}
