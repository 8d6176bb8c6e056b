use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iga-bem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("iga_bem_cli_{name}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn dims_prints_both_dimensions() {
    let out = bin(&["dims", "--geometry", "sphere", "--p", "1", "--m", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dof_star 98304"), "{text}");
    assert!(text.contains("dof 25350"), "{text}");
}

#[test]
fn dims_rejects_unknown_geometry() {
    let out = bin(&["dims", "--geometry", "cylinder", "--p", "1", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_csv_and_plot_script() {
    let dir = scratch("run");
    let cfg = dir.join("sphere.cfg");
    std::fs::write(
        &cfg,
        "# smallest sweep\ngeometry = sphere\nproblem = laplace\ndegrees = 0\nlevels = 1-3\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        &format!("out.dir={}", out_dir.display()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("sphere_laplace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("p,m,h,dof,dof_star,density_l2_err,potential_max_err,iterations,seconds")
    );
    assert_eq!(lines.count(), 3);
    let script = std::fs::read_to_string(out_dir.join("plot_sphere_laplace.py")).unwrap();
    assert!(script.contains("sphere_laplace.csv"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["run", "levels=1", "colour=blue"],
        vec!["run", "geometry=sphere", "degrees=0", "levels=9"],
        vec!["run", "--config", "/nonexistent/iga.cfg"],
        vec!["run", "problem=helmholtz", "kappa=-1"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failed_cell_exits_with_one() {
    let dir = scratch("fail");
    let out = bin(&[
        "run",
        "geometry=sphere",
        "degrees=0",
        "levels=3",
        "solver.maxiter=1",
        &format!("out.dir={}", dir.display()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn verify_passes() {
    let out = bin(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}
