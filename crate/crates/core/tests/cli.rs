use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dirac_stwp::io::{load_grid, parse_curve_table};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dirac-stwp"));
    c.env("RUST_LOG", "error");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("`{key}` missing from\n{text}"))
        .to_string()
}

const SMALL: &[&str] = &["--override", "evaluation.n_perp=12", "--override", "evaluation.n_p=24"];

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["build", "--override", "wavepacket.v_a=1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("wavepacket.v_a"));

    let o = run(dir.path(), &["build", "--override", "wavepacket.speed=3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown key"));

    let o = run(dir.path(), &["build", "--override", "grid.x3.min=5", "--override", "grid.x3.max=5"]);
    assert_eq!(code(&o), 2);

    assert_eq!(code(&run(dir.path(), &["build", "--threads", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["fig2", "--override", "fig2.kappa_values=1.5"])), 2);
    assert_eq!(code(&bin().output().unwrap()), 2);

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "wavepacket.w = 0.1\nwavepacket.w = 0.2\n").unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("build").output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("duplicate"));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["build", "--override", "wavepacket.v_a=0.5", "--override", "wavepacket.w=50"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));

    let o = run(
        dir.path(),
        &[
            "evaluate",
            "--override", "evaluation.method=propagation",
            "--override", "grid.x0=0,400",
            "--override", "grid.x1.count=8",
            "--override", "grid.x2.min=-40",
            "--override", "grid.x2.max=40",
            "--override", "grid.x2.count=8",
            "--override", "grid.x3.count=256",
        ],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("alias"));
}

#[test]
fn io_failures_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["--config", "/nonexistent/run.cfg", "build"]).output().unwrap();
    assert_eq!(code(&o), 4);

    let bogus = dir.path().join("broken.grid");
    fs::write(&bogus, b"magic = dirac-stwp-grid\nversion = 1\n\n\x00\x01").unwrap();
    let o = run(dir.path(), &["diagnose", bogus.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn build_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let mut args = vec!["build", "--threads", "2"];
        args.extend_from_slice(SMALL);
        let o = run(d.path(), &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let na = fs::read(a.path().join("nodes.txt")).unwrap();
    let nb = fs::read(b.path().join("nodes.txt")).unwrap();
    assert_eq!(na, nb);
    let summary = fs::read_to_string(a.path().join("build.txt")).unwrap();
    let v3: f64 = value(&summary, "expectation.v3").parse().unwrap();
    assert!(v3 > 0.0 && v3 < 1.0);
    assert_eq!(value(&summary, "support_radius"), "inf");
}

#[test]
fn compare_is_reproducible_for_a_seed() {
    let mut outs = Vec::new();
    for seed in ["11", "11"] {
        let d = tempfile::tempdir().unwrap();
        let mut args = vec![
            "compare", "--seed", seed,
            "--override", "grid.x1.count=5",
            "--override", "grid.x3.count=9",
        ];
        args.extend_from_slice(SMALL);
        let o = run(d.path(), &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outs.push(fs::read_to_string(d.path().join("compare.txt")).unwrap());
        assert!(d.path().join("compare_paraxial_t0.grid").exists());
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(value(&outs[0], "probe.seed"), "11");
}

#[test]
fn evaluate_then_diagnose_tracks_the_peak() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec![
        "evaluate",
        "--override", "grid.x0=0,50,100,150,200",
        "--override", "grid.x1.count=17",
    ];
    args.extend_from_slice(SMALL);
    let o = run(d.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let g = load_grid(&d.path().join("grid_paraxial_t2.grid")).unwrap();
    assert_eq!(g.grid.time().unwrap(), 100.0);
    assert_eq!(g.param("evaluation.method"), Some("paraxial"));

    let o = run(d.path(), &["diagnose"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("diagnostics.txt")).unwrap();
    assert_eq!(value(&text, "grids"), "5");
    assert_eq!(value(&text, "parameters.source"), "grid");
    let v: f64 = value(&text, "trajectory.velocity").parse().unwrap();
    assert!((v - 2.0).abs() < 1e-3, "{v}");
    let c: f64 = value(&text, "similarity.4.correlation").parse().unwrap();
    assert!(c > 0.99);
}

#[test]
fn diagnose_rejects_mismatched_grids() {
    let d = tempfile::tempdir().unwrap();
    for count in ["65", "33"] {
        let o = run(d.path(), &["evaluate", "--override", &format!("grid.x3.count={count}"), "--override", "grid.x1.count=5"]);
        assert_eq!(code(&o), 0);
        fs::rename(
            d.path().join("grid_paraxial_t0.grid"),
            d.path().join(format!("g{count}.grid")),
        )
        .unwrap();
    }
    let o = run(d.path(), &["diagnose"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("different spatial axes"));
}

#[test]
fn fig2_writes_a_parseable_table() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["fig2", "--override", "fig2.samples=21"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = parse_curve_table(&fs::read_to_string(d.path().join("fig2.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 63);
    assert!(rows.iter().all(|r| r.p1.abs() <= 0.3 + 1e-15));
}

#[test]
fn keys_lists_units() {
    let o = bin().arg("keys").output().unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("wavepacket.delta_zeta") && text.contains("[1/m]"));
}
