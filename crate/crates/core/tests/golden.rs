//! Committed grid and curve-table files must stay readable and reproducible.

use std::path::{Path, PathBuf};

use dirac_stwp::cli::fig2_rows;
use dirac_stwp::evaluate::{FieldGrid, ParaxialField};
use dirac_stwp::io::{load_grid, parse_curve_table, write_grid, RawConfig, RunConfig};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn golden_grid_is_byte_stable() {
    let bytes = std::fs::read(data("golden_paraxial.grid")).unwrap();
    let file = load_grid(&data("golden_paraxial.grid")).unwrap();
    assert_eq!(file.grid.shape(), [1, 9, 1, 33]);
    assert_eq!(file.param("wavepacket.v_a"), Some("2"));
    assert_eq!(file.param("evaluation.method"), Some("paraxial"));
    let mut again = Vec::new();
    write_grid(&mut again, &file.grid, &file.params).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn golden_grid_matches_current_evaluator() {
    let file = load_grid(&data("golden_paraxial.grid")).unwrap();
    let mut raw = RawConfig::default();
    for (k, v) in file.params.iter().filter(|(k, _)| !k.starts_with("derived.")) {
        raw.set(k, v).unwrap();
    }
    let cfg = RunConfig::from_raw(raw).unwrap();
    let field = ParaxialField::new(&cfg.wavepacket).unwrap();
    let fresh = FieldGrid::fill(file.grid.axes.clone(), |x| field.eval(x)).unwrap();
    let scale = file.grid.peak_density().sqrt();
    for (a, b) in fresh.values.iter().zip(&file.grid.values) {
        assert!(a.max_abs_diff(b) <= 1e-12 * scale);
    }

    let (x3, dens) = file.grid.on_axis_density().unwrap();
    let peak = dens.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(x3[peak], 100.0);
}

#[test]
fn golden_curve_table_is_on_shell_and_reproducible() {
    let text = std::fs::read_to_string(data("golden_fig2.csv")).unwrap();
    let rows = parse_curve_table(&text).unwrap();
    assert_eq!(rows.len(), 21);
    for r in &rows {
        let e = (1.0 + r.p1 * r.p1 + r.p3 * r.p3).sqrt();
        assert!((e - (2.0 * r.p3 + r.kappa)).abs() < 1e-12);
        assert!(((1.0 + r.p * r.p).sqrt() - 2.0 * r.p - r.kappa).abs() < 1e-12);
    }
    let cfg = RunConfig::load(Some(&data("golden.cfg")), &[]).unwrap();
    let fresh = fig2_rows(&cfg).unwrap();
    assert_eq!(fresh.len(), rows.len());
    for (a, b) in fresh.iter().zip(&rows) {
        assert!((a.p3 - b.p3).abs() <= 1e-13 * a.p3.abs());
        assert_eq!(a.p1, b.p1);
    }
}
