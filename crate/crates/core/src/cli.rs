//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::{branch_for_p, fig2_projection, p_from_kappa, support_radius};
use crate::diagnostics::{
    density_norm, expectation_report, fit_peak_velocity, peak_position, profile_similarity_windowed,
    relative_l2, ZetaWindow,
};
use crate::error::{Error, Result};
use crate::evaluate::grid::{FieldGrid, SpacetimePoint};
use crate::evaluate::{eval_spectral_propagation, ParaxialField, PropagationOptions, QuadratureField};
use crate::io::config::KEYS;
use crate::io::header::format_f64;
use crate::io::{
    load_grid, load_nodes, save_grid, save_nodes, write_curve_table, CurveRow, Method, RawConfig,
    RunConfig,
};
use crate::spectrum::{build_node_set, normalize, SpectralNodeSet};

#[derive(Debug, Parser)]
#[command(name = "dirac-stwp", version, about = "Arbitrary-group-velocity Dirac wavepackets")]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Configuration override, repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized probes; overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and save the normalized spectral node set.
    Build,
    /// Evaluate the field on the configured grid at every time.
    Evaluate,
    /// Measure norms, peak motion, profile stability and expectations.
    Diagnose {
        /// Grid files; defaults to every `*.grid` in the output directory.
        grids: Vec<PathBuf>,
    },
    /// Write the momentum-correlation curve table.
    Fig2,
    /// Evaluate paraxially and by quadrature and report their difference.
    Compare,
    /// List configuration keys with units and defaults.
    Keys,
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::config("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("--threads", e.to_string()))?;
    }
    if let Command::Keys = cli.command {
        print!("{}", keys_table());
        return Ok(());
    }
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Build => build(&cfg),
        Command::Evaluate => evaluate(&cfg),
        Command::Diagnose { grids } => diagnose(&cfg, grids),
        Command::Fig2 => fig2(&cfg),
        Command::Compare => compare(&cfg),
        Command::Keys => unreachable!(),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut overrides = cli.overrides.clone();
    if let Some(out) = &cli.out {
        overrides.push(format!("output.dir={}", out.display()));
    }
    if let Some(seed) = cli.seed {
        overrides.push(format!("run.seed={seed}"));
    }
    RunConfig::load(cli.config.as_deref(), &overrides)
}

fn keys_table() -> String {
    let mut s = String::new();
    for k in KEYS {
        let _ = writeln!(s, "{:<30} [{}] default `{}`: {}", k.key, k.unit, k.default, k.doc);
    }
    s
}

fn output_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(&cfg.output_dir)
}

/// Writes `key = value` lines to `path` and echoes them to stdout.
fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut s = String::new();
    for (k, v) in entries {
        let _ = writeln!(s, "{k} = {v}");
    }
    fs::write(path, &s)?;
    print!("{s}");
    Ok(())
}

fn kv(k: impl Into<String>, v: impl ToString) -> (String, String) {
    (k.into(), v.to_string())
}

fn node_set(cfg: &RunConfig) -> Result<SpectralNodeSet> {
    match &cfg.nodes_file {
        Some(path) => {
            let set = load_nodes(path)?;
            if set.spec != cfg.wavepacket {
                return Err(Error::config(
                    "evaluation.nodes",
                    format!("{} was built for a different wavepacket", path.display()),
                ));
            }
            normalize(&set)
        }
        None => normalize(&build_node_set(&cfg.wavepacket, cfg.n_perp, cfg.n_p)?),
    }
}

fn build(cfg: &RunConfig) -> Result<()> {
    let set = normalize(&build_node_set(&cfg.wavepacket, cfg.n_perp, cfg.n_p)?)?;
    let dir = output_dir(cfg)?;
    save_nodes(&dir.join("nodes.txt"), &set)?;
    let report = expectation_report(&set)?;
    let spec = &cfg.wavepacket;
    let carrier = spec.carrier()?;
    let radius = support_radius(&spec.curve_at(spec.p_bar)?);
    let mut out = vec![
        kv("nodes", set.nodes.len()),
        kv("discarded_fraction", format_f64(set.meta.discarded_fraction)),
        kv("truncated_fraction", format_f64(set.meta.truncated_fraction)),
        kv("support_radius", if radius.is_finite() { format_f64(radius) } else { "inf".into() }),
        kv("kappa", format_f64(carrier.kappa)),
        kv("beta_p", format_f64(carrier.beta_p)),
        kv("v_n", format_f64(carrier.v_n())),
    ];
    if let Ok(field) = ParaxialField::new(spec) {
        out.push(kv("xi0", format_f64(field.xi0())));
    }
    out.extend([
        kv("expectation.v1", format_f64(report.velocity[0])),
        kv("expectation.v2", format_f64(report.velocity[1])),
        kv("expectation.v3", format_f64(report.velocity[2])),
        kv("expectation.energy", format_f64(report.energy)),
    ]);
    write_summary(&dir.join("build.txt"), &out)
}

fn grid_params(cfg: &RunConfig, extra: &[(String, String)]) -> Vec<(String, String)> {
    let mut p = cfg.echo();
    p.extend_from_slice(extra);
    p
}

type Params = Vec<(String, String)>;

/// Grids at every configured time with the configured method.
fn evaluate_grids(cfg: &RunConfig, method: Method) -> Result<Vec<(FieldGrid, Params)>> {
    let mut out = Vec::with_capacity(cfg.times.len());
    match method {
        Method::Paraxial => {
            let field = ParaxialField::new(&cfg.wavepacket)?;
            for &t in &cfg.times {
                out.push((FieldGrid::fill(cfg.axes_at(t), |x| field.eval(x))?, Vec::new()));
            }
        }
        Method::Quadrature => {
            let nodes = node_set(cfg)?;
            let field = QuadratureField::new(&nodes)?;
            for &t in &cfg.times {
                out.push((FieldGrid::fill(cfg.axes_at(t), |x| field.eval(x))?, Vec::new()));
            }
        }
        Method::Propagation => {
            let field = ParaxialField::new(&cfg.wavepacket)?;
            let t0 = cfg.times[0];
            let initial = FieldGrid::fill(cfg.axes_at(t0), |x| field.eval(x))?;
            let opts = PropagationOptions {
                m: cfg.wavepacket.m,
                carrier_k3: cfg.wavepacket.p_bar,
            };
            for &t in &cfg.times[1..] {
                let p = eval_spectral_propagation(&initial, t - t0, opts)?;
                let extra = vec![
                    kv("propagation.norm_change", format_f64(p.relative_norm_change())),
                    kv("propagation.input_edge_ratio", format_f64(p.input_edge_ratio)),
                    kv("propagation.output_edge_ratio", format_f64(p.output_edge_ratio)),
                ];
                out.push((p.grid, extra));
            }
            out.insert(0, (initial, Vec::new()));
        }
    }
    Ok(out)
}

fn evaluate(cfg: &RunConfig) -> Result<()> {
    let grids = evaluate_grids(cfg, cfg.method)?;
    let dir = output_dir(cfg)?;
    for (i, (grid, extra)) in grids.iter().enumerate() {
        let path = dir.join(format!("grid_{}_t{i}.grid", cfg.method.name()));
        save_grid(&path, grid, &grid_params(cfg, extra))?;
        println!("{}", path.display());
    }
    Ok(())
}

/// Configuration recovered from a grid's parameter echo, if it carries one.
fn config_from_echo(params: &[(String, String)]) -> Option<RunConfig> {
    let mut raw = RawConfig::default();
    let mut any = false;
    for (k, v) in params {
        if KEYS.iter().any(|s| s.key == k) {
            raw.set(k, v).ok()?;
            any = true;
        }
    }
    any.then(|| RunConfig::from_raw(raw).ok()).flatten()
}

fn diagnose(cfg: &RunConfig, paths: &[PathBuf]) -> Result<()> {
    let paths = if paths.is_empty() {
        let mut found: Vec<PathBuf> = fs::read_dir(&cfg.output_dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "grid"))
            .collect();
        found.sort();
        found
    } else {
        paths.to_vec()
    };
    if paths.is_empty() {
        return Err(Error::config("diagnose", "no grid files given or found in the output directory"));
    }
    let mut loaded = Vec::with_capacity(paths.len());
    for p in &paths {
        let file = load_grid(p)?;
        let t = file.grid.time()?;
        loaded.push((t, p.clone(), file));
    }
    loaded.sort_by(|a, b| a.0.total_cmp(&b.0));
    let first = &loaded[0].2;
    if let Some((_, p, _)) = loaded.iter().find(|(_, _, f)| {
        f.grid.axes[1..] != first.grid.axes[1..]
    }) {
        return Err(Error::GridMismatch(format!("{} uses different spatial axes", p.display())));
    }
    let echo = config_from_echo(&first.params);
    let source = if echo.is_some() { "grid" } else { "config" };
    let pcfg = echo.unwrap_or_else(|| cfg.clone());
    let spec = &pcfg.wavepacket;
    let carrier = spec.carrier()?;

    let mut out = vec![kv("grids", loaded.len()), kv("parameters.source", source)];
    let mut peaks = Vec::new();
    for (i, (t, p, f)) in loaded.iter().enumerate() {
        out.push(kv(format!("grid.{i}.path"), p.display()));
        out.push(kv(format!("grid.{i}.time"), format_f64(*t)));
        out.push(kv(format!("grid.{i}.norm"), format_f64(density_norm(&f.grid)?)));
        let peak = peak_position(&f.grid);
        out.push(kv(
            format!("grid.{i}.peak_x3"),
            match &peak {
                Ok(x) => format_f64(*x),
                Err(e) => format!("unavailable ({e})"),
            },
        ));
        peaks.push(peak.is_ok());
    }

    let grids: Vec<FieldGrid> = loaded.iter().map(|(_, _, f)| f.grid.clone()).collect();
    match fit_peak_velocity(&grids) {
        Ok(tr) => out.extend([
            kv("trajectory.velocity", format_f64(tr.fitted_velocity)),
            kv("trajectory.intercept", format_f64(tr.intercept)),
            kv("trajectory.residual", format_f64(tr.fit_residual)),
        ]),
        Err(e) => out.push(kv("trajectory.velocity", format!("unavailable ({e})"))),
    }

    let window = pcfg.zeta_window.map(|k| ZetaWindow {
        v_n: carrier.v_n(),
        half_width: k * spec.delta_zeta,
    });
    for (i, g) in grids.iter().enumerate().skip(1) {
        match profile_similarity_windowed(&grids[0], g, spec.v_a, window) {
            Ok(s) => {
                out.push(kv(format!("similarity.{i}.correlation"), format_f64(s.correlation)));
                out.push(kv(format!("similarity.{i}.shift"), format_f64(s.shift_used)));
            }
            Err(e) => out.push(kv(format!("similarity.{i}.correlation"), format!("unavailable ({e})"))),
        }
    }

    let report = expectation_report(&node_set(&pcfg)?)?;
    out.extend([
        kv("carrier.v_a", format_f64(spec.v_a)),
        kv("carrier.v_n", format_f64(carrier.v_n())),
        kv("expectation.v1", format_f64(report.velocity[0])),
        kv("expectation.v2", format_f64(report.velocity[1])),
        kv("expectation.v3", format_f64(report.velocity[2])),
        kv("expectation.p3", format_f64(report.momentum[2])),
        kv("expectation.energy", format_f64(report.energy)),
    ]);
    let dir = output_dir(cfg)?;
    write_summary(&dir.join("diagnostics.txt"), &out)
}

/// Rows of the curve table for every configured curve.
pub fn fig2_rows(cfg: &RunConfig) -> Result<Vec<CurveRow>> {
    let spec = &cfg.wavepacket;
    let f = &cfg.fig2;
    let mut ps = Vec::new();
    for &p in &f.p_values {
        if let Some(b) = f.branch {
            if branch_for_p(p, spec.v_a, spec.m)? != b {
                return Err(Error::config("fig2.p_values", format!("P = {p} is not on the requested branch")));
            }
        }
        ps.push(p);
    }
    for &kappa in &f.kappa_values {
        let branch = f.branch.expect("validated: kappa lists carry a branch");
        ps.push(p_from_kappa(kappa, spec.v_a, spec.m, branch)?);
    }
    let mut rows = Vec::new();
    for p in ps {
        let curve = spec.curve_at(p)?;
        let reach = f.p1_max.min(support_radius(&curve));
        let samples: Vec<f64> = crate::evaluate::linspace(-reach, reach, f.samples);
        for (p1, p3) in fig2_projection(&curve, &samples).points {
            rows.push(CurveRow {
                p,
                kappa: curve.carrier.kappa,
                p1,
                p3,
            });
        }
    }
    Ok(rows)
}

fn fig2(cfg: &RunConfig) -> Result<()> {
    let rows = fig2_rows(cfg)?;
    let dir = output_dir(cfg)?;
    let path = dir.join("fig2.csv");
    write_curve_table(fs::File::create(&path)?, &rows)?;
    println!("{} ({} rows)", path.display(), rows.len());
    Ok(())
}

const COMPARE_PROBES: usize = 256;

fn compare(cfg: &RunConfig) -> Result<()> {
    let para = ParaxialField::new(&cfg.wavepacket)?;
    let nodes = node_set(cfg)?;
    let quad = QuadratureField::new(&nodes)?;
    let dir = output_dir(cfg)?;
    let mut out = vec![kv("nodes", nodes.nodes.len())];
    for (i, &t) in cfg.times.iter().enumerate() {
        let axes = [vec![t], cfg.x1.samples(), cfg.x2.samples(), cfg.x3.samples()];
        let a = FieldGrid::fill(axes.clone(), |x| para.eval(x))?;
        let b = FieldGrid::fill(axes, |x| quad.eval(x))?;
        save_grid(&dir.join(format!("compare_paraxial_t{i}.grid")), &a, &grid_params(cfg, &[]))?;
        save_grid(&dir.join(format!("compare_quadrature_t{i}.grid")), &b, &grid_params(cfg, &[]))?;
        out.push(kv(format!("time.{i}"), format_f64(t)));
        out.push(kv(format!("relative_l2.{i}"), format_f64(relative_l2(&a, &b)?)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t_span = (cfg.times[0], cfg.times[cfg.times.len() - 1]);
    let draw = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    let peak = nodes_peak_amplitude(&quad, cfg);
    let mut worst: f64 = 0.0;
    for _ in 0..COMPARE_PROBES {
        let x = SpacetimePoint::new(
            draw(&mut rng, t_span.0, t_span.1),
            draw(&mut rng, cfg.x1.min, cfg.x1.max),
            draw(&mut rng, cfg.x2.min, cfg.x2.max),
            draw(&mut rng, cfg.x3.min, cfg.x3.max),
        );
        let d = (para.eval(x) - quad.eval(x)).density().sqrt();
        worst = worst.max(d / peak);
    }
    out.push(kv("probe.seed", cfg.seed));
    out.push(kv("probe.count", COMPARE_PROBES));
    out.push(kv("probe.max_difference", format_f64(worst)));
    write_summary(&dir.join("compare.txt"), &out)
}

/// Field magnitude at the packet centre, the scale for probe differences.
fn nodes_peak_amplitude(quad: &QuadratureField, cfg: &RunConfig) -> f64 {
    let t = cfg.times[0];
    let centre = SpacetimePoint::new(t, 0.0, 0.0, cfg.wavepacket.v_a * t);
    quad.eval(centre).density().sqrt().max(f64::MIN_POSITIVE)
}
