//! Flat `key = value` run configuration.
//!
//! One entry per line, `#` starts a comment, lists are comma separated.
//! Every key is listed in [`KEYS`] with its unit and default; unknown keys
//! are rejected so that typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::correlation::{xi0, Sign};
use crate::error::{Error, Result};
use crate::evaluate::grid::{linspace, periodic_axis};
use crate::spectrum::{ModeSpec, WavepacketSpec};

use super::format_modes;
use super::header::format_f64;

pub struct KeySpec {
    pub key: &'static str,
    pub unit: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

const fn key(key: &'static str, unit: &'static str, default: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { key, unit, default, doc }
}

pub const KEYS: &[KeySpec] = &[
    key("wavepacket.m", "m", "1", "particle mass; sets the unit system"),
    key("wavepacket.v_a", "c", "2", "group velocity; |v_a| = 1 is excluded"),
    key("wavepacket.p_bar", "m", "2", "central carrier momentum"),
    key("wavepacket.w", "m", "0.1", "transverse momentum width"),
    key("wavepacket.delta_zeta", "1/m", "1400", "longitudinal envelope length"),
    key("wavepacket.envelope_exponent", "-", "8", "even super-Gaussian exponent"),
    key("wavepacket.modes", "-", "0 0 1 0", "`n ell re im` per mode, `;` separated"),
    key("grid.x0", "1/m", "0", "evaluation times, comma separated"),
    key("grid.x1.min", "1/m", "-40", "lower x1 bound"),
    key("grid.x1.max", "1/m", "40", "upper x1 bound"),
    key("grid.x1.count", "-", "129", "x1 samples"),
    key("grid.x2.min", "1/m", "0", "lower x2 bound"),
    key("grid.x2.max", "1/m", "0", "upper x2 bound"),
    key("grid.x2.count", "-", "1", "x2 samples"),
    key("grid.x3.min", "1/m", "-800", "lower x3 bound"),
    key("grid.x3.max", "1/m", "1400", "upper x3 bound"),
    key("grid.x3.count", "-", "1024", "x3 samples"),
    key("evaluation.method", "-", "paraxial", "paraxial, quadrature or propagation"),
    key("evaluation.n_perp", "-", "48", "transverse nodes per dimension"),
    key("evaluation.n_p", "-", "128", "longitudinal carrier nodes"),
    key("evaluation.nodes", "path", "", "node-set file to use instead of building one"),
    key("output.dir", "path", "out", "output directory"),
    key("run.seed", "-", "0", "seed for randomized probe points"),
    key("diagnose.zeta_window", "delta_zeta", "2", "profile correlation half-window; 0 disables"),
    key("fig2.p_values", "m", "1.5, 2, 2.5", "curve vertices P"),
    key("fig2.kappa_values", "m", "", "curves given by kappa instead of P"),
    key("fig2.branch", "-", "auto", "auto, plus or minus; explicit when kappa_values is used"),
    key("fig2.p1_max", "m", "0.3", "largest |p1| sampled"),
    key("fig2.samples", "-", "101", "p1 samples per curve"),
];

/// Upper bound on samples per evaluated grid.
pub const MAX_GRID_POINTS: usize = 1 << 28;

fn spec_for(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.key == key)
}

/// Entries as written, before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", n + 1), "expected `key = value`"))?;
            let k = k.trim();
            if raw.entries.contains_key(k) {
                return Err(Error::config(k, format!("duplicate key on line {}", n + 1)));
            }
            raw.set(k, v.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if spec_for(key).is_none() {
            return Err(Error::config(key, "unknown key"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.entries
            .get(key)
            .map(String::as_str)
            .or_else(|| spec_for(key).map(|k| k.default))
            .unwrap_or("")
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key);
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(Error::config(key, format!("`{v}` is not a finite number"))),
        }
    }

    fn int<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.get(key);
        v.parse()
            .map_err(|_| Error::config(key, format!("`{v}` is not a non-negative integer")))
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.get(key);
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Error::config(key, format!("`{s}` is not a finite number"))),
            })
            .collect()
    }
}

/// Splits a command-line `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::config(s, "override must be `key=value`"))?;
    let k = k.trim();
    if spec_for(k).is_none() {
        return Err(Error::config(k, "unknown key"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Paraxial,
    Quadrature,
    Propagation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Paraxial => "paraxial",
            Method::Quadrature => "quadrature",
            Method::Propagation => "propagation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn samples(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }

    /// `count` samples over `[min, max)`, as needed by periodic propagation.
    pub fn periodic_samples(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let half = 0.5 * (self.max - self.min);
        let mid = 0.5 * (self.max + self.min);
        periodic_axis(half, self.count).into_iter().map(|x| x + mid).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub p_values: Vec<f64>,
    pub kappa_values: Vec<f64>,
    pub branch: Option<Sign>,
    pub p1_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub wavepacket: WavepacketSpec,
    pub times: Vec<f64>,
    pub x1: AxisSpec,
    pub x2: AxisSpec,
    pub x3: AxisSpec,
    pub method: Method,
    pub n_perp: usize,
    pub n_p: usize,
    pub nodes_file: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Correlation half-window in units of `Δζ`; `None` when disabled.
    pub zeta_window: Option<f64>,
    pub fig2: Fig2Config,
    raw: RawConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut raw = match path {
            Some(p) => RawConfig::parse(&std::fs::read_to_string(p)?)?,
            None => RawConfig::default(),
        };
        for o in overrides {
            let (k, v) = parse_override(o)?;
            raw.set(&k, &v)?;
        }
        RunConfig::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let modes: Vec<ModeSpec> =
            super::parse_modes(raw.get("wavepacket.modes")).map_err(|m| Error::config("wavepacket.modes", m))?;
        let wavepacket = WavepacketSpec {
            m: raw.f64("wavepacket.m")?,
            v_a: raw.f64("wavepacket.v_a")?,
            p_bar: raw.f64("wavepacket.p_bar")?,
            w: raw.f64("wavepacket.w")?,
            delta_zeta: raw.f64("wavepacket.delta_zeta")?,
            envelope_exponent: raw.int("wavepacket.envelope_exponent")?,
            modes,
        };
        wavepacket.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => {
                let field = match name {
                    "mass" | "m" => "wavepacket.m".to_string(),
                    n => format!("wavepacket.{n}"),
                };
                Error::config(field, reason)
            }
            Error::Luminal => Error::config("wavepacket.v_a", e.to_string()),
            other => other,
        })?;

        let times = raw.list("grid.x0")?;
        if times.is_empty() {
            return Err(Error::config("grid.x0", "at least one time is required"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("grid.x0", "times must be strictly increasing"));
        }
        let axis = |name: &str| -> Result<AxisSpec> {
            let a = AxisSpec {
                min: raw.f64(&format!("grid.{name}.min"))?,
                max: raw.f64(&format!("grid.{name}.max"))?,
                count: raw.int(&format!("grid.{name}.count"))?,
            };
            let field = format!("grid.{name}");
            match a.count {
                0 => Err(Error::config(field + ".count", "must be at least 1")),
                1 if a.max != a.min => Err(Error::config(field, "a single sample needs min = max")),
                1 => Ok(a),
                _ if !(a.max > a.min) => Err(Error::config(field, "zero or negative extent")),
                _ => Ok(a),
            }
        };
        let (x1, x2, x3) = (axis("x1")?, axis("x2")?, axis("x3")?);
        let points = x1
            .count
            .checked_mul(x2.count)
            .and_then(|n| n.checked_mul(x3.count))
            .filter(|&n| n <= MAX_GRID_POINTS)
            .ok_or_else(|| Error::config("grid", format!("more than {MAX_GRID_POINTS} points per time")))?;
        debug_assert!(points > 0);

        let method = match raw.get("evaluation.method") {
            "paraxial" => Method::Paraxial,
            "quadrature" => Method::Quadrature,
            "propagation" => Method::Propagation,
            other => {
                return Err(Error::config(
                    "evaluation.method",
                    format!("`{other}` is not paraxial, quadrature or propagation"),
                ))
            }
        };
        if method == Method::Propagation {
            if let Some((name, _)) = [("x1", x1), ("x2", x2), ("x3", x3)].iter().find(|(_, a)| a.count < 2) {
                return Err(Error::config(
                    format!("grid.{name}.count"),
                    "propagation needs every spatial axis sampled at least twice",
                ));
            }
        }
        let n_perp: usize = raw.int("evaluation.n_perp")?;
        let n_p: usize = raw.int("evaluation.n_p")?;
        if n_perp < 8 {
            return Err(Error::config("evaluation.n_perp", "must be at least 8"));
        }
        if n_p < 8 {
            return Err(Error::config("evaluation.n_p", "must be at least 8"));
        }
        let nodes_file = Some(raw.get("evaluation.nodes"))
            .filter(|s| !s.is_empty())
            .map(PathBuf::from);
        let output_dir = PathBuf::from(raw.get("output.dir"));
        if output_dir.as_os_str().is_empty() {
            return Err(Error::config("output.dir", "must not be empty"));
        }
        let seed: u64 = raw.int("run.seed")?;
        let window = raw.f64("diagnose.zeta_window")?;
        if window < 0.0 {
            return Err(Error::config("diagnose.zeta_window", "must be >= 0"));
        }

        let branch = match raw.get("fig2.branch") {
            "auto" => None,
            "plus" | "+" => Some(Sign::Plus),
            "minus" | "-" => Some(Sign::Minus),
            other => return Err(Error::config("fig2.branch", format!("`{other}` is not auto, plus or minus"))),
        };
        let kappa_values = raw.list("fig2.kappa_values")?;
        if !kappa_values.is_empty() && branch.is_none() {
            return Err(Error::config(
                "fig2.branch",
                "kappa_values fix P only up to a root; set fig2.branch to plus or minus",
            ));
        }
        let p1_max = raw.f64("fig2.p1_max")?;
        if !(p1_max > 0.0) {
            return Err(Error::config("fig2.p1_max", "must be positive"));
        }
        let samples: usize = raw.int("fig2.samples")?;
        if !(2..=1_000_000).contains(&samples) {
            return Err(Error::config("fig2.samples", "must be between 2 and 1000000"));
        }

        Ok(RunConfig {
            wavepacket,
            times,
            x1,
            x2,
            x3,
            method,
            n_perp,
            n_p,
            nodes_file,
            output_dir,
            seed,
            zeta_window: (window > 0.0).then_some(window),
            fig2: Fig2Config {
                p_values: raw.list("fig2.p_values")?,
                kappa_values,
                branch,
                p1_max,
                samples,
            },
            raw,
        })
    }

    /// Spatial axes of the evaluation grid at time `t`.
    pub fn axes_at(&self, t: f64) -> [Vec<f64>; 4] {
        if self.method == Method::Propagation {
            [
                vec![t],
                self.x1.periodic_samples(),
                self.x2.periodic_samples(),
                self.x3.periodic_samples(),
            ]
        } else {
            [vec![t], self.x1.samples(), self.x2.samples(), self.x3.samples()]
        }
    }

    /// Configuration echo plus derived carrier quantities, for file headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = KEYS
            .iter()
            .filter(|k| !k.key.starts_with("fig2.") && k.key != "output.dir" && k.key != "evaluation.nodes")
            .map(|k| (k.key.to_string(), self.raw.get(k.key).to_string()))
            .collect();
        if let Some(entry) = out.iter_mut().find(|(k, _)| k == "wavepacket.modes") {
            entry.1 = format_modes(&self.wavepacket.modes);
        }
        if let Some(entry) = out.iter_mut().find(|(k, _)| k == "grid.x0") {
            entry.1 = self.times.iter().map(|t| format_f64(*t)).collect::<Vec<_>>().join(", ");
        }
        let spec = &self.wavepacket;
        if let (Ok(group), Ok(carrier)) = (spec.group(), spec.carrier()) {
            out.push(("derived.kappa".into(), format_f64(carrier.kappa)));
            out.push(("derived.beta_p".into(), format_f64(carrier.beta_p)));
            out.push(("derived.v_n".into(), format_f64(carrier.v_n())));
            if let Ok(x) = xi0(&carrier, &group, spec.w) {
                out.push(("derived.xi0".into(), format_f64(x)));
            }
        }
        out
    }
}
