//! File formats: run configuration, grid files, node sets and curve tables.

pub mod config;
pub mod curve_table;
pub mod grid_file;
pub(crate) mod header;
pub mod node_file;

pub use config::{parse_override, Method, RawConfig, RunConfig};
pub use curve_table::{parse_curve_table, write_curve_table, CurveRow};
pub use grid_file::{load_grid, parse_grid, read_grid, save_grid, write_grid, GridFile};
pub use node_file::{load_nodes, parse_nodes, read_nodes, save_nodes, write_nodes};

use num_complex::Complex64;

use crate::spectrum::ModeSpec;

/// `n ell re im` per mode, modes separated by `;`.
pub(crate) fn format_modes(modes: &[ModeSpec]) -> String {
    modes
        .iter()
        .map(|m| format!("{} {} {:?} {:?}", m.n, m.ell, m.weight.re, m.weight.im))
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn parse_modes(s: &str) -> Result<Vec<ModeSpec>, String> {
    let mut out = Vec::new();
    for (i, part) in s.split(';').enumerate() {
        let f: Vec<&str> = part.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        let (n, ell, re, im) = match f[..] {
            [n, ell] => (n, ell, "1", "0"),
            [n, ell, re] => (n, ell, re, "0"),
            [n, ell, re, im] => (n, ell, re, im),
            _ => return Err(format!("mode {i}: expected `n ell [re [im]]`, got `{}`", part.trim())),
        };
        let n: u32 = n.parse().map_err(|_| format!("mode {i}: bad radial index `{n}`"))?;
        let ell: i32 = ell.parse().map_err(|_| format!("mode {i}: bad azimuthal index `{ell}`"))?;
        if ell.unsigned_abs() > 64 || n > 64 {
            return Err(format!("mode {i}: indices above 64 are not supported"));
        }
        let num = |v: &str| match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("mode {i}: bad weight component `{v}`")),
        };
        out.push(ModeSpec::new(n, ell, Complex64::new(num(re)?, num(im)?)));
    }
    if out.is_empty() {
        return Err("at least one mode is required".into());
    }
    Ok(out)
}
