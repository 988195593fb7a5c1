//! Self-describing grid files.
//!
//! A text header of `key = value` lines ends at the first empty line and
//! is followed by little-endian `f64` values, row-major over
//! `(x0, x1, x2, x3)` with `x3` fastest, nine per point:
//! `Re c0, Im c0, …, Re c3, Im c3, ψ†ψ`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::header::{format_f64_list, parse_f64_list, Header};
use crate::error::{Error, Result};
use crate::evaluate::grid::{Axis, FieldGrid};
use crate::kinematics::Bispinor;

pub const GRID_MAGIC: &str = "dirac-stwp-grid";
pub const GRID_VERSION: u32 = 1;
pub const COMPONENTS: usize = 9;
const MAX_HEADER_BYTES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub grid: FieldGrid,
    /// Free-form parameter echo, in file order.
    pub params: Vec<(String, String)>,
}

impl GridFile {
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn write_grid<W: Write>(mut out: W, grid: &FieldGrid, params: &[(String, String)]) -> Result<()> {
    let mut h = String::new();
    h.push_str(&format!("magic = {GRID_MAGIC}\n"));
    h.push_str(&format!("version = {GRID_VERSION}\n"));
    h.push_str(&format!("components = {COMPONENTS}\n"));
    h.push_str("layout = re_c0 im_c0 re_c1 im_c1 re_c2 im_c2 re_c3 im_c3 density\n");
    h.push_str("byte_order = little\n");
    for a in Axis::ALL {
        let ax = grid.axis(a);
        h.push_str(&format!("axis.{}.count = {}\n", a.name(), ax.len()));
        h.push_str(&format!("axis.{}.values = {}\n", a.name(), format_f64_list(ax)));
    }
    for (k, v) in params {
        if !super::header::valid_key(k) || v.contains('\n') || v.trim() != v || k.starts_with("axis.") {
            return Err(Error::Format(format!("unwritable header entry `{k}`")));
        }
        let reserved = ["magic", "version", "components", "layout", "byte_order"];
        if reserved.contains(&k.as_str()) {
            return Err(Error::Format(format!("header key `{k}` is reserved")));
        }
        h.push_str(&format!("{k} = {v}\n"));
    }
    h.push('\n');
    out.write_all(h.as_bytes())?;

    let mut buf = Vec::with_capacity(grid.len().min(1 << 16) * COMPONENTS * 8);
    for (v, d) in grid.values.iter().zip(&grid.density) {
        for c in &v.0 {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        buf.extend_from_slice(&d.to_le_bytes());
        if buf.len() >= (1 << 16) * COMPONENTS * 8 {
            out.write_all(&buf)?;
            buf.clear();
        }
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn read_grid<R: Read>(mut input: R) -> Result<GridFile> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    parse_grid(&bytes)
}

/// Parses a complete grid file held in memory.
pub fn parse_grid(bytes: &[u8]) -> Result<GridFile> {
    let (header, payload) = split_header(bytes)?;
    let header = Header::parse(header)?;
    header.expect("magic", GRID_MAGIC)?;
    let version: u32 = header.parse_value("version")?;
    if version != GRID_VERSION {
        return Err(Error::Format(format!("unsupported grid version {version}")));
    }
    let components: usize = header.parse_value("components")?;
    if components != COMPONENTS {
        return Err(Error::Format(format!("expected {COMPONENTS} components, found {components}")));
    }
    if let Some(order) = header.get("byte_order") {
        if order != "little" {
            return Err(Error::Format(format!("unsupported byte order `{order}`")));
        }
    }

    let mut axes: [Vec<f64>; 4] = Default::default();
    let mut points: usize = 1;
    for a in Axis::ALL {
        let count: usize = header.parse_value(&format!("axis.{}.count", a.name()))?;
        let values = parse_f64_list(header.require(&format!("axis.{}.values", a.name()))?)?;
        if values.len() != count {
            return Err(Error::Format(format!(
                "axis {} declares {count} samples but lists {}",
                a.name(),
                values.len()
            )));
        }
        points = points
            .checked_mul(count)
            .ok_or_else(|| Error::Format("grid size overflows".into()))?;
        axes[a as usize] = values;
    }
    let expected = points
        .checked_mul(COMPONENTS * 8)
        .ok_or_else(|| Error::Format("grid size overflows".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload holds {} bytes, header implies {expected}",
            payload.len()
        )));
    }

    let mut values = Vec::with_capacity(points);
    let mut stored_density = Vec::with_capacity(points);
    for rec in payload.chunks_exact(COMPONENTS * 8) {
        let f = |i: usize| f64::from_le_bytes(rec[8 * i..8 * i + 8].try_into().expect("8-byte slice"));
        let v = Bispinor(std::array::from_fn(|c| Complex64::new(f(2 * c), f(2 * c + 1))));
        let d = f(8);
        if !(v.0.iter().all(|c| c.re.is_finite() && c.im.is_finite()) && d.is_finite()) {
            return Err(Error::Format("non-finite sample in payload".into()));
        }
        values.push(v);
        stored_density.push(d);
    }
    let grid = FieldGrid::new(axes, values).map_err(|e| Error::Format(e.to_string()))?;
    for (s, d) in stored_density.iter().zip(&grid.density) {
        if (s - d).abs() > 1e-12 * d.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Format(format!(
                "stored density {s} disagrees with spinor density {d}"
            )));
        }
    }
    Ok(GridFile {
        grid,
        params: header.extra(&["magic", "version", "components", "layout", "byte_order"], "axis."),
    })
}

fn split_header(bytes: &[u8]) -> Result<(&str, &[u8])> {
    let limit = bytes.len().min(MAX_HEADER_BYTES);
    let end = bytes[..limit]
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| Error::Format("header is not terminated by an empty line".into()))?;
    let text = std::str::from_utf8(&bytes[..end + 1])
        .map_err(|_| Error::Format("header is not UTF-8".into()))?;
    Ok((text, &bytes[end + 2..]))
}

pub fn save_grid(path: &Path, grid: &FieldGrid, params: &[(String, String)]) -> Result<()> {
    let file = File::create(path)?;
    write_grid(BufWriter::new(file), grid, params)
}

pub fn load_grid(path: &Path) -> Result<GridFile> {
    read_grid(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::grid::linspace;

    fn sample() -> FieldGrid {
        let axes = [vec![0.5], linspace(-1.0, 1.0, 3), vec![0.0], linspace(0.1, 0.7, 4)];
        FieldGrid::fill(axes, |x| {
            Bispinor([
                Complex64::new(x.x1, 1.0 / 3.0),
                Complex64::new(x.x3.sin(), -x.x3),
                Complex64::new(1e-300, 0.0),
                Complex64::new(0.1 + 0.2, std::f64::consts::PI),
            ])
        })
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = sample();
        let params = vec![("param.v_a".to_string(), "2".to_string())];
        let mut bytes = Vec::new();
        write_grid(&mut bytes, &g, &params).unwrap();
        let back = parse_grid(&bytes).unwrap();
        assert_eq!(back.param("param.v_a"), Some("2"));
        for (a, b) in g.values.iter().zip(&back.grid.values) {
            for (x, y) in a.0.iter().zip(&b.0) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        assert_eq!(g.axes, back.grid.axes);
        let mut again = Vec::new();
        write_grid(&mut again, &back.grid, &back.params).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn layout_is_little_endian_and_interleaved() {
        let g = sample();
        let mut bytes = Vec::new();
        write_grid(&mut bytes, &g, &[]).unwrap();
        let start = bytes.windows(2).position(|w| w == b"\n\n").unwrap() + 2;
        let first = f64::from_le_bytes(bytes[start..start + 8].try_into().unwrap());
        let im0 = f64::from_le_bytes(bytes[start + 8..start + 16].try_into().unwrap());
        let dens = f64::from_le_bytes(bytes[start + 64..start + 72].try_into().unwrap());
        assert_eq!(first, -1.0);
        assert_eq!(im0, 1.0 / 3.0);
        assert_eq!(dens, g.density[0]);
        assert_eq!(bytes.len() - start, g.len() * 72);
    }

    #[test]
    fn rejects_malformed_files() {
        let g = sample();
        let mut bytes = Vec::new();
        write_grid(&mut bytes, &g, &[]).unwrap();
        assert!(matches!(parse_grid(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        let text = String::from_utf8_lossy(&bytes[..200]).replace(GRID_MAGIC, "nope");
        assert!(parse_grid(text.as_bytes()).is_err());
        assert!(parse_grid(b"magic = dirac-stwp-grid\n").is_err());
        let bad = write_params_err(&g, "axis.x0.count");
        assert!(bad);
    }

    fn write_params_err(g: &FieldGrid, key: &str) -> bool {
        write_grid(Vec::new(), g, &[(key.to_string(), "1".to_string())]).is_err()
    }

    #[test]
    fn rejects_inconsistent_density() {
        let g = sample();
        let mut bytes = Vec::new();
        write_grid(&mut bytes, &g, &[]).unwrap();
        let start = bytes.windows(2).position(|w| w == b"\n\n").unwrap() + 2;
        bytes[start + 64..start + 72].copy_from_slice(&7.0f64.to_le_bytes());
        assert!(matches!(parse_grid(&bytes), Err(Error::Format(_))));
    }
}
