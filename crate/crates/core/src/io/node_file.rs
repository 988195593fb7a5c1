//! Text serialization of spectral node sets.
//!
//! Header lines as in grid files, an empty line, then one node per line:
//! `p1 p2 P weight p_c E Re(f) Im(f)`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::header::{format_f64, format_f64_list, parse_f64, parse_f64_list, Header};
use super::{format_modes, parse_modes};
use crate::error::{Error, Result};
use crate::spectrum::{NodeSetMeta, SpectralNode, SpectralNodeSet, TransverseRule, WavepacketSpec};

pub const NODE_MAGIC: &str = "dirac-stwp-nodes";
pub const NODE_VERSION: u32 = 1;

fn rule_name(r: TransverseRule) -> &'static str {
    match r {
        TransverseRule::GaussHermite => "gauss-hermite",
        TransverseRule::Trapezoid => "trapezoid",
    }
}

pub fn write_nodes<W: Write>(mut out: W, set: &SpectralNodeSet) -> Result<()> {
    let s = &set.spec;
    let m = &set.meta;
    let mut h = String::new();
    let mut kv = |k: &str, v: String| h.push_str(&format!("{k} = {v}\n"));
    kv("magic", NODE_MAGIC.into());
    kv("version", NODE_VERSION.to_string());
    kv("count", set.nodes.len().to_string());
    kv("columns", "p1 p2 P weight pc energy re im".into());
    kv("spec.m", format_f64(s.m));
    kv("spec.v_a", format_f64(s.v_a));
    kv("spec.p_bar", format_f64(s.p_bar));
    kv("spec.w", format_f64(s.w));
    kv("spec.delta_zeta", format_f64(s.delta_zeta));
    kv("spec.envelope_exponent", s.envelope_exponent.to_string());
    kv("spec.modes", format_modes(&s.modes));
    kv("meta.n_perp", m.n_perp.to_string());
    kv("meta.n_p", m.n_p.to_string());
    kv("meta.rule", rule_name(m.rule).into());
    kv("meta.p_bounds", format_f64_list(&[m.p_bounds.0, m.p_bounds.1]));
    kv("meta.pperp_bound", format_f64(m.pperp_bound));
    kv("meta.discarded_fraction", format_f64(m.discarded_fraction));
    kv("meta.truncated_fraction", format_f64(m.truncated_fraction));
    h.push('\n');
    let mut w = BufWriter::new(&mut out);
    w.write_all(h.as_bytes())?;
    for n in &set.nodes {
        let row = [n.p1, n.p2, n.big_p, n.weight, n.pc, n.energy, n.amplitude.re, n.amplitude.im];
        writeln!(w, "{}", format_f64_list(&row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_nodes<R: Read>(mut input: R) -> Result<SpectralNodeSet> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Format("node file is not UTF-8".into()),
            _ => Error::Io(e),
        })?;
    parse_nodes(&text)
}

pub fn parse_nodes(text: &str) -> Result<SpectralNodeSet> {
    let (head, body) = text
        .split_once("\n\n")
        .ok_or_else(|| Error::Format("header is not terminated by an empty line".into()))?;
    let h = Header::parse(head)?;
    h.expect("magic", NODE_MAGIC)?;
    let version: u32 = h.parse_value("version")?;
    if version != NODE_VERSION {
        return Err(Error::Format(format!("unsupported node file version {version}")));
    }
    let count: usize = h.parse_value("count")?;
    let num = |k: &str| parse_f64(h.require(k)?);
    let spec = WavepacketSpec {
        m: num("spec.m")?,
        v_a: num("spec.v_a")?,
        p_bar: num("spec.p_bar")?,
        w: num("spec.w")?,
        delta_zeta: num("spec.delta_zeta")?,
        envelope_exponent: h.parse_value("spec.envelope_exponent")?,
        modes: parse_modes(h.require("spec.modes")?).map_err(Error::Format)?,
    };
    spec.validate().map_err(|e| Error::Format(format!("invalid spec: {e}")))?;
    let bounds = parse_f64_list(h.require("meta.p_bounds")?)?;
    let [lo, hi] = bounds[..] else {
        return Err(Error::Format("meta.p_bounds needs two values".into()));
    };
    let rule = match h.require("meta.rule")? {
        "gauss-hermite" => TransverseRule::GaussHermite,
        "trapezoid" => TransverseRule::Trapezoid,
        r => return Err(Error::Format(format!("unknown transverse rule `{r}`"))),
    };
    let meta = NodeSetMeta {
        n_perp: h.parse_value("meta.n_perp")?,
        n_p: h.parse_value("meta.n_p")?,
        rule,
        p_bounds: (lo, hi),
        pperp_bound: num("meta.pperp_bound")?,
        discarded_fraction: num("meta.discarded_fraction")?,
        truncated_fraction: num("meta.truncated_fraction")?,
    };

    let mut nodes = Vec::with_capacity(count.min(1 << 20));
    for (i, line) in body.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        if i >= count {
            return Err(Error::Format(format!("more than the declared {count} nodes")));
        }
        let v = parse_f64_list(line)?;
        let [p1, p2, big_p, weight, pc, energy, re, im] = v[..] else {
            return Err(Error::Format(format!("node {i} has {} columns, expected 8", v.len())));
        };
        if !(weight >= 0.0 && energy > 0.0) {
            return Err(Error::Format(format!("node {i} has weight {weight} and energy {energy}")));
        }
        nodes.push(SpectralNode {
            p1,
            p2,
            big_p,
            weight,
            pc,
            energy,
            amplitude: Complex64::new(re, im),
        });
    }
    if nodes.len() != count {
        return Err(Error::Format(format!("declared {count} nodes, found {}", nodes.len())));
    }
    Ok(SpectralNodeSet { spec, nodes, meta })
}

pub fn save_nodes(path: &Path, set: &SpectralNodeSet) -> Result<()> {
    write_nodes(File::create(path)?, set)
}

pub fn load_nodes(path: &Path) -> Result<SpectralNodeSet> {
    read_nodes(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{build_node_set, normalize};

    #[test]
    fn round_trip_preserves_every_bit() {
        let set = normalize(&build_node_set(&WavepacketSpec::reference(), 8, 8).unwrap()).unwrap();
        let mut bytes = Vec::new();
        write_nodes(&mut bytes, &set).unwrap();
        let back = read_nodes(&bytes[..]).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn rejects_truncated_and_corrupt_files() {
        let set = SpectralNodeSet::plane_wave(&WavepacketSpec::reference()).unwrap();
        let mut bytes = Vec::new();
        write_nodes(&mut bytes, &set).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(parse_nodes(&text).is_ok());
        assert!(parse_nodes(text.trim_end().rsplit_once('\n').unwrap().0).is_err());
        assert!(parse_nodes(&text.replace("count = 1", "count = 2")).is_err());
        assert!(parse_nodes(&text.replace("spec.w = 0.1", "spec.w = -0.1")).is_err());
        assert!(parse_nodes(&text.replace("gauss-hermite", "simpson")).is_err());
    }
}
