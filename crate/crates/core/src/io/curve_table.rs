//! Momentum-surface projection tables: CSV with header `P,kappa,p1,p3`.

use std::io::Write;

use super::header::{format_f64, parse_f64};
use crate::error::{Error, Result};

pub const CURVE_HEADER: &str = "P,kappa,p1,p3";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub p: f64,
    pub kappa: f64,
    pub p1: f64,
    pub p3: f64,
}

pub fn write_curve_table<W: Write>(mut out: W, rows: &[CurveRow]) -> Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            format_f64(r.p),
            format_f64(r.kappa),
            format_f64(r.p1),
            format_f64(r.p3)
        )?;
    }
    Ok(())
}

pub fn parse_curve_table(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some(CURVE_HEADER) => {}
        other => {
            return Err(Error::Format(format!(
                "curve table must start with `{CURVE_HEADER}`, found {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .split(',')
            .map(|f| parse_f64(f.trim()))
            .collect::<Result<Vec<_>>>()?;
        let [p, kappa, p1, p3] = v[..] else {
            return Err(Error::Format(format!("row {} has {} columns, expected 4", i + 1, v.len())));
        };
        rows.push(CurveRow { p, kappa, p1, p3 });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_empty_table() {
        let rows = vec![
            CurveRow { p: 2.0, kappa: 5f64.sqrt() - 4.0, p1: 0.1, p3: 2.0020201 },
            CurveRow { p: 1.5, kappa: -1.0, p1: -0.3, p3: 1.5 },
        ];
        let mut out = Vec::new();
        write_curve_table(&mut out, &rows).unwrap();
        assert_eq!(parse_curve_table(std::str::from_utf8(&out).unwrap()).unwrap(), rows);

        let mut empty = Vec::new();
        write_curve_table(&mut empty, &[]).unwrap();
        assert_eq!(parse_curve_table(std::str::from_utf8(&empty).unwrap()).unwrap(), vec![]);
        assert!(parse_curve_table("P,p1\n").is_err());
        assert!(parse_curve_table("P,kappa,p1,p3\n1,2,3\n").is_err());
    }
}
