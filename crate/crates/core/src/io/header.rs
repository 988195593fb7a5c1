//! `key = value` headers shared by the grid and node-set files.

use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-')
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub(crate) fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("header line {} has no `=`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(Error::Format(format!("invalid header key `{k}`")));
            }
            if entries.iter().any(|(e, _)| e == k) {
                return Err(Error::Format(format!("duplicate header key `{k}`")));
            }
            entries.push((k.to_string(), v.to_string()));
        }
        Ok(Header { entries })
    }

    pub(crate) fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub(crate) fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Format(format!("missing header key `{key}`")))
    }

    pub(crate) fn parse_value<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.require(key)?;
        v.parse()
            .map_err(|_| Error::Format(format!("bad value `{v}` for `{key}`")))
    }

    pub(crate) fn expect(&self, key: &str, value: &str) -> Result<()> {
        match self.require(key)? {
            v if v == value => Ok(()),
            v => Err(Error::Format(format!("`{key}` is `{v}`, expected `{value}`"))),
        }
    }

    /// Entries not in `skip` and not starting with `skip_prefix`, in file order.
    pub(crate) fn extra(&self, skip: &[&str], skip_prefix: &str) -> Vec<(String, String)> {
        self.entries
            .iter()
            .filter(|(k, _)| !skip.contains(&k.as_str()) && !k.starts_with(skip_prefix))
            .cloned()
            .collect()
    }
}

/// Shortest round-trip decimal form.
pub(crate) fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

pub(crate) fn format_f64_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format_f64(*x)).collect::<Vec<_>>().join(" ")
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Format(format!("`{s}` is not a finite number"))),
    }
}

pub(crate) fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace().map(parse_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let xs = [0.1 + 0.2, -1e-300, 1e300, 5e-324, -0.0, 12345.678];
        let back = parse_f64_list(&format_f64_list(&xs)).unwrap();
        for (a, b) in xs.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(parse_f64("inf").is_err());
        assert!(parse_f64("NaN").is_err());
    }

    #[test]
    fn header_lookup_and_errors() {
        let h = Header::parse("a = 1\nb.c = x y\n").unwrap();
        assert_eq!(h.get("b.c"), Some("x y"));
        assert_eq!(h.parse_value::<u32>("a").unwrap(), 1);
        assert!(h.require("zz").is_err());
        assert!(h.expect("a", "2").is_err());
        assert!(Header::parse("a = 1\na = 2\n").is_err());
        assert!(Header::parse("novalue\n").is_err());
        assert!(Header::parse("bad key = 1\n").is_err());
        assert_eq!(h.extra(&["a"], "zzz"), vec![("b.c".to_string(), "x y".to_string())]);
    }
}
