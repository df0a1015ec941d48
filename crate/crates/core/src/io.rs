//! Text formats: profile exchange files, DSV series and key-value summaries.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every value bit for bit.

use std::fmt::Write as _;

use crate::diagnostics::{DiagRecord, Field};
use crate::error::{HmcfError, Result};
use crate::geometry::profile::ProfileGrid;

/// Profile file: a `# t=<time> center=<x0>` header, then one `x f` pair
/// per line.
pub fn write_profile(grid: &ProfileGrid) -> String {
    let mut out = String::with_capacity(48 * grid.len());
    let _ = writeln!(out, "# t={} center={}", grid.t, grid.center);
    for (x, f) in grid.x.iter().zip(&grid.f) {
        let _ = writeln!(out, "{x} {f}");
    }
    out
}

/// Reads a profile file. Without a header, `t = 0` and the center is the
/// midpoint of the sampled range.
pub fn read_profile(text: &str) -> Result<ProfileGrid> {
    let mut t = 0.0;
    let mut center = None;
    let mut x = Vec::new();
    let mut f = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let bad = |message: String| HmcfError::Parse { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('#') {
            for token in header.split_whitespace() {
                let Some((k, v)) = token.split_once('=') else { continue };
                let value: f64 = v.parse().map_err(|_| bad(format!("{k}: expected a number, got {v:?}")))?;
                match k {
                    "t" => t = value,
                    "center" => center = Some(value),
                    _ => {}
                }
            }
            continue;
        }
        let mut cols = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(bad(format!("expected two columns `x f`, got {trimmed:?}")));
        };
        x.push(a.parse::<f64>().map_err(|_| bad(format!("x: expected a number, got {a:?}")))?);
        f.push(b.parse::<f64>().map_err(|_| bad(format!("f: expected a number, got {b:?}")))?);
    }
    if x.is_empty() {
        return Err(HmcfError::Parse { line: 0, message: "no profile rows".into() });
    }
    let center = center.unwrap_or_else(|| 0.5 * (x[0] + x[x.len() - 1]));
    ProfileGrid::new(x, f, t, center)
}

/// DSV header of a series file.
pub fn series_header(delimiter: char) -> String {
    Field::ALL.iter().map(|f| f.name()).collect::<Vec<_>>().join(&delimiter.to_string())
}

/// Series file: header row with the field names, one record per row.
pub fn write_series(series: &[DiagRecord], delimiter: char) -> String {
    let mut out = series_header(delimiter);
    out.push('\n');
    for r in series {
        for (k, field) in Field::ALL.iter().enumerate() {
            if k > 0 {
                out.push(delimiter);
            }
            let _ = write!(out, "{}", r.get(*field));
        }
        out.push('\n');
    }
    out
}

/// Reads the columns of a series file back as `(field, values)`.
pub fn read_series(text: &str, delimiter: char) -> Result<Vec<(Field, Vec<f64>)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(HmcfError::Parse { line: 0, message: "empty series".into() })?;
    let fields = header
        .split(delimiter)
        .map(|name| {
            Field::from_name(name.trim())
                .ok_or_else(|| HmcfError::Parse { line: 1, message: format!("unknown column {name:?}") })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<(Field, Vec<f64>)> = fields.iter().map(|&f| (f, Vec::new())).collect();
    for (idx, row) in lines {
        let values: Vec<&str> = row.split(delimiter).collect();
        if values.len() != fields.len() {
            return Err(HmcfError::Parse {
                line: idx + 1,
                message: format!("expected {} columns, got {}", fields.len(), values.len()),
            });
        }
        for (col, v) in columns.iter_mut().zip(values) {
            let value = v.trim().parse::<f64>().map_err(|_| HmcfError::Parse {
                line: idx + 1,
                message: format!("{}: expected a number, got {v:?}", col.0.name()),
            })?;
            col.1.push(value);
        }
    }
    Ok(columns)
}

/// Ordered key-value report, written as `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl std::fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Summary> {
        let mut s = Summary::new();
        for (idx, line) in text.lines().enumerate() {
            let line_t = line.trim();
            if line_t.is_empty() || line_t.starts_with('#') {
                continue;
            }
            let (k, v) = line_t
                .split_once('=')
                .ok_or_else(|| HmcfError::Parse { line: idx + 1, message: format!("expected key=value, got {line_t:?}") })?;
            s.push(k, v);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn profile_header_and_rows() {
        let g = ProfileGrid::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 0.0], 0.25, 0.5).unwrap();
        let text = write_profile(&g);
        assert!(text.starts_with("# t=0.25 center=0.5\n"));
        assert_eq!(read_profile(&text).unwrap(), g);
    }

    #[test]
    fn headerless_profile_centers_on_midpoint() {
        let g = read_profile("0 0\n1 1\n2 0\n").unwrap();
        assert_eq!(g.center, 1.0);
        assert_eq!(g.t, 0.0);
    }

    #[test]
    fn corrupt_profile_reports_line() {
        let e = read_profile("# t=0\n0 0\n1 x\n").unwrap_err();
        assert!(matches!(e, HmcfError::Parse { line: 3, .. }), "{e}");
        assert!(read_profile("0 0 0\n").is_err());
        assert!(read_profile("").is_err());
    }

    #[test]
    fn summary_round_trip() {
        let mut s = Summary::new();
        s.push("termination", "extinct").push("final_time", 0.999);
        let back = Summary::parse(&s.to_text()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.get("final_time"), Some("0.999"));
    }

    proptest! {
        #[test]
        fn profile_round_trip_is_bit_exact(
            values in proptest::collection::vec(1e-6f64..10.0, 3..40),
            t in 0.0f64..5.0,
            c in -3.0f64..3.0,
        ) {
            let n = values.len();
            let x: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * 0.123456789 + values[i] * 1e-3).collect();
            let g = ProfileGrid::new(x, values.clone(), t, c).unwrap();
            let back = read_profile(&write_profile(&g)).unwrap();
            for (a, b) in back.f.iter().zip(&g.f) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            for (a, b) in back.x.iter().zip(&g.x) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(back.t.to_bits(), t.to_bits());
            prop_assert_eq!(back.center.to_bits(), c.to_bits());
        }
    }
}
