//! Sampled one-dimensional reference solutions.

use crate::error::{Error, Result};
use std::fmt::Write;
use std::path::Path;

/// Text format: `#` header lines with `system`, `time` and `columns` keys,
/// then whitespace-separated rows whose first column is `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceProfile {
    pub system: String,
    pub time: f64,
    /// Column names, the coordinate `x` or `y` first.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ReferenceProfile {
    pub fn new(system: &str, time: f64, columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self {
            system: system.to_string(),
            time,
            columns,
            rows,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.columns.len() < 2 || !matches!(self.columns[0].as_str(), "x" | "y") {
            return Err(Error::Parse {
                line: 0,
                message: "columns must start with the coordinate x or y and name at least one variable".into(),
            });
        }
        for (k, r) in self.rows.iter().enumerate() {
            if r.len() != self.columns.len() {
                return Err(Error::Parse {
                    line: k + 1,
                    message: format!("expected {} columns, found {}", self.columns.len(), r.len()),
                });
            }
        }
        for (k, w) in self.rows.windows(2).enumerate() {
            if !(w[1][0] > w[0][0]) {
                return Err(Error::Parse {
                    line: k + 2,
                    message: "x must be strictly increasing".into(),
                });
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut system = None;
        let mut time = None;
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: ln + 1, message };
            if let Some(h) = line.strip_prefix('#') {
                if let Some((k, v)) = h.split_once(':') {
                    let v = v.trim();
                    match k.trim() {
                        "system" => system = Some(v.to_string()),
                        "time" => time = Some(v.parse::<f64>().map_err(|e| err(e.to_string()))?),
                        "columns" => columns = Some(v.split_whitespace().map(str::to_string).collect()),
                        _ => {}
                    }
                }
                continue;
            }
            let ncol = columns.as_ref().map(|c| c.len()).ok_or_else(|| err("data before columns header".into()))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| err(format!("'{t}': {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != ncol {
                return Err(err(format!("expected {ncol} columns, found {}", row.len())));
            }
            rows.push(row);
        }
        let missing = |k: &str| Error::Parse {
            line: 0,
            message: format!("missing '{k}' header"),
        };
        Self::new(
            &system.ok_or_else(|| missing("system"))?,
            time.ok_or_else(|| missing("time"))?,
            columns.ok_or_else(|| missing("columns"))?,
            rows,
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# system: {}", self.system);
        let _ = writeln!(s, "# time: {:.17e}", self.time);
        let _ = writeln!(s, "# columns: {}", self.columns.join(" "));
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn x(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn values(&self, col: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[col]).collect()
    }

    /// Piecewise-linear interpolation of column `col`, constant beyond the
    /// end samples.
    pub fn interpolate(&self, col: usize, x: f64) -> f64 {
        let n = self.rows.len();
        if x <= self.rows[0][0] {
            return self.rows[0][col];
        }
        if x >= self.rows[n - 1][0] {
            return self.rows[n - 1][col];
        }
        let k = self.rows.partition_point(|r| r[0] <= x);
        let (a, b) = (&self.rows[k - 1], &self.rows[k]);
        let s = (x - a[0]) / (b[0] - a[0]);
        a[col] + s * (b[col] - a[col])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# system: euler\n# time: 0.2\n# columns: x rho\n0.0 1.0\n0.5 0.5\n1.0 0.125\n";

    #[test]
    fn parses_samples() {
        let p = ReferenceProfile::parse(SAMPLE).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.column("rho"), Some(1));
        assert_eq!(p.interpolate(1, 0.25), 0.75);
    }

    #[test]
    fn rejects_non_monotone_x() {
        let bad = SAMPLE.replace("0.5 0.5", "1.5 0.5");
        assert!(ReferenceProfile::parse(&bad).is_err());
    }

    #[test]
    fn rejects_wrong_column_count() {
        let bad = SAMPLE.replace("0.5 0.5", "0.5 0.5 3");
        assert!(ReferenceProfile::parse(&bad).is_err());
    }

    #[test]
    fn round_trip() {
        let p = ReferenceProfile::parse(SAMPLE).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.dat");
        p.save(&path).unwrap();
        assert_eq!(ReferenceProfile::load(&path).unwrap(), p);
    }
}
