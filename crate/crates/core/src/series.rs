//! Per-time scalar observables and their CSV form.
//!
//! CSV layout: `# key = value` metadata lines, one header line `t,<columns>`,
//! then one row per time. Numbers use 17 significant digits in scientific
//! notation; missing values are written as `null`; lines end in `\n`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Marker written for undefined values.
pub const NULL_MARKER: &str = "null";

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    columns: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<Option<f64>>>,
    metadata: Vec<(String, String)>,
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl TimeSeries {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            times: Vec::new(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::InvalidSeries(format!(
                "row of width {} for {} columns",
                values.len(),
                self.columns.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if t.is_nan() || t <= last {
                return Err(Error::InvalidSeries(format!("time {t} does not increase past {last}")));
            }
        }
        self.times.push(t);
        self.rows.push(values);
        Ok(())
    }

    pub fn push_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Column values with `null` entries dropped.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().flatten().collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push('t');
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            out.push_str(&format_number(*t));
            for v in row {
                out.push(',');
                match v {
                    Some(x) => out.push_str(&format_number(*x)),
                    None => out.push_str(NULL_MARKER),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut s = TimeSeries::new(vec!["b".into(), "m".into()]);
        s.push_metadata("scenario", "chsh");
        s.push(0.0, vec![Some(1.0), None]).unwrap();
        s.push(0.5, vec![Some(0.25), Some(-3.0)]).unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# scenario = chsh");
        assert_eq!(lines[1], "t,b,m");
        assert_eq!(lines[2], "0.0000000000000000e0,1.0000000000000000e0,null");
        assert_eq!(lines[3], "5.0000000000000000e-1,2.5000000000000000e-1,-3.0000000000000000e0");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn rejects_bad_rows() {
        let mut s = TimeSeries::new(vec!["x".into()]);
        assert!(s.push(0.0, vec![]).is_err());
        s.push(1.0, vec![Some(1.0)]).unwrap();
        assert!(s.push(1.0, vec![Some(1.0)]).is_err());
        assert!(s.push(0.5, vec![Some(1.0)]).is_err());
    }

    #[test]
    fn seventeen_significant_digits() {
        let x = 0.1 + 0.2;
        let text = format_number(x);
        assert_eq!(text.parse::<f64>().unwrap(), x);
        let mantissa = text.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }
}
