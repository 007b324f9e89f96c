//! Deterministic CSV assembly: header row, '.' decimal, scientific notation
//! with a configurable number of significant digits, LF line endings. Values
//! are validated finite on write so a broken row can never reach disk.

use anyhow::{bail, Result};

pub struct CsvTable {
    columns: Vec<String>,
    precision: usize,
    body: String,
    rows: usize,
}

impl CsvTable {
    pub fn new(columns: &[&str], precision: usize) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            precision,
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push_row(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.columns.len() {
            bail!(
                "row has {} values, header has {} columns",
                values.len(),
                self.columns.len()
            );
        }
        for (v, name) in values.iter().zip(self.columns.iter()) {
            if !v.is_finite() {
                bail!("non-finite value {v} in column {name}");
            }
        }
        let mut first = true;
        for v in values {
            if !first {
                self.body.push(',');
            }
            first = false;
            self.body.push_str(&format_float(*v, self.precision));
        }
        self.body.push('\n');
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        out.push_str(&self.body);
        out
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
    }
}

/// Scientific notation with `sig` significant digits; -0 is normalized so
/// byte-level determinism does not depend on the sign of a zero.
pub fn format_float(value: f64, sig: usize) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{:.*e}", sig.saturating_sub(1), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_stable() {
        assert_eq!(format_float(800.0, 17), "8.0000000000000000e2");
        assert_eq!(format_float(-0.0, 17), "0.0000000000000000e0");
        assert_eq!(format_float(0.1, 3), "1.00e-1");
    }

    #[test]
    fn rejects_bad_rows() {
        let mut t = CsvTable::new(&["a", "b"], 17);
        assert!(t.push_row(&[1.0]).is_err());
        assert!(t.push_row(&[1.0, f64::NAN]).is_err());
        t.push_row(&[1.0, 2.0]).unwrap();
        assert_eq!(t.rows(), 1);
        assert!(t.to_csv().starts_with("a,b\n"));
        assert!(t.to_csv().ends_with('\n'));
    }
}
