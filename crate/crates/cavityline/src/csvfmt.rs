//! Deterministic CSV rendering with `#` metadata comments.
//!
//! Numbers are written as `{:.15e}` (16 significant digits, well beyond
//! the 12 the data contract requires) and the formatting is locale-free,
//! so identical inputs produce byte-identical files.

use std::fmt::Write as _;

/// Render one float in the fixed scientific format used for data cells.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.15e}")
}

/// Incremental CSV document builder: comments, one header row, data rows.
#[derive(Debug, Clone)]
pub struct CsvBuilder {
    buf: String,
}

impl CsvBuilder {
    /// Start a document with a `# <title>` line.
    pub fn new(title: &str) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# {title}");
        Self { buf }
    }

    /// Append a `# key: value` metadata comment.
    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.buf, "# {key}: {value}");
        self
    }

    /// Append the column header row.
    pub fn header(&mut self, cols: &[&str]) -> &mut Self {
        let _ = writeln!(self.buf, "{}", cols.join(","));
        self
    }

    /// Append one data row of floats.
    pub fn row(&mut self, vals: &[f64]) -> &mut Self {
        for (i, v) in vals.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{v:.15e}");
        }
        self.buf.push('\n');
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_layout() {
        let mut b = CsvBuilder::new("demo");
        b.comment("chi", 0.5).header(&["t", "w"]).row(&[0.0, 1.0]).row(&[0.5, -0.25]);
        let text = b.finish();
        assert_eq!(
            text,
            "# demo\n# chi: 0.5\nt,w\n0.000000000000000e0,1.000000000000000e0\n\
             5.000000000000000e-1,-2.500000000000000e-1\n"
        );
    }

    #[test]
    fn floats_reparse_to_sixteen_digits() {
        for x in [0.0, -1.5, 3.0e-17, 123456.789, 0.1 + 0.2, -9.87e-300] {
            let s = fmt_float(x);
            let y: f64 = s.parse().unwrap();
            let scale = x.abs().max(f64::MIN_POSITIVE);
            assert!((y - x).abs() <= 1e-15 * scale, "{x} -> {s} -> {y}");
        }
    }
}
