//! Plot-ready CSV output with nine significant digits.

use std::fmt::Write as _;

/// Formats `x` with at most nine significant digits, `.` as decimal separator.
///
/// Plain decimal notation is used for magnitudes in `[1e-5, 1e15)`, scientific
/// notation otherwise. Negative zero prints as `0`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let rounded: f64 = sci.parse().expect("formatted float parses");
    let exponent: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("exponent present");
    if (-5..15).contains(&exponent) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn opt_sig9(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

/// Minimal CSV table: a mandatory header and rows of preformatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// Two-column `key,value` table for scalar reports.
pub fn key_value_table(entries: &[(&str, String)]) -> CsvTable {
    let mut t = CsvTable::new(["key", "value"]);
    for (k, v) in entries {
        t.push(vec![(*k).to_string(), v.clone()]);
    }
    t
}

/// Aligned `label  value` lines for terminal output.
pub fn aligned(lines: &[(&str, String)]) -> String {
    let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in lines {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(24.525), "24.525");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(2.0 / 3.0 * 1000.0), "666.666667");
        assert_eq!(sig9(-0.0), "0");
        assert_eq!(sig9(1.23456789e-9), "1.23456789e-9");
        assert_eq!(sig9(123456789012.0), "123456789000");
        assert_eq!(sig9(4.0e20), "4e20");
    }

    #[test]
    fn csv_has_header() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv_string(), "a,b\n1,\"x,y\"\n");
    }
}
