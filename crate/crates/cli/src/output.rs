//! CSV output: comma separated, header row, 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

/// Lossless float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Default)]
pub struct CsvTable {
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut t = Self::default();
        t.text.push_str(&header.join(","));
        t.text.push('\n');
        t
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> anyhow::Result<()> {
        match path {
            Some(p) => {
                std::fs::write(p, &self.text).with_context(|| format!("writing {}", p.display()))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, -2.5e-17, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s
                .split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn table_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.row(&["1".into(), String::new()]);
        assert_eq!(t.as_str(), "a,b\n1,\n");
    }
}
