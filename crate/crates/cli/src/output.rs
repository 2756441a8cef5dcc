//! Deterministic CSV emission: 15 significant digits, `.` decimal separator,
//! no locale or timestamp dependence, so identical configs reproduce files
//! byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::AppError;

pub const TOOL: &str = "spinchain-multient";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Format one value with 15 significant digits; NaN rows print as `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.14e}")
    }
}

/// A CSV document under construction.
pub struct Csv {
    buf: String,
}

impl Csv {
    /// Start a document: tool banner, config echo, extra context lines, and
    /// the column schema.
    pub fn new(config_echo: &str, extra: &[String], columns: &[&str]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# {TOOL} v{VERSION}");
        buf.push_str(config_echo);
        for line in extra {
            let _ = writeln!(buf, "# {line}");
        }
        let _ = writeln!(buf, "# columns: {}", columns.join(","));
        let _ = writeln!(buf, "{}", columns.join(","));
        Self { buf }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Write to the path, or stdout when none is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), AppError> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| AppError::Config(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| AppError::Config(format!("cannot write stdout: {e}"))),
    }
}

/// Resolve the per-N output file for multi-chain commands: a trailing `.csv`
/// path is used directly for a single N, otherwise the path is a directory.
pub fn per_chain_path(
    out: Option<&Path>,
    stem: &str,
    sites: usize,
    single: bool,
) -> Result<Option<std::path::PathBuf>, AppError> {
    match out {
        None => Ok(None),
        Some(p) => {
            if single && p.extension().is_some_and(|e| e == "csv") {
                if let Some(parent) = p.parent() {
                    if !parent.as_os_str().is_empty() {
                        fs::create_dir_all(parent).map_err(|e| {
                            AppError::Config(format!("cannot create {}: {e}", parent.display()))
                        })?;
                    }
                }
                Ok(Some(p.to_path_buf()))
            } else {
                fs::create_dir_all(p)
                    .map_err(|e| AppError::Config(format!("cannot create {}: {e}", p.display())))?;
                Ok(Some(p.join(format!("{stem}-N{sites}.csv"))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_fixed_width_significand() {
        assert_eq!(num(0.5), "5.00000000000000e-1");
        assert_eq!(num(-1.0 / core::f64::consts::PI), "-3.18309886183791e-1");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.0), "0.00000000000000e0");
    }

    #[test]
    fn document_layout() {
        let mut csv = Csv::new("# command = x\n", &["note".to_string()], &["a", "b"]);
        csv.row(&[num(1.0), num(2.0)]);
        let text = csv.finish();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# spinchain-multient v"));
        assert_eq!(lines.next().unwrap(), "# command = x");
        assert_eq!(lines.next().unwrap(), "# note");
        assert_eq!(lines.next().unwrap(), "# columns: a,b");
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(
            lines.next().unwrap(),
            "1.00000000000000e0,2.00000000000000e0"
        );
    }
}
