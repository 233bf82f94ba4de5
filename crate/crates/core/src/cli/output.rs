//! Deterministic CSV and JSON writers.

use std::fmt::Write as _;

use serde::Serialize;

use super::CliError;

pub const SPH_HEADER: [&str; 7] = ["t", "r", "T", "R", "F", "G", "excluded"];
pub const AXI_HEADER: [&str; 11] = ["T", "R", "theta", "z", "rho", "A", "B", "C", "J", "sign_case", "degeneracy"];
pub const PROBE_HEADER: [&str; 6] = ["t", "r", "R", "G", "C", "tangent_norm"];

/// Shortest decimal that parses back to the same `f64`, independent of
/// locale. `Debug` switches to exponent form for very large or small
/// magnitudes, which keeps the text short.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Accumulates comma-separated rows terminated by `\n`.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn with_header(cols: &[&str]) -> Csv {
        let mut c = Csv::default();
        c.row(cols.iter().map(|s| s.to_string()));
        c
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            debug_assert!(!cell.contains([',', '\n']), "cell {cell:?}");
            let _ = write!(self.text, "{cell}");
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
