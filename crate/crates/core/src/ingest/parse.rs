use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Malformed {
    /// 1-based line number in the input, header included.
    pub line: u64,
    pub reason: String,
}

/// Parsed records plus a trace of every rejected row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseOutcome<T> {
    pub records: Vec<T>,
    pub rows: usize,
    pub malformed: Vec<Malformed>,
}

impl<T> ParseOutcome<T> {
    pub fn malformed_pct(&self) -> f64 {
        if self.rows == 0 {
            0.0
        } else {
            100.0 * self.malformed.len() as f64 / self.rows as f64
        }
    }

    /// Fails when the malformed share exceeds `limit_pct` percent of rows.
    pub fn enforce_limit(self, limit_pct: f64) -> Result<Self> {
        if self.malformed_pct() > limit_pct {
            return Err(Error::TooManyMalformed {
                malformed: self.malformed.len(),
                total: self.rows,
                limit_pct,
                first_line: self.malformed[0].line,
            });
        }
        Ok(self)
    }
}

/// Position of `name` in the header, case-insensitive.
pub(crate) fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Input(format!("missing column '{name}'")))
}

pub(crate) fn reader<R: std::io::Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}
