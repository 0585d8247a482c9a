//! `hour,value,coverage` profile files: a header and exactly 24 rows.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::HOURS;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFile {
    pub values: [f64; HOURS],
    pub coverage: Option<[f64; HOURS]>,
}

/// Writes values at full precision; coverage cells stay empty when absent.
pub fn write_profile<W: Write>(out: W, values: &[f64; HOURS], coverage: Option<&[f64; HOURS]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["hour", "value", "coverage"])?;
    for h in 0..HOURS {
        let cov = coverage.map(|c| c[h].to_string()).unwrap_or_default();
        w.write_record([h.to_string(), values[h].to_string(), cov])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile<R: Read>(input: R) -> Result<ProfileFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut values = [f64::NAN; HOURS];
    let mut coverage = [f64::NAN; HOURS];
    let mut seen = [false; HOURS];
    let mut any_coverage = false;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec?;
        rows += 1;
        let hour: usize = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .filter(|h| *h < HOURS)
            .ok_or_else(|| Error::Input(format!("profile row {rows}: bad hour")))?;
        if seen[hour] {
            return Err(Error::Input(format!("profile lists hour {hour} twice")));
        }
        seen[hour] = true;
        values[hour] = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::Input(format!("profile hour {hour}: bad value")))?;
        if let Some(c) = rec.get(2).filter(|s| !s.is_empty()) {
            coverage[hour] = c
                .parse()
                .map_err(|_| Error::Input(format!("profile hour {hour}: bad coverage '{c}'")))?;
            any_coverage = true;
        }
    }
    if rows != HOURS {
        return Err(Error::Input(format!("profile must have {HOURS} rows, found {rows}")));
    }
    Ok(ProfileFile {
        values,
        coverage: (any_coverage && coverage.iter().all(|c| c.is_finite())).then_some(coverage),
    })
}
