use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use reset_hour_core::calibration::PriceProfile;
use reset_hour_core::ingest::{read_profile, ProfileFile};
use reset_hour_core::WeightProfile;

pub fn require(path: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
    match path {
        Some(p) if p.is_file() => Ok(p.clone()),
        Some(p) => bail!("{key} file not found: {}", p.display()),
        None => bail!("no {key} file given (set `{key}` in the config or pass --{key})"),
    }
}

pub fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

/// Writes a file in one go once the caller has finished computing it.
pub fn write_file(dir: &Path, name: &str, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    let mut out = BufWriter::new(file);
    fill(&mut out)?;
    out.flush()?;
    Ok(path)
}

pub fn load_profile(path: &Path) -> Result<ProfileFile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_profile(file).with_context(|| format!("reading {}", path.display()))
}

pub fn load_prices(path: &Path) -> Result<PriceProfile> {
    let pf = load_profile(path)?;
    let profile = PriceProfile::new(pf.values)?;
    Ok(match pf.coverage {
        Some(c) => profile.with_coverage(c),
        None => profile,
    })
}

/// Weight files may hold any positive scale; they are renormalized.
pub fn load_weights(path: &Path) -> Result<WeightProfile> {
    let pf = load_profile(path)?;
    WeightProfile::from_raw(pf.values).with_context(|| format!("weights in {}", path.display()))
}

pub fn key_values(out: &mut dyn Write, rows: &[(&str, String)]) -> Result<()> {
    for (k, v) in rows {
        writeln!(out, "{k} = {v}")?;
    }
    Ok(())
}
