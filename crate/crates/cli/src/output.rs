//! Serialization and atomic file output.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use coherent_shor::experiments::RamseyCurve;
use coherent_shor::format::format_g;
use serde::Serialize;

/// Long-format CSV: `<axis>,value,stderr,series`, one block per curve.
pub fn curves_to_csv(curves: &[&RamseyCurve]) -> Result<Vec<u8>> {
    let axis = curves.first().map_or("x", |c| c.axis.column());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([axis, "value", "stderr", "series"])?;
    for c in curves {
        for i in 0..c.len() {
            w.write_record([format_g(c.x[i]), format_g(c.values[i]), format_g(c.stderr[i]), c.series.clone()])?;
        }
    }
    w.into_inner().context("flushing CSV buffer")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `bytes` to `path` via a temporary file in the same directory, or to
/// stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes)?;
        return stdout.flush().map_err(Into::into);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
