//! Parsing of numeric grid arguments: `start:stop:step` (inclusive) or `a,b,c`.

use anyhow::{bail, Context, Result};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("range `{spec}` must look like start:stop:step");
        }
        let nums = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number `{p}` in `{spec}`")))
            .collect::<Result<Vec<f64>>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
            bail!("range `{spec}` needs finite bounds and a positive step");
        }
        if stop < start {
            bail!("range `{spec}` ends before it starts");
        }
        // tolerate rounding in (stop - start) / step
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            bail!("range `{spec}` has too many points");
        }
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    parse_list(spec)
}

pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    let values = spec
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number `{p}`")))
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        bail!("empty list");
    }
    if values.iter().any(|v| !v.is_finite()) {
        bail!("list `{spec}` contains a non-finite value");
    }
    Ok(values)
}
