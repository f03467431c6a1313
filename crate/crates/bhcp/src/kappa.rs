//! Diffusivity selection from the command line: `affine:<slope>,<intercept>`,
//! `rational100exp` or `file:<path>` for a two-column `t,kappa` CSV with a
//! header row.

use std::path::Path;

use bhcp_core::diffusivity::DiffusivityProfile;

use crate::error::{CliError, Result};

pub fn parse_profile(spec: &str, horizon: f64) -> Result<DiffusivityProfile> {
    if spec == "rational100exp" {
        return Ok(DiffusivityProfile::rational_100_exp(horizon)?);
    }
    if let Some(rest) = spec.strip_prefix("affine:") {
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        let [s, i] = parts[..] else {
            return Err(CliError::Usage(format!("`{spec}`: expected affine:<slope>,<intercept>")));
        };
        let num = |v: &str| v.parse::<f64>().map_err(|_| CliError::Usage(format!("`{spec}`: bad number `{v}`")));
        return Ok(DiffusivityProfile::affine(num(s)?, num(i)?, horizon)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return load_csv(Path::new(path), horizon);
    }
    Err(CliError::Usage(format!(
        "unknown diffusivity `{spec}`; use affine:<s>,<i>, rational100exp or file:<path>"
    )))
}

pub fn load_csv(path: &Path, horizon: f64) -> Result<DiffusivityProfile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    let header = reader.headers().map_err(|e| CliError::csv(path, e))?.clone();
    if header.len() != 2 || header.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "expected a header row naming two columns, e.g. `t,kappa`".into(),
        });
    }
    let (mut t, mut k) = (Vec::new(), Vec::new());
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| CliError::csv(path, e))?;
        let field = |j: usize| -> Result<f64> {
            row.get(j).and_then(|v| v.parse().ok()).ok_or_else(|| CliError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("column {} is not a number", j + 1),
            })
        };
        t.push(field(0)?);
        k.push(field(1)?);
    }
    Ok(DiffusivityProfile::tabulated(t, k, horizon)?)
}
