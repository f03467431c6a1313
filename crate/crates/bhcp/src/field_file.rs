//! Plain-text field files.
//!
//! ```text
//! # bhcp-field v1
//! dim 2
//! axis -10 10 256
//! axis -10 10 256
//! 0.125
//! ...
//! ```
//!
//! Samples follow in row-major order, one per line. Values are written with
//! the shortest representation that parses back to the same `f64`, so a
//! write/read cycle is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bhcp_core::grid::{Axis, UniformGrid};
use bhcp_core::RealField;

use crate::error::{CliError, Result};

pub const MAGIC: &str = "# bhcp-field v1";

pub fn to_string(field: &RealField) -> String {
    let grid = field.grid();
    let mut out = String::with_capacity(24 * field.len() + 64);
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "dim {}", grid.dim());
    for axis in grid.axes() {
        let _ = writeln!(out, "axis {} {} {}", axis.lower, axis.upper, axis.count);
    }
    for v in field.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write(path: &Path, field: &RealField) -> Result<()> {
    fs::write(path, to_string(field)).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> Result<RealField> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<RealField> {
    let err = |line: usize, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, MAGIC)) => {}
        Some((n, other)) => return Err(err(n, format!("expected `{MAGIC}`, found `{other}`"))),
        None => return Err(err(1, "empty file".into())),
    }
    let (n, line) = lines.next().ok_or_else(|| err(2, "missing `dim` line".into()))?;
    let dim: usize = match line.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", d] => d.parse().map_err(|_| err(n, format!("bad dimension `{d}`")))?,
        _ => return Err(err(n, format!("expected `dim <n>`, found `{line}`"))),
    };
    if dim == 0 {
        return Err(err(n, "dimension must be at least 1".into()));
    }
    let mut axes = Vec::with_capacity(dim);
    let mut last = n;
    for _ in 0..dim {
        let (n, line) = lines.next().ok_or_else(|| err(last + 1, "missing `axis` line".into()))?;
        last = n;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let axis = match parts[..] {
            ["axis", a, b, c] => {
                let lower: f64 = a.parse().map_err(|_| err(n, format!("bad lower bound `{a}`")))?;
                let upper: f64 = b.parse().map_err(|_| err(n, format!("bad upper bound `{b}`")))?;
                let count: usize = c.parse().map_err(|_| err(n, format!("bad sample count `{c}`")))?;
                Axis::new(lower, upper, count)
            }
            _ => return Err(err(n, format!("expected `axis <a> <b> <N>`, found `{line}`"))),
        };
        axes.push(axis);
    }
    let grid = UniformGrid::new(axes).map_err(|e| err(last, e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    for (n, line) in lines {
        let v: f64 = line.parse().map_err(|_| err(n, format!("bad sample `{line}`")))?;
        if !v.is_finite() {
            return Err(err(n, format!("non-finite sample `{line}`")));
        }
        if values.len() == grid.len() {
            return Err(err(n, format!("more than the declared {} samples", grid.len())));
        }
        values.push(v);
        last = n;
    }
    if values.len() != grid.len() {
        return Err(err(last, format!("expected {} samples, found {}", grid.len(), values.len())));
    }
    Ok(RealField::new(grid, values)?)
}
