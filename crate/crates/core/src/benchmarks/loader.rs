//! Plain-text shift and rotation data.
//!
//! ```text
//! # comment
//! dimension 2
//! seed 42              (optional)
//! function 3
//! shift
//! 1.5 -2.0
//! rotation
//! 1 0
//! 0 1
//! inner
//! 0 1
//! 1 0
//! end
//! ```
//!
//! Each `function` block lists its components in order; a component is a
//! `shift` row followed by `rotation` and `inner` matrices of `dimension` rows,
//! written row-major. Numbers are whitespace separated.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{ComponentData, FunctionData, SuiteSpec};
use crate::error::{Error, Result};

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Self {
            last_line: text.lines().count(),
            lines,
            pos: 0,
        }
    }

    fn next(&mut self, block: &str, wanted: &str) -> Result<(usize, &'a str)> {
        let line = self.lines.get(self.pos).copied().ok_or_else(|| Error::Parse {
            block: block.to_string(),
            line: self.last_line,
            message: format!("unexpected end of file, expected {wanted}"),
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }
}

fn parse_error(block: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        block: block.to_string(),
        line,
        message: message.into(),
    }
}

fn keyword_value<T: std::str::FromStr>(lines: &mut Lines, block: &str, keyword: &str) -> Result<T> {
    let (n, text) = lines.next(block, keyword)?;
    let mut parts = text.split_whitespace();
    if parts.next() != Some(keyword) {
        return Err(parse_error(block, n, format!("expected `{keyword} <value>`, found `{text}`")));
    }
    let value = parts.next().ok_or_else(|| parse_error(block, n, format!("missing value after `{keyword}`")))?;
    if parts.next().is_some() {
        return Err(parse_error(block, n, format!("trailing tokens after `{keyword}`")));
    }
    value.parse().map_err(|_| parse_error(block, n, format!("bad value `{value}` for `{keyword}`")))
}

fn expect(lines: &mut Lines, block: &str, keyword: &str) -> Result<()> {
    let (n, text) = lines.next(block, keyword)?;
    if text != keyword {
        return Err(parse_error(block, n, format!("expected `{keyword}`, found `{text}`")));
    }
    Ok(())
}

fn row(lines: &mut Lines, block: &str, d: usize) -> Result<Vec<f64>> {
    let (n, text) = lines.next(block, "a row of numbers")?;
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_error(block, n, format!("bad number `{t}`"))))
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != d {
        return Err(parse_error(block, n, format!("expected {d} numbers, found {}", values.len())));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(parse_error(block, n, format!("non-finite number {v}")));
    }
    Ok(values)
}

fn matrix(lines: &mut Lines, block: &str, keyword: &str, d: usize) -> Result<DMatrix<f64>> {
    expect(lines, block, keyword)?;
    let mut rows = Vec::with_capacity(d * d);
    for _ in 0..d {
        rows.extend(row(lines, block, d)?);
    }
    Ok(DMatrix::from_row_slice(d, d, &rows))
}

/// Parses suite data and validates it.
pub fn parse_suite(text: &str) -> Result<SuiteSpec> {
    let mut lines = Lines::new(text);
    let dimension: usize = keyword_value(&mut lines, "header", "dimension")?;
    let seed = match lines.peek() {
        Some((_, l)) if l.starts_with("seed") => Some(keyword_value::<u64>(&mut lines, "header", "seed")?),
        _ => None,
    };
    let mut functions: Vec<Arc<FunctionData>> = Vec::new();
    while lines.peek().is_some() {
        let id: usize = keyword_value(&mut lines, "header", "function")?;
        let block = format!("f{id}");
        if functions.iter().any(|f| f.id == id) {
            let (n, _) = lines.lines[lines.pos - 1];
            return Err(parse_error(&block, n, "duplicate function block"));
        }
        let mut components = Vec::new();
        loop {
            let (n, text) = lines.next(&block, "`shift` or `end`")?;
            match text {
                "end" => break,
                "shift" => {
                    let shift = row(&mut lines, &block, dimension)?;
                    let rotation = matrix(&mut lines, &block, "rotation", dimension)?;
                    let inner = matrix(&mut lines, &block, "inner", dimension)?;
                    components.push(ComponentData { shift, rotation, inner });
                }
                other => return Err(parse_error(&block, n, format!("expected `shift` or `end`, found `{other}`"))),
            }
        }
        functions.push(Arc::new(FunctionData { id, components }));
    }
    let spec = SuiteSpec {
        dimension,
        seed,
        functions,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_external_data(path: impl AsRef<Path>) -> Result<SuiteSpec> {
    parse_suite(&std::fs::read_to_string(path)?)
}

/// Text form readable by [`parse_suite`]; numbers use shortest round-trip formatting.
pub fn export_suite(spec: &SuiteSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dimension {}", spec.dimension);
    if let Some(seed) = spec.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    let join = |values: &mut dyn Iterator<Item = f64>| values.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    for f in &spec.functions {
        let _ = writeln!(out, "function {}", f.id);
        for c in &f.components {
            let _ = writeln!(out, "shift\n{}", join(&mut c.shift.iter().copied()));
            for (label, m) in [("rotation", &c.rotation), ("inner", &c.inner)] {
                let _ = writeln!(out, "{label}");
                for r in m.row_iter() {
                    let _ = writeln!(out, "{}", join(&mut r.iter().copied()));
                }
            }
        }
        out.push_str("end\n");
    }
    out
}

pub fn write_suite(spec: &SuiteSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, export_suite(spec))?;
    Ok(())
}
