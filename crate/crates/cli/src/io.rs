//! Context file formats.
//!
//! Plain format: optional `#` comment lines, a header line `m n`, then `m`
//! lines of exactly `n` characters from `{0,1}`. Burmeister format: the
//! line `B`, a blank line, `m` and `n` on their own lines, a blank line,
//! `m` object names, `n` attribute names, then `m` rows of `X`/`.`
//! characters. Both are newline-terminated ASCII; writers are bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use pfca_core::FormalContext;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextFormat {
    Plain,
    Cxt,
}

impl ContextFormat {
    /// `.cxt` files are Burmeister; everything else is plain.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("cxt") => ContextFormat::Cxt,
            _ => ContextFormat::Plain,
        }
    }
}

pub fn read_context(path: &Path) -> Result<FormalContext, CliError> {
    read_context_format(path, ContextFormat::from_path(path))
}

pub fn read_context_format(
    path: &Path,
    format: ContextFormat,
) -> Result<FormalContext, CliError> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    match format {
        ContextFormat::Plain => parse_plain(&text, &name),
        ContextFormat::Cxt => parse_cxt(&text, &name),
    }
}

pub fn write_context(
    ctx: &FormalContext,
    path: &Path,
    format: ContextFormat,
) -> Result<(), CliError> {
    let text = match format {
        ContextFormat::Plain => render_plain(ctx),
        ContextFormat::Cxt => render_cxt(ctx),
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_error(path: &str, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

pub fn parse_plain(text: &str, path: &str) -> Result<FormalContext, CliError> {
    // (1-based line number, content), comments skipped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "missing header line"))?;
    let mut parts = header.split_whitespace();
    let m: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_error(path, header_no, "header must be `m n`"))?;
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_error(path, header_no, "header must be `m n`"))?;
    if parts.next().is_some() {
        return Err(parse_error(path, header_no, "header must be `m n`"));
    }

    let mut rows = Vec::with_capacity(m);
    let mut last_line = header_no;
    for _ in 0..m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_error(path, last_line + 1, format!("expected {m} rows")))?;
        last_line = line_no;
        if line.len() != n {
            return Err(parse_error(
                path,
                line_no,
                format!("row has {} characters, expected {n}", line.len()),
            ));
        }
        let mut row = Vec::with_capacity(n);
        for ch in line.chars() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                other => {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("invalid character {other:?}, expected 0 or 1"),
                    ))
                }
            }
        }
        rows.push(row);
    }
    if let Some((line_no, line)) = lines.next() {
        if !line.trim().is_empty() {
            return Err(parse_error(path, line_no, "trailing content after rows"));
        }
    }
    Ok(FormalContext::from_rows(&rows)?)
}

pub fn render_plain(ctx: &FormalContext) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", ctx.object_count(), ctx.attribute_count()).unwrap();
    for i in 0..ctx.object_count() {
        for j in 0..ctx.attribute_count() {
            out.push(if ctx.bit(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_cxt(text: &str, path: &str) -> Result<FormalContext, CliError> {
    let lines: Vec<&str> = text.lines().collect();
    let at = |idx: usize| -> Result<&str, CliError> {
        lines
            .get(idx)
            .copied()
            .ok_or_else(|| parse_error(path, idx + 1, "unexpected end of file"))
    };

    if at(0)? != "B" {
        return Err(parse_error(path, 1, "expected `B` magic line"));
    }
    if !at(1)?.trim().is_empty() {
        return Err(parse_error(path, 2, "expected blank line after `B`"));
    }
    let m: usize = at(2)?
        .trim()
        .parse()
        .map_err(|_| parse_error(path, 3, "expected object count"))?;
    let n: usize = at(3)?
        .trim()
        .parse()
        .map_err(|_| parse_error(path, 4, "expected attribute count"))?;
    if !at(4)?.trim().is_empty() {
        return Err(parse_error(path, 5, "expected blank line after dimensions"));
    }

    let objects: Vec<String> = (0..m).map(|i| at(5 + i).map(str::to_string)).collect::<Result<_, _>>()?;
    let attributes: Vec<String> =
        (0..n).map(|j| at(5 + m + j).map(str::to_string)).collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let idx = 5 + m + n + i;
        let line = at(idx)?;
        if line.len() != n {
            return Err(parse_error(
                path,
                idx + 1,
                format!("row has {} characters, expected {n}", line.len()),
            ));
        }
        let mut row = Vec::with_capacity(n);
        for ch in line.chars() {
            match ch {
                'X' => row.push(1),
                '.' => row.push(0),
                other => {
                    return Err(parse_error(
                        path,
                        idx + 1,
                        format!("invalid character {other:?}, expected X or ."),
                    ))
                }
            }
        }
        rows.push(row);
    }
    Ok(FormalContext::from_rows(&rows)?.with_labels(objects, attributes)?)
}

pub fn render_cxt(ctx: &FormalContext) -> String {
    let mut out = String::from("B\n\n");
    writeln!(out, "{}", ctx.object_count()).unwrap();
    writeln!(out, "{}", ctx.attribute_count()).unwrap();
    out.push('\n');
    for label in ctx.object_labels() {
        writeln!(out, "{label}").unwrap();
    }
    for label in ctx.attribute_labels() {
        writeln!(out, "{label}").unwrap();
    }
    for i in 0..ctx.object_count() {
        for j in 0..ctx.attribute_count() {
            out.push(if ctx.bit(i, j) { 'X' } else { '.' });
        }
        out.push('\n');
    }
    out
}
