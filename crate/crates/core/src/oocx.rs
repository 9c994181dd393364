//! OOCX v1, a line-oriented text format for codes.
//!
//! ```text
//! OOCX 1
//! dims 5 3
//! weight 3
//! lambda_a 0
//! lambda_c 1
//! count 10
//! word: (0,0) (1,1) (3,0)
//! ...
//! ```
//!
//! Tuples and words appear in lexicographic order, so writing a code is
//! deterministic.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::ooc::{Code, CodeShape, Codeword, OocError};

pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum OocxError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn perr(line: usize, msg: impl Into<String>) -> OocxError {
    OocxError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn to_string(code: &Code) -> String {
    let mut out = String::new();
    let dims: Vec<String> = code.shape().dims().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "OOCX {VERSION}");
    let _ = writeln!(out, "dims {}", dims.join(" "));
    let _ = writeln!(out, "weight {}", code.weight());
    let _ = writeln!(out, "lambda_a {}", code.lambda_a());
    let _ = writeln!(out, "lambda_c {}", code.lambda_c());
    let _ = writeln!(out, "count {}", code.len());
    for w in code.words() {
        let tuples: Vec<String> = w
            .coords()
            .iter()
            .map(|c| {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let _ = writeln!(out, "word: {}", tuples.join(" "));
    }
    out
}

fn header_value<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
    last: usize,
) -> Result<(usize, &'a str), OocxError> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| perr(last + 1, format!("missing `{key}` line")))?;
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| perr(no, format!("expected `{key} ...`")))?;
    Ok((no, rest))
}

fn number(no: usize, s: &str, what: &str) -> Result<u32, OocxError> {
    s.trim()
        .parse()
        .map_err(|_| perr(no, format!("invalid {what} `{s}`")))
}

fn parse_tuple(no: usize, tok: &str) -> Result<Vec<u32>, OocxError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| perr(no, format!("malformed tuple `{tok}`")))?;
    inner
        .split(',')
        .map(|x| number(no, x, "coordinate"))
        .collect()
}

pub fn from_str(text: &str) -> Result<Code, OocxError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (no, magic) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let version = magic
        .strip_prefix("OOCX ")
        .ok_or_else(|| perr(no, "expected `OOCX 1` header"))?;
    if number(no, version, "version")? != VERSION {
        return Err(perr(no, format!("unsupported version {version}")));
    }
    let (no, dims) = header_value(&mut lines, "dims", 1)?;
    let dims: Vec<u32> = dims
        .split_whitespace()
        .map(|d| number(no, d, "dimension"))
        .collect::<Result<_, _>>()?;
    let shape = CodeShape::new(dims).map_err(|e| perr(no, e.to_string()))?;
    let (no, w) = header_value(&mut lines, "weight", no)?;
    let weight = number(no, w, "weight")?;
    let (no, la) = header_value(&mut lines, "lambda_a", no)?;
    let lambda_a = number(no, la, "lambda_a")?;
    let (no, lc) = header_value(&mut lines, "lambda_c", no)?;
    let lambda_c = number(no, lc, "lambda_c")?;
    let (mut last, count) = header_value(&mut lines, "count", no)?;
    let count = number(last, count, "count")? as usize;

    let mut words = Vec::with_capacity(count);
    for (no, line) in lines {
        last = no;
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_prefix("word:")
            .ok_or_else(|| perr(no, "expected `word: ...`"))?;
        let coords: Vec<Vec<u32>> = body
            .split_whitespace()
            .map(|t| parse_tuple(no, t))
            .collect::<Result<_, _>>()?;
        if coords.len() != weight as usize {
            return Err(perr(
                no,
                format!("word has {} pulses, weight is {weight}", coords.len()),
            ));
        }
        let word = Codeword::from_coords(shape.clone(), coords).map_err(|e| match e {
            OocError::OutOfRange { coord, .. } => {
                perr(no, format!("coordinate {coord:?} out of range for {shape}"))
            }
            other => perr(no, other.to_string()),
        })?;
        words.push(word);
    }
    if words.len() != count {
        return Err(perr(
            last,
            format!("count says {count} words, found {}", words.len()),
        ));
    }
    Ok(Code::new(shape, weight, lambda_a, lambda_c, words))
}

pub fn write_oocx(code: &Code, path: &Path) -> Result<(), OocxError> {
    std::fs::write(path, to_string(code))?;
    Ok(())
}

pub fn read_oocx(path: &Path) -> Result<Code, OocxError> {
    from_str(&std::fs::read_to_string(path)?)
}
