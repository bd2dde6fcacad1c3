//! Parsers for complex literals and sequence specifications.

use std::path::Path;

use mdl_core::characters::{make_character, BoundedSequence};
use num_complex::Complex64;

/// A malformed command-line field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "--{}: {}", self.field, self.message)
    }
}

/// "a+bi" or "a-bi"; both parts are mandatory.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t = text.trim();
    let body = t
        .strip_suffix('i')
        .ok_or_else(|| format!("'{t}' must have the form a+bi or a-bi"))?;
    // the sign separating the parts: last +/- not at the start and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(|| format!("'{t}' must have the form a+bi or a-bi"))?;
    let (re, im) = body.split_at(split);
    let re: f64 = re.parse().map_err(|_| format!("bad real part '{re}' in '{t}'"))?;
    let im: f64 = im
        .strip_prefix('+')
        .unwrap_or(im)
        .parse()
        .map_err(|_| format!("bad imaginary part '{im}' in '{t}'"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("'{t}' is not finite"));
    }
    Ok(Complex64::new(re, im))
}

/// Comma-separated list of complex literals.
pub fn parse_complex_list(field: &str, text: &str) -> Result<Vec<Complex64>, FieldError> {
    text.split(',')
        .enumerate()
        .map(|(i, part)| parse_complex(part).map_err(|m| FieldError::new(field, format!("entry {}: {m}", i + 1))))
        .collect()
}

pub fn parse_real_list(field: &str, text: &str) -> Result<Vec<f64>, FieldError> {
    text.split(',')
        .enumerate()
        .map(|(i, part)| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| FieldError::new(field, format!("entry {}: '{part}' is not a number", i + 1)))
        })
        .collect()
}

/// "char:q:e1[,e2...]", "alt" or "file:path".
pub fn parse_sequence(text: &str) -> Result<BoundedSequence, FieldError> {
    let err = |m: String| FieldError::new("seq", format!("'{text}': {m}"));
    if text == "alt" {
        return Ok(BoundedSequence::alternating());
    }
    if let Some(path) = text.strip_prefix("file:") {
        return BoundedSequence::from_json_file(Path::new(path)).map_err(|e| err(e.to_string()));
    }
    if let Some(rest) = text.strip_prefix("char:") {
        let (q, exps) = match rest.split_once(':') {
            Some((q, e)) => (q, Some(e)),
            None => (rest, None),
        };
        let q: u64 = q.parse().map_err(|_| err(format!("modulus '{q}' is not a positive integer")))?;
        let exps: Vec<u64> = match exps {
            None | Some("") => Vec::new(),
            Some(e) => e
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| err(format!("exponent '{x}' is not an integer"))))
                .collect::<Result<_, _>>()?,
        };
        let chi = make_character(q, &exps).map_err(|e| err(e.to_string()))?;
        return Ok(BoundedSequence::from_character(&chi));
    }
    Err(err("expected char:q:e1[,e2], alt or file:path".into()))
}
