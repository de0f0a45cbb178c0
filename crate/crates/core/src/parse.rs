//! Comma-separated number lists, as accepted by the command line.

use std::str::FromStr;

use crate::error::{Error, Result};

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected a comma-separated list of {what}"),
        });
    }
    let mut out = Vec::new();
    let mut column = 1;
    for item in text.split(',') {
        let trimmed = item.trim();
        let lead = item.len() - item.trim_start().len();
        match trimmed.parse::<T>() {
            Ok(v) => out.push(v),
            Err(_) => {
                return Err(Error::Parse {
                    line: 1,
                    column: column + lead,
                    message: format!("invalid {what} entry {trimmed:?}"),
                })
            }
        }
        column += item.len() + 1;
    }
    Ok(out)
}

/// Parses `"1.0, 2.5,3"`; every entry must be finite.
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = parse_list(text, "numbers")?;
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("entry {i} is not finite"),
        });
    }
    Ok(v)
}

/// Parses `"50,100,200"`.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    parse_list(text, "non-negative integers")
}
