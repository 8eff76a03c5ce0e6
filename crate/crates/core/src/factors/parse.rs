//! Textual factor specs: `matrix:2x3`, `commutative:4`, and sums of these
//! joined with `+` (`matrix:2x2+commutative:1`).

use std::str::FromStr;

use super::{Factor, FactorKind};
use crate::error::{Error, Result};

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('+').map(str::trim).collect();
        if parts.len() == 1 {
            return parse_simple(parts[0]);
        }
        let simple = parts
            .into_iter()
            .map(parse_simple)
            .collect::<Result<Vec<_>>>()?;
        Factor::new(FactorKind::DirectSum(simple))
    }
}

fn parse_simple(s: &str) -> Result<Factor> {
    let bad = || Error::InvalidFactor(format!("cannot parse factor spec `{s}`"));
    let (name, dims) = s.split_once(':').ok_or_else(bad)?;
    match name.trim().to_ascii_lowercase().as_str() {
        "matrix" | "mat" => {
            let (p, q) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
            Factor::matrix(parse_dim(p).ok_or_else(bad)?, parse_dim(q).ok_or_else(bad)?)
        }
        "commutative" | "comm" => Factor::commutative(parse_dim(dims).ok_or_else(bad)?),
        _ => Err(bad()),
    }
}

fn parse_dim(s: &str) -> Option<usize> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}
