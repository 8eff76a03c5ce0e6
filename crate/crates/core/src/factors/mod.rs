//! Concrete finite-rank JB*-triples.
//!
//! Three families are supported: the rectangular matrix factor `L(C^q, C^p)`
//! with `{x,y,z} = ½(xy*z + zy*x)`, the commutative algebra `C^n` with
//! `{f,g,h} = f·conj(g)·h`, and finite ℓ∞-direct sums of those. Every factor
//! has a fixed canonical basis: row-major matrix units, the standard basis of
//! `C^n`, and concatenation of the parts' bases for sums.

mod element;
mod maps;
mod parse;
mod triple;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use element::Element;
pub use maps::{ConjugateLinearMap, LinearMap};

/// Largest complex dimension accepted for a factor. Operators are stored as
/// dense `dim × dim` matrices.
pub const MAX_DIM: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// `p × q` complex matrices with the operator norm.
    Matrix { p: usize, q: usize },
    /// `C^n` with the max norm.
    Commutative { n: usize },
    /// ℓ∞-sum of simple factors (never nested).
    DirectSum(Vec<Factor>),
}

/// Descriptor of a concrete JB*-triple together with its dimension and rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FactorRepr", into = "FactorRepr")]
pub struct Factor {
    kind: FactorKind,
    dim: usize,
    rank: usize,
}

impl Factor {
    /// Builds a descriptor, computing `dim` and `rank` and flattening nested
    /// sums.
    pub fn new(kind: FactorKind) -> Result<Self> {
        match kind {
            FactorKind::Matrix { p, q } => {
                if p == 0 || q == 0 {
                    return Err(Error::InvalidFactor(format!(
                        "matrix factor needs positive dimensions, got {p}x{q}"
                    )));
                }
                let dim = p.checked_mul(q).filter(|&d| d <= MAX_DIM).ok_or_else(|| {
                    Error::InvalidFactor(format!("matrix:{p}x{q} exceeds {MAX_DIM} dimensions"))
                })?;
                Ok(Self {
                    kind,
                    dim,
                    rank: p.min(q),
                })
            }
            FactorKind::Commutative { n } => {
                if n == 0 {
                    return Err(Error::InvalidFactor(
                        "commutative factor needs a positive dimension".into(),
                    ));
                }
                if n > MAX_DIM {
                    return Err(Error::InvalidFactor(format!(
                        "commutative:{n} exceeds {MAX_DIM} dimensions"
                    )));
                }
                Ok(Self {
                    kind,
                    dim: n,
                    rank: n,
                })
            }
            FactorKind::DirectSum(parts) => {
                let mut flat = Vec::with_capacity(parts.len());
                for part in parts {
                    match part.kind {
                        FactorKind::DirectSum(inner) => flat.extend(inner),
                        _ => flat.push(part),
                    }
                }
                if flat.is_empty() {
                    return Err(Error::InvalidFactor("empty direct sum".into()));
                }
                let dim: usize = flat.iter().map(|f| f.dim).sum();
                if dim > MAX_DIM {
                    return Err(Error::InvalidFactor(format!(
                        "direct sum exceeds {MAX_DIM} dimensions"
                    )));
                }
                let rank = flat.iter().map(|f| f.rank).sum();
                Ok(Self {
                    kind: FactorKind::DirectSum(flat),
                    dim,
                    rank,
                })
            }
        }
    }

    pub fn matrix(p: usize, q: usize) -> Result<Self> {
        Self::new(FactorKind::Matrix { p, q })
    }

    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(FactorKind::Commutative { n })
    }

    pub fn direct_sum(parts: Vec<Factor>) -> Result<Self> {
        Self::new(FactorKind::DirectSum(parts))
    }

    pub fn kind(&self) -> &FactorKind {
        &self.kind
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Simple summands with their coordinate offsets. A simple factor yields
    /// itself at offset 0.
    pub fn blocks(&self) -> Vec<(usize, &Factor)> {
        match &self.kind {
            FactorKind::DirectSum(parts) => {
                let mut offset = 0;
                parts
                    .iter()
                    .map(|part| {
                        let entry = (offset, part);
                        offset += part.dim;
                        entry
                    })
                    .collect()
            }
            _ => vec![(0, self)],
        }
    }

    /// Whether the factor has unitary tripotents (square matrix blocks and
    /// commutative blocks only).
    pub fn has_unitaries(&self) -> bool {
        self.blocks().iter().all(|(_, b)| match b.kind {
            FactorKind::Matrix { p, q } => p == q,
            _ => true,
        })
    }

    pub(crate) fn ensure(&self, x: &Element) -> Result<()> {
        if x.factor() != self {
            return Err(Error::FactorMismatch {
                expected: self.to_string(),
                found: x.factor().to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FactorKind::Matrix { p, q } => write!(f, "matrix:{p}x{q}"),
            FactorKind::Commutative { n } => write!(f, "commutative:{n}"),
            FactorKind::DirectSum(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
        }
    }
}

/// JSON form of a factor: `{"kind":"matrix","p":2,"q":3}`,
/// `{"kind":"commutative","n":2}` or `{"kind":"direct_sum","parts":[...]}`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FactorRepr {
    Matrix { p: usize, q: usize },
    Commutative { n: usize },
    DirectSum { parts: Vec<FactorRepr> },
}

impl TryFrom<FactorRepr> for Factor {
    type Error = Error;

    fn try_from(repr: FactorRepr) -> Result<Self> {
        match repr {
            FactorRepr::Matrix { p, q } => Factor::matrix(p, q),
            FactorRepr::Commutative { n } => Factor::commutative(n),
            FactorRepr::DirectSum { parts } => {
                let parts = parts
                    .into_iter()
                    .map(Factor::try_from)
                    .collect::<Result<Vec<_>>>()?;
                Factor::direct_sum(parts)
            }
        }
    }
}

impl From<Factor> for FactorRepr {
    fn from(f: Factor) -> Self {
        match f.kind {
            FactorKind::Matrix { p, q } => FactorRepr::Matrix { p, q },
            FactorKind::Commutative { n } => FactorRepr::Commutative { n },
            FactorKind::DirectSum(parts) => FactorRepr::DirectSum {
                parts: parts.into_iter().map(FactorRepr::from).collect(),
            },
        }
    }
}

/// Constructs a factor from its kind; alias of [`Factor::new`].
pub fn make_factor(kind: FactorKind) -> Result<Factor> {
    Factor::new(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_ranks() {
        let m = Factor::matrix(2, 3).unwrap();
        assert_eq!((m.dim(), m.rank()), (6, 2));
        let c = Factor::commutative(2).unwrap();
        assert_eq!((c.dim(), c.rank()), (2, 2));
        let s = Factor::direct_sum(vec![
            Factor::matrix(2, 2).unwrap(),
            Factor::commutative(1).unwrap(),
        ])
        .unwrap();
        assert_eq!((s.dim(), s.rank()), (5, 3));
    }

    #[test]
    fn nested_sums_flatten() {
        let inner = Factor::direct_sum(vec![
            Factor::commutative(1).unwrap(),
            Factor::matrix(1, 2).unwrap(),
        ])
        .unwrap();
        let outer = Factor::direct_sum(vec![inner, Factor::matrix(2, 2).unwrap()]).unwrap();
        match outer.kind() {
            FactorKind::DirectSum(parts) => {
                assert_eq!(parts.len(), 3);
                assert!(parts
                    .iter()
                    .all(|p| !matches!(p.kind(), FactorKind::DirectSum(_))));
            }
            _ => panic!("expected a sum"),
        }
        assert_eq!(outer.dim(), 1 + 2 + 4);
        assert_eq!(outer.rank(), 1 + 1 + 2);
        let offsets: Vec<usize> = outer.blocks().iter().map(|(o, _)| *o).collect();
        assert_eq!(offsets, vec![0, 1, 3]);
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(matches!(Factor::matrix(0, 3), Err(Error::InvalidFactor(_))));
        assert!(matches!(
            Factor::commutative(0),
            Err(Error::InvalidFactor(_))
        ));
        assert!(matches!(
            Factor::direct_sum(vec![]),
            Err(Error::InvalidFactor(_))
        ));
        assert!(Factor::matrix(usize::MAX, 2).is_err());
    }

    #[test]
    fn unitaries_exist_only_for_square_blocks() {
        assert!(Factor::matrix(3, 3).unwrap().has_unitaries());
        assert!(!Factor::matrix(2, 3).unwrap().has_unitaries());
        assert!(Factor::commutative(4).unwrap().has_unitaries());
    }
}
