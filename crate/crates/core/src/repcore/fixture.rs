use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::category::EpiCategory;
use super::complex::FunctorComplex;
use super::functor::FunctorRep;
use super::linalg::{Matrix, Q};
use crate::error::{Error, Result};

/// Rows of `[numerator, denominator]` pairs.
pub type RatMatrix = Vec<Vec<[i64; 2]>>;

/// Serializable form of a complex. Epimorphisms are referenced by their
/// position in the category's enumeration of `Epi(source, target)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFixture {
    pub members: Vec<String>,
    pub terms: Vec<TermFixture>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFixture {
    pub degree: i64,
    pub dims: Vec<usize>,
    pub restrictions: Vec<RestrictionFixture>,
    /// `d : C_n → C_{n-1}` per member; omitted when zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential: Option<Vec<RatMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionFixture {
    pub source: String,
    pub target: String,
    pub epi: usize,
    pub matrix: RatMatrix,
}

fn encode(m: &Matrix) -> Result<RatMatrix> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| {
                    let x = &m[(r, c)];
                    match (x.numer().to_i64(), x.denom().to_i64()) {
                        (Some(a), Some(b)) => Ok([a, b]),
                        _ => Err(Error::Unsupported("matrix entry exceeds 64 bits".into())),
                    }
                })
                .collect()
        })
        .collect()
}

fn decode(m: &RatMatrix, rows: usize, cols: usize) -> Result<Matrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidSpec(format!("expected a {rows}x{cols} matrix")));
    }
    if m.iter().flatten().any(|e| e[1] == 0) {
        return Err(Error::InvalidSpec("zero denominator".into()));
    }
    Ok(Matrix::from_fn(rows, cols, |r, c| {
        Q::new(BigInt::from(m[r][c][0]), BigInt::from(m[r][c][1]))
    }))
}

impl ComplexFixture {
    pub fn from_complex(cat: &EpiCategory, x: &FunctorComplex) -> Result<Self> {
        let names = cat.names();
        let mut terms = Vec::new();
        for n in x.degrees() {
            let t = x.term(n).expect("listed degree");
            let mut restrictions = Vec::new();
            for k2 in 0..cat.len() {
                for k1 in 0..cat.len() {
                    for b in 0..cat.epi_count(k2, k1) {
                        let m = t.map(k2, k1, b);
                        if m.rows() > 0 && m.cols() > 0 {
                            restrictions.push(RestrictionFixture {
                                source: names[k2].clone(),
                                target: names[k1].clone(),
                                epi: b,
                                matrix: encode(m)?,
                            });
                        }
                    }
                }
            }
            let diff: Vec<Matrix> = (0..cat.len()).map(|k| x.diff(n, k)).collect();
            let differential = if diff.iter().all(Matrix::is_zero) {
                None
            } else {
                Some(diff.iter().map(encode).collect::<Result<_>>()?)
            };
            terms.push(TermFixture {
                degree: n,
                dims: t.dims().to_vec(),
                restrictions,
                differential,
            });
        }
        Ok(Self {
            members: names.to_vec(),
            terms,
        })
    }

    /// Rebuilds the complex, validating functoriality, `d² = 0` and naturality.
    pub fn to_complex(&self, cat: &EpiCategory) -> Result<FunctorComplex> {
        if self.members != cat.names() {
            return Err(Error::InvalidSpec("fixture members differ from the family".into()));
        }
        let index = |s: &str| {
            cat.names()
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::InvalidSpec(format!("unknown member {s}")))
        };
        let mut terms = BTreeMap::new();
        let mut dims_at = BTreeMap::new();
        for t in &self.terms {
            if t.dims.len() != cat.len() {
                return Err(Error::InvalidSpec("one dimension per member".into()));
            }
            let mut given = BTreeMap::new();
            for r in &t.restrictions {
                let (k2, k1) = (index(&r.source)?, index(&r.target)?);
                if r.epi >= cat.epi_count(k2, k1) {
                    return Err(Error::InvalidSpec(format!("no epimorphism #{} here", r.epi)));
                }
                given.insert((k2, k1, r.epi), decode(&r.matrix, t.dims[k2], t.dims[k1])?);
            }
            let rep = FunctorRep::from_fn(cat, t.dims.clone(), |k2, k1, b| {
                given
                    .get(&(k2, k1, b))
                    .cloned()
                    .unwrap_or_else(|| Matrix::zeros(t.dims[k2], t.dims[k1]))
            })?;
            dims_at.insert(t.degree, t.dims.clone());
            terms.insert(t.degree, rep);
        }
        let mut diffs = BTreeMap::new();
        for t in &self.terms {
            if let Some(d) = &t.differential {
                let below = dims_at.get(&(t.degree - 1)).cloned().unwrap_or(vec![0; cat.len()]);
                let d = d
                    .iter()
                    .enumerate()
                    .map(|(k, m)| decode(m, below[k], t.dims[k]))
                    .collect::<Result<Vec<_>>>()?;
                diffs.insert(t.degree, d);
            }
        }
        FunctorComplex::new(cat, terms, diffs)
    }
}
