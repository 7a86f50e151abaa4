use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::abgroup::primes_up_to;
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec};

/// Structural description of a spectrum up to homeomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case")]
pub enum SpaceDesc {
    FiniteDiscrete { k: u64 },
    /// `(⊔_ℕ X)⁺`.
    OnePointCompactification { of: Box<SpaceDesc> },
    /// `Ŝ_{≤r}`.
    MonotoneVectors { r: usize },
    FiniteProduct { factors: Vec<SpaceDesc> },
    PrimeIndexedProduct { of: Box<SpaceDesc> },
    /// Discrete `ℕ` with one extra closed point whose neighbourhoods are cofinite.
    NaturalsWithClosedPoint,
    /// A space containing a copy of `Ŝ_{≤r}` for every `r`.
    ContainsAllMonotone,
}

impl SpaceDesc {
    pub fn point() -> Self {
        SpaceDesc::FiniteDiscrete { k: 1 }
    }

    pub fn nat_plus() -> Self {
        SpaceDesc::OnePointCompactification {
            of: Box::new(Self::point()),
        }
    }

    fn is_point(&self) -> bool {
        matches!(
            self,
            SpaceDesc::FiniteDiscrete { k: 1 } | SpaceDesc::MonotoneVectors { r: 0 }
        )
    }

    pub fn render(&self, ascii: bool) -> String {
        let pick = |u: &str, a: &str| if ascii { a.to_string() } else { u.to_string() };
        match self {
            s if s.is_point() => pick("pt", "pt"),
            SpaceDesc::FiniteDiscrete { k } => format!("D{k}"),
            SpaceDesc::OnePointCompactification { of } if of.is_point() => pick("ℕ⁺", "N+"),
            SpaceDesc::OnePointCompactification { of } => {
                let inner = of.render(ascii);
                pick(&format!("(⊔_ℕ {inner})⁺"), &format!("(disjoint_N {inner})+"))
            }
            SpaceDesc::MonotoneVectors { r: 1 } => pick("ℕ⁺", "N+"),
            SpaceDesc::MonotoneVectors { r } => pick(
                &format!("(⊔_ℕ Ŝ_{{≤{}}})⁺", r - 1),
                &format!("(disjoint_N S_{{<={}}})+", r - 1),
            ),
            SpaceDesc::FiniteProduct { factors } => {
                let parts: Vec<String> = factors.iter().map(|d| d.render(ascii)).collect();
                parts.join(if ascii { " x " } else { " × " })
            }
            SpaceDesc::PrimeIndexedProduct { of } => {
                let inner = of.render(ascii);
                pick(&format!("∏_p {inner}"), &format!("prod_p {inner}"))
            }
            SpaceDesc::NaturalsWithClosedPoint => pick("ℕ ∪ {𝔭₀}", "N u {p0}"),
            SpaceDesc::ContainsAllMonotone => pick("⊇ Ŝ_{≤r} for all r", ">= S_{<=r} for all r"),
        }
    }
}

impl fmt::Display for SpaceDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.alternate()))
    }
}

/// A Cantor–Bendixson rank: finite, or certified to be at least `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CbRank {
    Finite(u64),
    AtLeastOmega,
}

impl CbRank {
    pub fn render(self, ascii: bool) -> String {
        match self {
            CbRank::Finite(n) => n.to_string(),
            CbRank::AtLeastOmega if ascii => "omega".into(),
            CbRank::AtLeastOmega => "ω".into(),
        }
    }

    fn plus(self, other: CbRank) -> CbRank {
        match (self, other) {
            (CbRank::Finite(a), CbRank::Finite(b)) => CbRank::Finite(a + b),
            _ => CbRank::AtLeastOmega,
        }
    }
}

impl fmt::Display for CbRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.alternate()))
    }
}

impl Serialize for CbRank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CbRank::Finite(n) => s.serialize_u64(*n),
            CbRank::AtLeastOmega => s.serialize_str("ω"),
        }
    }
}

/// Cantor–Bendixson rank by structural recursion on the term.
pub fn cb_rank(d: &SpaceDesc) -> Result<CbRank> {
    match d {
        SpaceDesc::FiniteDiscrete { k: 0 } => {
            Err(Error::UnsupportedTerm("the empty space has no rank".into()))
        }
        SpaceDesc::FiniteDiscrete { .. } => Ok(CbRank::Finite(0)),
        SpaceDesc::OnePointCompactification { of } => Ok(cb_rank(of)?.plus(CbRank::Finite(1))),
        SpaceDesc::MonotoneVectors { r } => Ok(CbRank::Finite(*r as u64)),
        // δ^k(X × Y) = ⋃_{i+j=k} δ^i X × δ^j Y
        SpaceDesc::FiniteProduct { factors } => {
            if factors.is_empty() {
                return Ok(CbRank::Finite(0));
            }
            factors
                .iter()
                .try_fold(CbRank::Finite(0), |acc, d| Ok(acc.plus(cb_rank(d)?)))
        }
        SpaceDesc::PrimeIndexedProduct { .. } => Err(Error::UnsupportedTerm(format!(
            "rank of the infinite product {}",
            d.render(true)
        ))),
        SpaceDesc::NaturalsWithClosedPoint => Ok(CbRank::Finite(1)),
        SpaceDesc::ContainsAllMonotone => Ok(CbRank::AtLeastOmega),
    }
}

/// The homeomorphism type of the spectrum of a built-in family.
pub fn space_description(f: &Family) -> Result<SpaceDesc> {
    let over_primes = |max_prime: &Option<u64>, factor: SpaceDesc| match max_prime {
        None => SpaceDesc::PrimeIndexedProduct {
            of: Box::new(factor),
        },
        Some(m) => SpaceDesc::FiniteProduct {
            factors: vec![factor; primes_up_to(*m).len()],
        },
    };
    Ok(match f.spec() {
        FamilySpec::CyclicP { .. } | FamilySpec::CyclicPrimeOrder => SpaceDesc::nat_plus(),
        FamilySpec::AbelianPRank { r, .. } => SpaceDesc::MonotoneVectors { r: *r },
        FamilySpec::CyclicAll { max_prime } => {
            over_primes(max_prime, SpaceDesc::MonotoneVectors { r: 1 })
        }
        FamilySpec::AbelianRank { r, max_prime } => {
            over_primes(max_prime, SpaceDesc::MonotoneVectors { r: *r })
        }
        FamilySpec::ElementaryAbelian { .. } => SpaceDesc::NaturalsWithClosedPoint,
        FamilySpec::AbelianP { .. } => SpaceDesc::ContainsAllMonotone,
        FamilySpec::AbelianPExponent { .. } => {
            return Err(Error::Unsupported(format!(
                "no structural description for {}",
                f.name()
            )))
        }
        FamilySpec::Extensional(_) => SpaceDesc::FiniteDiscrete {
            k: f.table().unwrap().len() as u64,
        },
    })
}
