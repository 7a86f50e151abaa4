use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{hsupp, support_contains, upset_form, NatSet, ObjectExpr, Support};
use crate::abgroup::FinAbGroup;
use crate::error::{Error, Result};
use crate::family::{check_predicate, Family, FamilySpec, Member, Predicate};
use crate::spectrum::{
    space_description, validate_point, ClopenSet, Decision, OpenSet, ProfinitePoint, SpaceDesc,
};

/// Order bound used when a prime can only be probed by search.
const SEARCH_CAP: u128 = 4096;

/// Order bound for the oracle cross-check behind a family-prime certificate.
const CERTIFY_CAP: u128 = 16;

/// The subset of the spectrum attached to a thick ideal.
#[derive(Debug, Clone)]
pub enum Region {
    Open(OpenSet),
    /// Over `E_p`: the union of the supports, a subset of `ℕ`.
    Naturals(NatSet),
}

/// A thick tensor ideal, stored through its support.
#[derive(Debug, Clone)]
pub struct ThickIdeal {
    family: Family,
    region: Region,
    generators: Vec<ObjectExpr>,
}

impl ThickIdeal {
    /// The ideal generated by `gens`: the join of their supports.
    pub fn generated_by(f: &Family, gens: &[ObjectExpr]) -> Result<Self> {
        let mut acc = match f.spec() {
            FamilySpec::ElementaryAbelian { .. } => Support::Naturals(NatSet::empty()),
            _ => Support::Clopen(ClopenSet::empty(f)?),
        };
        for g in gens {
            acc = acc.join(&hsupp(f, g)?)?;
        }
        let region = match acc {
            Support::Clopen(c) => Region::Open(OpenSet::Clopen(c)),
            Support::Naturals(s) => Region::Naturals(s),
        };
        Ok(Self {
            family: f.clone(),
            region,
            generators: gens.to_vec(),
        })
    }

    /// The ideal of objects supported in an arbitrary open set.
    pub fn from_open(open: OpenSet) -> Self {
        Self {
            family: open.family().clone(),
            region: Region::Open(open),
            generators: Vec::new(),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn generators(&self) -> &[ObjectExpr] {
        &self.generators
    }

    /// `X ∈ I` iff `hsupp(X) ⊆ hsupp(I)`.
    pub fn contains(&self, x: &ObjectExpr, budget: u64) -> Result<Decision> {
        match (&self.region, hsupp(&self.family, x)?) {
            (Region::Open(u), Support::Clopen(c)) => u.contains_clopen(&c, budget),
            (Region::Naturals(s), Support::Naturals(t)) => Ok(Decision::from_bool(t.is_subset(s))),
            _ => Err(Error::CrossFamily),
        }
    }

    pub fn leq(&self, other: &ThickIdeal, budget: u64) -> Result<Decision> {
        if self.family != other.family {
            return Err(Error::CrossFamily);
        }
        match (&self.region, &other.region) {
            (Region::Open(a), Region::Open(b)) => a.subset(b, budget),
            (Region::Naturals(a), Region::Naturals(b)) => Ok(Decision::from_bool(a.is_subset(b))),
            _ => Err(Error::CrossFamily),
        }
    }

    pub fn render(&self, ascii: bool) -> String {
        match &self.region {
            Region::Open(OpenSet::Clopen(c)) => c.to_string(),
            Region::Open(u) => format!("{u:?}"),
            Region::Naturals(s) => s.render(ascii),
        }
    }
}

/// The thick ideal generated by `gens`.
pub fn ideal_of(f: &Family, gens: &[ObjectExpr]) -> Result<ThickIdeal> {
    ThickIdeal::generated_by(f, gens)
}

/// A prime tensor ideal.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimeIdeal {
    /// `𝔭_x = {X : x ∉ hsupp(X)}`.
    PointPrime { family: Family, point: ProfinitePoint },
    /// `𝔭_V = {X : hsupp(X) ∩ V = ∅}` for a multiplicative global subfamily `V`.
    FamilyPrime { family: Family, sub: Family },
}

impl PrimeIdeal {
    pub fn of_point(f: &Family, x: ProfinitePoint) -> Result<Self> {
        validate_point(f, &x)?;
        Ok(PrimeIdeal::PointPrime {
            family: f.clone(),
            point: x,
        })
    }

    /// Requires `V` downward closed in `F` and certified multiplicative global.
    pub fn family_prime(f: &Family, v: &Family) -> Result<Self> {
        if !v.is_downward_closed_in(f)? {
            return Err(Error::NotDownwardClosed {
                sub: v.name(),
                ambient: f.name(),
            });
        }
        let outcome = check_predicate(v, Predicate::MultiplicativeGlobal, CERTIFY_CAP)?;
        if !outcome.is_certified() {
            return Err(Error::NotCertifiedPrime(format!(
                "{} is not certified multiplicative global",
                v.name()
            )));
        }
        Ok(PrimeIdeal::FamilyPrime {
            family: f.clone(),
            sub: v.clone(),
        })
    }

    pub fn family(&self) -> &Family {
        match self {
            PrimeIdeal::PointPrime { family, .. } | PrimeIdeal::FamilyPrime { family, .. } => {
                family
            }
        }
    }

    pub fn is_zero_ideal(&self) -> bool {
        matches!(self, PrimeIdeal::FamilyPrime { family, sub } if family == sub)
    }

    pub fn label(&self, ascii: bool) -> String {
        let p = if ascii { "p" } else { "𝔭" };
        match self {
            PrimeIdeal::PointPrime { point, .. } => format!("{p}_{{{}}}", point.label(ascii)),
            PrimeIdeal::FamilyPrime { sub, .. } => format!("{p}_{{{}}}", sub.name()),
        }
    }

    pub fn contains(&self, x: &ObjectExpr) -> Result<bool> {
        match self {
            PrimeIdeal::PointPrime { family, point } => {
                Ok(!support_contains(family, x, point)?)
            }
            PrimeIdeal::FamilyPrime { family, sub } => Ok(!support_meets(family, x, sub)?),
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(f.alternate()))
    }
}

fn as_group(f: &Family, m: &Member) -> Member {
    match (f.table(), m) {
        (Some(t), Member::Named(n)) => t
            .index_of(n)
            .and_then(|i| t.group(i))
            .map_or_else(|| m.clone(), |g| Member::Ab(g.clone())),
        _ => m.clone(),
    }
}

/// Whether `hsupp(X)` meets the group points of `V`.
fn support_meets(f: &Family, x: &ObjectExpr, v: &Family) -> Result<bool> {
    if let FamilySpec::ElementaryAbelian { .. } = f.spec() {
        let Support::Naturals(s) = hsupp(f, x)? else {
            unreachable!()
        };
        let ranks = match (v.shape(), v.table()) {
            (Some(shape), _) => match shape.rank {
                Some(r) => NatSet::Finite((0..=r as u64).collect()),
                None => NatSet::all(),
            },
            (None, Some(t)) => NatSet::Finite(
                t.require_groups()?
                    .iter()
                    .map(|g| g.rank() as u64)
                    .collect::<BTreeSet<_>>(),
            ),
            (None, None) => unreachable!(),
        };
        return Ok(!s.intersection(&ranks).is_empty());
    }
    // V is downward closed, so an up-set meets V iff its generator lies in V.
    if let Some(gens) = upset_form(f, x)? {
        return Ok(gens.iter().any(|g| v.contains_group(g)));
    }
    // A clopen at stage n meets V iff some stage-n member lies in V, since
    // truncations are quotients.
    if f.has_finite_stages() {
        let Support::Clopen(c) = hsupp(f, x)? else {
            unreachable!()
        };
        for m in c.members() {
            if v.contains(&as_group(f, m))? {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    for h in v.members_up_to(SEARCH_CAP)? {
        let h = f.resolve(&as_group(v, &h))?;
        if support_contains(f, x, &ProfinitePoint::Stabilizing(h))? {
            return Ok(true);
        }
    }
    Err(Error::UndecidableAtCap {
        what: format!("whether the support of {x} meets {}", v.name()),
        cap: SEARCH_CAP as u64,
    })
}

/// One step `𝔭_{≤l-1} ⊋ 𝔭_{≤l}` of the exponent chain in `A(p)`.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub level: u32,
    pub prime: PrimeIdeal,
    /// `e_{ℤ/p^l}`, lying in the previous prime but not in this one.
    pub witness: ObjectExpr,
    pub witness_in_previous: bool,
    pub witness_in_prime: bool,
}

impl ChainLink {
    pub fn label(&self, ascii: bool) -> String {
        match (self.level, ascii) {
            (1, false) => "𝔭_{E_p}".into(),
            (1, true) => "p_{E_p}".into(),
            (l, false) => format!("𝔭_{{≤{l}}}"),
            (l, true) => format!("p_{{<={l}}}"),
        }
    }

    pub fn is_strict(&self) -> bool {
        self.witness_in_previous && !self.witness_in_prime
    }
}

/// The descending chain `𝔭_1 ⊋ 𝔭_{E_p} ⊋ 𝔭_{≤2} ⊋ … ⊋ 𝔭_{≤L}` of primes in `A(p)`,
/// each step certified by a generator.
pub fn krull_chain(f: &Family, length: u32) -> Result<Vec<ChainLink>> {
    let FamilySpec::AbelianP { p } = f.spec() else {
        return Err(Error::InvalidSpec(format!(
            "Krull chains are built in A(p), not {}",
            f.name()
        )));
    };
    if length == 0 {
        return Err(Error::InvalidSpec("chain length must be at least 1".into()));
    }
    let mut previous = PrimeIdeal::of_point(f, ProfinitePoint::group(FinAbGroup::trivial()))?;
    let mut out = Vec::new();
    for l in 1..=length {
        let sub = if l == 1 {
            Family::new(FamilySpec::ElementaryAbelian { p: *p })?
        } else {
            Family::new(FamilySpec::AbelianPExponent { p: *p, l })?
        };
        let prime = PrimeIdeal::family_prime(f, &sub)?;
        let witness = ObjectExpr::gen(FinAbGroup::p_group(*p, &[l])?);
        out.push(ChainLink {
            level: l,
            witness_in_previous: previous.contains(&witness)?,
            witness_in_prime: prime.contains(&witness)?,
            prime: prime.clone(),
            witness,
        });
        previous = prime;
    }
    Ok(out)
}

/// The tt-class of a derived VI-module: its support, empty or cofinite.
pub fn vi_class(f: &Family, x: &ObjectExpr) -> Result<NatSet> {
    if !matches!(f.spec(), FamilySpec::ElementaryAbelian { .. }) {
        return Err(Error::Unsupported(format!(
            "VI classes live over E_p, not {}",
            f.name()
        )));
    }
    let Support::Naturals(s) = hsupp(f, x)? else {
        unreachable!()
    };
    if let NatSet::Finite(v) = &s {
        if !v.is_empty() {
            return Err(Error::ClassificationViolation(format!(
                "{x} has finite nonempty support {s}"
            )));
        }
    }
    Ok(s)
}

/// A finite presentation of the lattice of thick ideals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealClassification {
    pub family: String,
    pub space: String,
    /// The open subsets of the spectrum.
    pub lattice: String,
    /// Supports of principal ideals.
    pub finitely_generated: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn classify_ideals(f: &Family) -> Result<IdealClassification> {
    let desc = space_description(f)?;
    let space = desc.to_string();
    let (lattice, finitely_generated, note) = match f.spec() {
        FamilySpec::ElementaryAbelian { .. } => (
            "all subsets of ℕ, plus the whole space".to_string(),
            "∅ and the cofinite subsets of ℕ".to_string(),
            Some("every thick ideal is principal".to_string()),
        ),
        FamilySpec::Extensional(_) => (
            format!("all subsets of the {} points", f.table().unwrap().len()),
            "all subsets".to_string(),
            None,
        ),
        FamilySpec::AbelianP { .. } | FamilySpec::AbelianPExponent { .. } => {
            return Err(Error::Unsupported(format!(
                "no ideal classification for {}",
                f.name()
            )))
        }
        _ => {
            let fg = if desc == SpaceDesc::nat_plus() || desc == (SpaceDesc::MonotoneVectors { r: 1 }) {
                "clopen subsets of ℕ⁺: finite sets avoiding ∞, or cofinite sets containing ∞"
                    .to_string()
            } else {
                format!("clopen subsets of {space}")
            };
            (
                format!("open subsets of {space}"),
                fg,
                Some("restricted to group points, clopens are the asymptotic subsets".into()),
            )
        }
    };
    Ok(IdealClassification {
        family: f.name(),
        space,
        lattice,
        finitely_generated,
        note,
    })
}
