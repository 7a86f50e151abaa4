//! Formal compact objects and their homological supports.
//!
//! Only support-exact constructors are admitted, so `hsupp` is computed
//! exactly from the rules `Sum ↦ ∪`, `Tensor ↦ ∩`, `Shift ↦ id`.

use std::fmt;

use crate::abgroup::{quotient_count, FinAbGroup};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Member};
use crate::spectrum::{truncate, ClopenSet, ProfinitePoint};

mod ideals;
mod natset;
mod parse;
mod random;

pub use ideals::{
    classify_ideals, ideal_of, krull_chain, vi_class, ChainLink, IdealClassification, PrimeIdeal, Region,
    ThickIdeal,
};
pub use natset::NatSet;
pub use parse::{format_expr, parse_expr};
pub use random::random_expr;

/// A compact object described by a support-exact expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObjectExpr {
    Zero,
    Unit,
    /// `e_G`.
    Gen(Member),
    /// `e_{G,V}` with `V` recorded by its dimension only.
    GenTwisted(Member, u32),
    /// `χ_G`; extensional families only.
    Chi(Member),
    /// `cof(e_{G,k} → 𝟙)`.
    AugCone(Member),
    Shift(Box<ObjectExpr>),
    Sum(Box<ObjectExpr>, Box<ObjectExpr>),
    Tensor(Box<ObjectExpr>, Box<ObjectExpr>),
}

impl ObjectExpr {
    pub fn gen(g: impl Into<Member>) -> Self {
        ObjectExpr::Gen(g.into())
    }

    pub fn aug(g: impl Into<Member>) -> Self {
        ObjectExpr::AugCone(g.into())
    }

    pub fn shift(x: ObjectExpr) -> Self {
        ObjectExpr::Shift(Box::new(x))
    }

    pub fn sum(x: ObjectExpr, y: ObjectExpr) -> Self {
        ObjectExpr::Sum(Box::new(x), Box::new(y))
    }

    pub fn tensor(x: ObjectExpr, y: ObjectExpr) -> Self {
        ObjectExpr::Tensor(Box::new(x), Box::new(y))
    }

    pub fn depth(&self) -> usize {
        match self {
            ObjectExpr::Shift(x) => 1 + x.depth(),
            ObjectExpr::Sum(x, y) | ObjectExpr::Tensor(x, y) => 1 + x.depth().max(y.depth()),
            _ => 0,
        }
    }

    fn atoms(&self, out: &mut Vec<Member>) {
        match self {
            ObjectExpr::Zero | ObjectExpr::Unit => {}
            ObjectExpr::Gen(g)
            | ObjectExpr::GenTwisted(g, _)
            | ObjectExpr::Chi(g)
            | ObjectExpr::AugCone(g) => out.push(g.clone()),
            ObjectExpr::Shift(x) => x.atoms(out),
            ObjectExpr::Sum(x, y) | ObjectExpr::Tensor(x, y) => {
                x.atoms(out);
                y.atoms(out);
            }
        }
    }
}

impl ObjectExpr {
    pub(crate) fn write_with(
        &self,
        f: &mut dyn fmt::Write,
        member: &dyn Fn(&Member) -> String,
    ) -> fmt::Result {
        let atom = |f: &mut dyn fmt::Write, x: &ObjectExpr| match x {
            ObjectExpr::Sum(..) | ObjectExpr::Tensor(..) => {
                f.write_str("(")?;
                x.write_with(f, member)?;
                f.write_str(")")
            }
            _ => x.write_with(f, member),
        };
        match self {
            ObjectExpr::Zero => f.write_str("zero"),
            ObjectExpr::Unit => f.write_str("unit"),
            ObjectExpr::Gen(g) => write!(f, "e[{}]", member(g)),
            ObjectExpr::GenTwisted(g, d) => write!(f, "e[{}|{d}]", member(g)),
            ObjectExpr::Chi(g) => write!(f, "chi[{}]", member(g)),
            ObjectExpr::AugCone(g) => write!(f, "aug[{}]", member(g)),
            ObjectExpr::Shift(x) => {
                f.write_str("shift ")?;
                atom(f, x)
            }
            ObjectExpr::Sum(x, y) => {
                x.write_with(f, member)?;
                f.write_str(" (+) ")?;
                atom(f, y)
            }
            ObjectExpr::Tensor(x, y) => {
                atom(f, x)?;
                f.write_str(" (x) ")?;
                atom(f, y)
            }
        }
    }
}

impl fmt::Display for ObjectExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &Member::to_string)
    }
}

/// The homological support of an object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Clopen(ClopenSet),
    /// Over `E_p`, indexed by rank.
    Naturals(NatSet),
}

impl Support {
    pub fn is_empty(&self) -> bool {
        match self {
            Support::Clopen(c) => c.is_empty(),
            Support::Naturals(s) => s.is_empty(),
        }
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Support::Clopen(a), Support::Clopen(b)) => Ok(Support::Clopen(a.join(b)?)),
            (Support::Naturals(a), Support::Naturals(b)) => Ok(Support::Naturals(a.union(b))),
            _ => Err(Error::CrossFamily),
        }
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Support::Clopen(a), Support::Clopen(b)) => Ok(Support::Clopen(a.meet(b)?)),
            (Support::Naturals(a), Support::Naturals(b)) => {
                Ok(Support::Naturals(a.intersection(b)))
            }
            _ => Err(Error::CrossFamily),
        }
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        match (self, other) {
            (Support::Clopen(a), Support::Clopen(b)) => a.is_subset(b),
            (Support::Naturals(a), Support::Naturals(b)) => Ok(a.is_subset(b)),
            _ => Err(Error::CrossFamily),
        }
    }

    pub fn render(&self, ascii: bool) -> String {
        match self {
            Support::Clopen(c) => c.to_string(),
            Support::Naturals(s) => s.render(ascii),
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.alternate()))
    }
}

fn elementary_rank(f: &Family, g: &Member) -> Result<u64> {
    match g {
        Member::Ab(h) if f.contains(g)? => Ok(h.rank() as u64),
        _ => Err(f.not_member(g)),
    }
}

fn check_atom(f: &Family, x: &ObjectExpr) -> Result<()> {
    match x {
        ObjectExpr::GenTwisted(_, 0) => Err(Error::InvalidSpec(
            "twisted generators need a nonzero module".into(),
        )),
        ObjectExpr::Chi(_) if !f.is_extensional() => Err(Error::Unsupported(format!(
            "chi objects need an extensional essentially finite family, not {}",
            f.name()
        ))),
        ObjectExpr::Unit if f.unit().is_none() => Err(Error::InvalidSpec(format!(
            "{} is not unital",
            f.name()
        ))),
        _ => Ok(()),
    }
}

/// Number of `Out(G)`-orbits of epimorphisms `H ↠ G`, i.e. quotients of `H` isomorphic to `G`.
pub(crate) fn epi_orbits(f: &Family, h: &Member, g: &Member) -> Result<u64> {
    let h = f.resolve(h)?;
    let g = f.resolve(g)?;
    match (f.table(), &h, &g) {
        (Some(t), Member::Named(a), Member::Named(b)) => {
            t.orbit_count(t.index_of(a).unwrap(), t.index_of(b).unwrap())
        }
        (None, Member::Ab(a), Member::Ab(b)) => {
            Ok(u64::try_from(quotient_count(a, b)).unwrap_or(u64::MAX))
        }
        _ => unreachable!("resolve returns the family's representation"),
    }
}

/// Least stage at which every atom of `x` is visible.
pub fn defining_stage(f: &Family, x: &ObjectExpr) -> Result<u64> {
    let mut atoms = Vec::new();
    x.atoms(&mut atoms);
    let mut n = 1u64;
    for g in atoms {
        if let Member::Ab(h) = f.resolve(&g)? {
            if !f.is_extensional() {
                n = n.max(u64::try_from(h.exponent()).map_err(|_| {
                    Error::Unsupported(format!("exponent of {h} exceeds the stage index range"))
                })?);
            }
        }
    }
    f.canonical_index(n)
}

/// Homological support, exact for every constructor.
pub fn hsupp(f: &Family, x: &ObjectExpr) -> Result<Support> {
    check_atom(f, x)?;
    if let FamilySpec::ElementaryAbelian { .. } = f.spec() {
        return hsupp_elementary(f, x).map(Support::Naturals);
    }
    let clopen = |c: Result<ClopenSet>| c.map(Support::Clopen);
    match x {
        ObjectExpr::Zero => clopen(ClopenSet::empty(f)),
        ObjectExpr::Unit => clopen(ClopenSet::whole(f)),
        ObjectExpr::Gen(g) | ObjectExpr::GenTwisted(g, _) => clopen(ClopenSet::up_set(f, g)),
        ObjectExpr::Chi(g) => clopen(ClopenSet::new(f, 1, [f.resolve(g)?])),
        ObjectExpr::AugCone(g) => {
            let n = defining_stage(f, x)?;
            let stage = f.stage(n)?;
            let mut members = Vec::new();
            for h in &stage.members {
                if epi_orbits(f, h, g)? != 1 {
                    members.push(h.clone());
                }
            }
            clopen(ClopenSet::new(f, n, members))
        }
        ObjectExpr::Shift(y) => hsupp(f, y),
        ObjectExpr::Sum(a, b) => hsupp(f, a)?.join(&hsupp(f, b)?),
        ObjectExpr::Tensor(a, b) => hsupp(f, a)?.meet(&hsupp(f, b)?),
    }
}

fn hsupp_elementary(f: &Family, x: &ObjectExpr) -> Result<NatSet> {
    Ok(match x {
        ObjectExpr::Zero => NatSet::empty(),
        ObjectExpr::Unit => NatSet::all(),
        ObjectExpr::Gen(g) | ObjectExpr::GenTwisted(g, _) => {
            NatSet::at_least(elementary_rank(f, g)?)
        }
        ObjectExpr::Chi(_) => unreachable!("rejected by check_atom"),
        // The augmentation at rank n is k^{[n choose s]_p} → k, an isomorphism iff n = s.
        ObjectExpr::AugCone(g) => match elementary_rank(f, g)? {
            0 => NatSet::empty(),
            s => NatSet::all_but([s]),
        },
        ObjectExpr::Shift(y) => hsupp_elementary(f, y)?,
        ObjectExpr::Sum(a, b) => hsupp_elementary(f, a)?.union(&hsupp_elementary(f, b)?),
        ObjectExpr::Tensor(a, b) => {
            hsupp_elementary(f, a)?.intersection(&hsupp_elementary(f, b)?)
        }
    })
}

/// Pointwise support test: whether `X(x) ≄ 0`, evaluated directly from the
/// constructor rules at the point. Needs no filtration.
pub fn support_contains(f: &Family, x: &ObjectExpr, point: &ProfinitePoint) -> Result<bool> {
    check_atom(f, x)?;
    let at = |g: &Member| -> Result<Member> {
        match point {
            ProfinitePoint::Stabilizing(m) => f.resolve(m),
            _ => {
                let n = match f.resolve(g)? {
                    Member::Ab(h) => u64::try_from(h.exponent()).unwrap_or(u64::MAX),
                    Member::Named(_) => 1,
                };
                truncate(f, point, n)
            }
        }
    };
    Ok(match x {
        ObjectExpr::Zero => false,
        ObjectExpr::Unit => true,
        ObjectExpr::Gen(g) | ObjectExpr::GenTwisted(g, _) => f.epi(&at(g)?, g)?,
        ObjectExpr::Chi(g) => match point {
            ProfinitePoint::Stabilizing(m) => f.resolve(m)? == f.resolve(g)?,
            _ => false,
        },
        ObjectExpr::AugCone(g) => epi_orbits(f, &at(g)?, g)? != 1,
        ObjectExpr::Shift(y) => support_contains(f, y, point)?,
        ObjectExpr::Sum(a, b) => support_contains(f, a, point)? || support_contains(f, b, point)?,
        ObjectExpr::Tensor(a, b) => {
            support_contains(f, a, point)? && support_contains(f, b, point)?
        }
    })
}

/// For expressions built from `Zero`, `Unit`, `Gen`, `Shift`, `Sum`, `Tensor`
/// over an abelian kind: groups `Gᵢ` with support `⋃ᵢ {x : x ≫ Gᵢ}`.
pub(crate) fn upset_form(f: &Family, x: &ObjectExpr) -> Result<Option<Vec<FinAbGroup>>> {
    if f.is_extensional() {
        return Ok(None);
    }
    let group = |g: &Member| match f.resolve(g)? {
        Member::Ab(h) => Ok(h),
        Member::Named(n) => Err(Error::UnsupportedGroup(n)),
    };
    Ok(match x {
        ObjectExpr::Zero => Some(Vec::new()),
        ObjectExpr::Unit => Some(vec![FinAbGroup::trivial()]),
        ObjectExpr::Gen(g) | ObjectExpr::GenTwisted(g, _) => Some(vec![group(g)?]),
        ObjectExpr::Chi(_) | ObjectExpr::AugCone(_) => None,
        ObjectExpr::Shift(y) => upset_form(f, y)?,
        ObjectExpr::Sum(a, b) => match (upset_form(f, a)?, upset_form(f, b)?) {
            (Some(mut u), Some(v)) => {
                u.extend(v);
                Some(u)
            }
            _ => None,
        },
        // The least group above both is the coordinatewise maximum of
        // partitions; the term is empty when that group leaves the family.
        ObjectExpr::Tensor(a, b) => match (upset_form(f, a)?, upset_form(f, b)?) {
            (Some(u), Some(v)) => {
                let mut out = Vec::new();
                for g in &u {
                    for h in &v {
                        let j = least_common_cover(g, h);
                        if f.contains_group(&j) {
                            out.push(j);
                        }
                    }
                }
                Some(out)
            }
            _ => None,
        },
    })
}

fn least_common_cover(g: &FinAbGroup, h: &FinAbGroup) -> FinAbGroup {
    let mut primes: Vec<u64> = g.primes().chain(h.primes()).collect();
    primes.sort_unstable();
    primes.dedup();
    let parts = primes.into_iter().map(|p| {
        let (a, b) = (g.partition(p), h.partition(p));
        let len = a.len().max(b.len());
        let v = (0..len)
            .map(|i| a.get(i).copied().unwrap_or(0).max(b.get(i).copied().unwrap_or(0)))
            .collect();
        (p, v)
    });
    FinAbGroup::from_parts(parts).expect("valid partitions")
}
