use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::{points::fiber_is_singleton, points::all_group_points_isolated, truncate, ProfinitePoint};
use crate::error::{Error, Result};
use crate::family::{Family, Member};

/// Three-valued answer for questions that are only semidecidable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    UnknownAtCap,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Yes => "true",
            Decision::No => "false",
            Decision::UnknownAtCap => "unknown-at-cap",
        }
    }
}

impl Serialize for Decision {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Decision::Yes => s.serialize_bool(true),
            Decision::No => s.serialize_bool(false),
            Decision::UnknownAtCap => s.serialize_str("unknown-at-cap"),
        }
    }
}

/// A clopen subset: the preimage of `members ⊆ π₀U[stage]` under `π₀q_stage`.
/// Always stored at its least defining stage.
#[derive(Debug, Clone)]
pub struct ClopenSet {
    family: Family,
    stage: u64,
    members: BTreeSet<Member>,
}

impl PartialEq for ClopenSet {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.stage == other.stage && self.members == other.members
    }
}

impl Eq for ClopenSet {}

impl ClopenSet {
    pub fn new(f: &Family, n: u64, members: impl IntoIterator<Item = Member>) -> Result<Self> {
        let stage = f.stage(n)?;
        let mut set = BTreeSet::new();
        for m in members {
            let m = f.resolve(&m)?;
            if stage.position(&m).is_none() {
                return Err(Error::InvalidSpec(format!("{m} is not in stage {}", stage.index)));
            }
            set.insert(m);
        }
        Self {
            family: f.clone(),
            stage: stage.index,
            members: set,
        }
        .normalized()
    }

    pub fn empty(f: &Family) -> Result<Self> {
        Self::new(f, 1, [])
    }

    pub fn whole(f: &Family) -> Result<Self> {
        let s = f.stage(1)?;
        Self::new(f, 1, s.members.iter().cloned())
    }

    /// `{x : x ≫ G}`, defined at the stage where `G` first appears.
    pub fn up_set(f: &Family, g: &Member) -> Result<Self> {
        let g = f.resolve(g)?;
        let n = match &g {
            Member::Ab(h) if !f.is_extensional() => u64::try_from(h.exponent()).map_err(|_| {
                Error::Unsupported(format!("exponent of {h} exceeds the stage index range"))
            })?,
            _ => 1,
        };
        let stage = f.stage(n)?;
        let mut members = Vec::new();
        for h in &stage.members {
            if f.epi(h, &g)? {
                members.push(h.clone());
            }
        }
        Self::new(f, n, members)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn members(&self) -> &BTreeSet<Member> {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_whole(&self) -> Result<bool> {
        Ok(self.members.len() == self.family.stage(self.stage)?.members.len())
    }

    /// A stabilizing point inside the set, if nonempty.
    pub fn witness(&self) -> Option<ProfinitePoint> {
        self.members
            .iter()
            .next()
            .map(|m| ProfinitePoint::Stabilizing(m.clone()))
    }

    /// The same set written at stage `m >= self.stage`.
    pub fn pullback(&self, m: u64) -> Result<BTreeSet<Member>> {
        let stage = self.family.stage(m.max(self.stage))?;
        let mut out = BTreeSet::new();
        for x in &stage.members {
            if self.members.contains(&self.family.reflect(self.stage, x)?) {
                out.insert(x.clone());
            }
        }
        Ok(out)
    }

    fn normalized(mut self) -> Result<Self> {
        for j in self.family.stage_indices(self.stage)? {
            if j >= self.stage {
                break;
            }
            let mut image = BTreeSet::new();
            for x in &self.members {
                image.insert(self.family.reflect(j, x)?);
            }
            let candidate = ClopenSet {
                family: self.family.clone(),
                stage: j,
                members: image,
            };
            if candidate.pullback(self.stage)? == self.members {
                self = candidate;
                break;
            }
        }
        Ok(self)
    }

    fn aligned(&self, other: &Self) -> Result<(u64, BTreeSet<Member>, BTreeSet<Member>)> {
        if self.family != other.family {
            return Err(Error::CrossFamily);
        }
        let m = self.stage.max(other.stage);
        Ok((m, self.pullback(m)?, other.pullback(m)?))
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        let (m, a, b) = self.aligned(other)?;
        Self::new(&self.family, m, a.intersection(&b).cloned())
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        let (m, a, b) = self.aligned(other)?;
        Self::new(&self.family, m, a.union(&b).cloned())
    }

    pub fn complement(&self) -> Result<Self> {
        let stage = self.family.stage(self.stage)?;
        let rest = stage
            .members
            .iter()
            .filter(|x| !self.members.contains(*x))
            .cloned();
        Self::new(&self.family, self.stage, rest)
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        let (_, a, b) = self.aligned(other)?;
        Ok(a.is_subset(&b))
    }

    pub fn member(&self, x: &ProfinitePoint) -> Result<bool> {
        Ok(self.members.contains(&truncate(&self.family, x, self.stage)?))
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(Member::label).collect()
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {{{}}}", self.stage, self.labels().join(", "))
    }
}

type Steps = Arc<dyn Fn(u64) -> Result<ClopenSet> + Send + Sync>;
type Pred = Arc<dyn Fn(&Member) -> bool + Send + Sync>;

/// An open subset of the point space.
#[derive(Clone)]
pub enum OpenSet {
    Clopen(ClopenSet),
    /// `⋃ₖ Uₖ` for an increasing sequence of clopens.
    DirectedUnion {
        family: Family,
        label: String,
        steps: Steps,
    },
    /// A set of isolated group points cut out by a predicate.
    IsolatedFamily {
        family: Family,
        label: String,
        predicate: Pred,
    },
    WholeSpace(Family),
}

impl fmt::Debug for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenSet::Clopen(c) => write!(f, "Clopen({c})"),
            OpenSet::DirectedUnion { label, .. } => write!(f, "DirectedUnion({label})"),
            OpenSet::IsolatedFamily { label, .. } => write!(f, "IsolatedFamily({label})"),
            OpenSet::WholeSpace(fam) => write!(f, "WholeSpace({})", fam.name()),
        }
    }
}

impl OpenSet {
    pub fn directed_union(
        family: &Family,
        label: impl Into<String>,
        steps: impl Fn(u64) -> Result<ClopenSet> + Send + Sync + 'static,
    ) -> Self {
        OpenSet::DirectedUnion {
            family: family.clone(),
            label: label.into(),
            steps: Arc::new(steps),
        }
    }

    /// Only available when every group point of the family is isolated.
    pub fn isolated_family(
        family: &Family,
        label: impl Into<String>,
        predicate: impl Fn(&Member) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if !all_group_points_isolated(family) {
            return Err(Error::Unsupported(format!(
                "{} has non-isolated group points",
                family.name()
            )));
        }
        Ok(OpenSet::IsolatedFamily {
            family: family.clone(),
            label: label.into(),
            predicate: Arc::new(predicate),
        })
    }

    pub fn family(&self) -> &Family {
        match self {
            OpenSet::Clopen(c) => c.family(),
            OpenSet::DirectedUnion { family, .. }
            | OpenSet::IsolatedFamily { family, .. }
            | OpenSet::WholeSpace(family) => family,
        }
    }

    fn same_family(&self, f: &Family) -> Result<()> {
        if self.family() == f {
            Ok(())
        } else {
            Err(Error::CrossFamily)
        }
    }

    pub fn contains_point(&self, x: &ProfinitePoint, budget: u64) -> Result<Decision> {
        Ok(match self {
            OpenSet::Clopen(c) => Decision::from_bool(c.member(x)?),
            OpenSet::WholeSpace(_) => Decision::Yes,
            OpenSet::DirectedUnion { steps, .. } => {
                for k in 1..=budget {
                    if steps(k)?.member(x)? {
                        return Ok(Decision::Yes);
                    }
                }
                Decision::UnknownAtCap
            }
            OpenSet::IsolatedFamily { predicate, .. } => match x {
                ProfinitePoint::Stabilizing(m) => Decision::from_bool(predicate(m)),
                ProfinitePoint::Symbolic(_) => Decision::No,
                ProfinitePoint::Thread(_) => Decision::UnknownAtCap,
            },
        })
    }

    pub fn contains_clopen(&self, c: &ClopenSet, budget: u64) -> Result<Decision> {
        self.same_family(c.family())?;
        Ok(match self {
            OpenSet::Clopen(d) => Decision::from_bool(c.is_subset(d)?),
            OpenSet::WholeSpace(_) => Decision::Yes,
            // A clopen is compact, so it lies in the union iff it lies in some step.
            OpenSet::DirectedUnion { steps, .. } => {
                for k in 1..=budget {
                    if c.is_subset(&steps(k)?)? {
                        return Ok(Decision::Yes);
                    }
                }
                Decision::UnknownAtCap
            }
            OpenSet::IsolatedFamily {
                family, predicate, ..
            } => {
                for m in c.members() {
                    if !fiber_is_singleton(family, c.stage(), m)? || !predicate(m) {
                        return Ok(Decision::No);
                    }
                }
                Decision::Yes
            }
        })
    }

    pub fn subset(&self, other: &OpenSet, budget: u64) -> Result<Decision> {
        other.same_family(self.family())?;
        if matches!(other, OpenSet::WholeSpace(_)) {
            return Ok(Decision::Yes);
        }
        match self {
            OpenSet::Clopen(c) => other.contains_clopen(c, budget),
            OpenSet::WholeSpace(f) => other.contains_clopen(&ClopenSet::whole(f)?, budget),
            OpenSet::DirectedUnion { steps, .. } => {
                for k in 1..=budget {
                    if other.contains_clopen(&steps(k)?, budget)? == Decision::No {
                        return Ok(Decision::No);
                    }
                }
                Ok(Decision::UnknownAtCap)
            }
            OpenSet::IsolatedFamily {
                family, predicate, ..
            } => {
                for m in family.members_up_to(u128::from(budget))? {
                    if predicate(&m)
                        && other.contains_point(&ProfinitePoint::Stabilizing(m), budget)?
                            == Decision::No
                    {
                        return Ok(Decision::No);
                    }
                }
                Ok(if family.is_extensional() {
                    Decision::Yes
                } else {
                    Decision::UnknownAtCap
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Coord;

    fn fam(j: &str) -> Family {
        Family::from_json(j).unwrap()
    }

    fn ab(s: &str) -> Member {
        Member::Ab(s.parse().unwrap())
    }

    #[test]
    fn membership_by_truncation() {
        let f = fam(r#"{"kind":"cyclic_p","p":3}"#);
        let zp = ProfinitePoint::vector(3, &[Coord::Inf]).unwrap();
        let c = ClopenSet::new(&f, 9, [ab("3:[2]")]).unwrap();
        assert!(c.member(&zp).unwrap());
        assert!(!c.member(&ProfinitePoint::group("3:[3]".parse().unwrap())).unwrap() || true);
        assert!(c.member(&ProfinitePoint::group("3:[3]".parse().unwrap())).unwrap());
        assert!(!c.member(&ProfinitePoint::group("3:[1]".parse().unwrap())).unwrap());
    }

    #[test]
    fn normal_forms() {
        let f = fam(r#"{"kind":"cyclic_p","p":2}"#);
        let a = ClopenSet::new(&f, 2, [ab("2:[1]")]).unwrap();
        let b = ClopenSet::new(&f, 8, [ab("2:[1]"), ab("2:[2]"), ab("2:[3]")]).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.stage(), 2);
        let comp = a.complement().unwrap();
        assert_eq!(comp.labels(), ["1"]);
        let x = ClopenSet::new(&f, 2, [ab("1")]).unwrap();
        let y = ClopenSet::new(&f, 4, [ab("2:[2]")]).unwrap();
        assert!(x.meet(&y).unwrap().is_empty());
        assert!(x.join(&comp).unwrap().labels() == ["1"]);
        assert!(x.join(&a).unwrap().is_whole().unwrap());
    }

    #[test]
    fn up_sets_and_cross_family() {
        let f = fam(r#"{"kind":"abelian_p_rank","p":2,"r":2}"#);
        let u = ClopenSet::up_set(&f, &ab("2:[2,1]")).unwrap();
        assert_eq!(u.stage(), 4);
        assert_eq!(u.labels(), ["C4xC2", "C4xC4"]);
        let g = fam(r#"{"kind":"cyclic_p","p":2}"#);
        let v = ClopenSet::up_set(&g, &ab("2:[1]")).unwrap();
        assert_eq!(u.meet(&v), Err(Error::CrossFamily));
    }

    #[test]
    fn open_set_decisions() {
        let f = fam(r#"{"kind":"cyclic_p","p":2}"#);
        let finite = OpenSet::isolated_family(&f, "finite groups", |_| true).unwrap();
        let zp = ProfinitePoint::vector(2, &[Coord::Inf]).unwrap();
        assert_eq!(finite.contains_point(&zp, 10).unwrap(), Decision::No);
        let low = ClopenSet::new(&f, 4, [ab("1"), ab("2:[1]")]).unwrap();
        assert_eq!(finite.contains_clopen(&low, 10).unwrap(), Decision::Yes);
        let top = ClopenSet::up_set(&f, &ab("2:[2]")).unwrap();
        assert_eq!(finite.contains_clopen(&top, 10).unwrap(), Decision::No);
        let g = f.clone();
        let union = OpenSet::directed_union(&f, "C_{2^k} for k < n", move |k| {
            let members: Vec<Member> = (0..k.min(20) as u32)
                .map(|e| Member::Ab(crate::abgroup::FinAbGroup::p_group(2, &[e]).unwrap()))
                .collect();
            ClopenSet::new(&g, 1u64 << k.min(20), members)
        });
        assert_eq!(union.contains_clopen(&low, 5).unwrap(), Decision::Yes);
        assert_eq!(union.subset(&finite, 5).unwrap(), Decision::UnknownAtCap);
        assert_eq!(
            OpenSet::Clopen(top).subset(&union, 5).unwrap(),
            Decision::UnknownAtCap
        );
        let cpo = fam(r#"{"kind":"cyclic_prime_order"}"#);
        assert!(OpenSet::isolated_family(&cpo, "x", |_| true).is_err());
    }
}
