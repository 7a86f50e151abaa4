//! Families of finite groups, closure predicates, and the standard reflective
//! filtration with its reflections `q_n`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::abgroup::{self, epi_exists, floor_log, is_prime, primes_up_to, FinAbGroup};
use crate::error::{Error, Result};

mod predicate;
mod table;

pub use predicate::{
    check_predicate, minimal_complement, MinimalComplement, Predicate, PredicateOutcome,
};
pub use table::{ExtensionalTable, TableIndex};

/// Serialized description of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    ElementaryAbelian {
        p: u64,
    },
    CyclicP {
        p: u64,
    },
    CyclicPrimeOrder,
    CyclicAll {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_prime: Option<u64>,
    },
    AbelianPRank {
        p: u64,
        r: usize,
    },
    AbelianRank {
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_prime: Option<u64>,
    },
    AbelianPExponent {
        p: u64,
        l: u32,
    },
    AbelianP {
        p: u64,
    },
    Extensional(ExtensionalTable),
}

/// An object of a family: an abelian group in canonical form, or a named
/// object of an extensional table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Member {
    Ab(FinAbGroup),
    Named(String),
}

impl Member {
    pub fn group(&self) -> Option<&FinAbGroup> {
        match self {
            Member::Ab(g) => Some(g),
            Member::Named(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Member::Ab(g) => g.short_name(),
            Member::Named(s) => s.clone(),
        }
    }
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Member::Ab(g) => write!(f, "{g}"),
            Member::Named(s) => f.write_str(s),
        }
    }
}

impl From<FinAbGroup> for Member {
    fn from(g: FinAbGroup) -> Self {
        Member::Ab(g)
    }
}

/// Membership rule shared by the abelian kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Shape {
    /// Allowed primes; `None` means all primes.
    pub primes: Option<BTreeSet<u64>>,
    /// Bound on each `p`-rank.
    pub rank: Option<usize>,
    /// Bound on each exponent `λ₁`.
    pub exponent: Option<u32>,
    /// Only groups supported at a single prime (or trivial).
    pub single_prime: bool,
}

impl Shape {
    fn admits(&self, g: &FinAbGroup) -> bool {
        if self.single_prime && g.parts().len() > 1 {
            return false;
        }
        g.parts().iter().all(|(p, lambda)| {
            self.primes.as_ref().is_none_or(|s| s.contains(p))
                && self.rank.is_none_or(|r| lambda.len() <= r)
                && self.exponent.is_none_or(|l| lambda[0] <= l)
        })
    }

    fn within(&self, other: &Shape) -> bool {
        let primes_ok = match (&self.primes, &other.primes) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a.is_subset(b),
        };
        let le = |a: Option<u64>, b: Option<u64>| match (a, b) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x <= y,
        };
        let single_ok = !other.single_prime
            || self.single_prime
            || self.primes.as_ref().is_some_and(|s| s.len() <= 1);
        primes_ok
            && le(self.rank.map(|r| r as u64), other.rank.map(|r| r as u64))
            && le(self.exponent.map(u64::from), other.exponent.map(u64::from))
            && single_ok
    }
}

/// Stage `n` of the standard filtration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationStage {
    pub index: u64,
    pub members: Vec<Member>,
}

impl FiltrationStage {
    pub fn position(&self, x: &Member) -> Option<usize> {
        self.members.iter().position(|m| m == x)
    }
}

/// Upper bound on the number of members materialised for one stage.
pub const STAGE_BUDGET: u128 = 1 << 20;

#[derive(Debug)]
struct Inner {
    spec: FamilySpec,
    table: Option<TableIndex>,
    stages: Mutex<HashMap<u64, Arc<FiltrationStage>>>,
}

/// A validated family. Cheap to clone; stage computations are memoised.
#[derive(Debug, Clone)]
pub struct Family {
    inner: Arc<Inner>,
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl Eq for Family {}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{p} is not prime")))
    }
}

impl Family {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        let table = match &spec {
            FamilySpec::ElementaryAbelian { p }
            | FamilySpec::CyclicP { p }
            | FamilySpec::AbelianPRank { p, .. }
            | FamilySpec::AbelianPExponent { p, .. }
            | FamilySpec::AbelianP { p } => {
                check_prime(*p)?;
                None
            }
            FamilySpec::CyclicAll { max_prime } | FamilySpec::AbelianRank { max_prime, .. } => {
                if max_prime.is_some_and(|m| m < 2) {
                    return Err(Error::InvalidSpec("max_prime must be at least 2".into()));
                }
                None
            }
            FamilySpec::CyclicPrimeOrder => None,
            FamilySpec::Extensional(t) => Some(TableIndex::build(t)?),
        };
        if let FamilySpec::AbelianPExponent { l: 0, .. } = spec {
            return Err(Error::InvalidSpec("exponent bound must be positive".into()));
        }
        Ok(Self {
            inner: Arc::new(Inner {
                spec,
                table,
                stages: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: FamilySpec =
            serde_json::from_str(s).map_err(|e| Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        Self::new(spec)
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.inner.spec
    }

    pub fn table(&self) -> Option<&TableIndex> {
        self.inner.table.as_ref()
    }

    pub fn is_extensional(&self) -> bool {
        self.inner.table.is_some()
    }

    /// The prime of a single-prime abelian kind.
    pub fn prime(&self) -> Option<u64> {
        match self.spec() {
            FamilySpec::ElementaryAbelian { p }
            | FamilySpec::CyclicP { p }
            | FamilySpec::AbelianPRank { p, .. }
            | FamilySpec::AbelianPExponent { p, .. }
            | FamilySpec::AbelianP { p } => Some(*p),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self.spec() {
            FamilySpec::ElementaryAbelian { p } => format!("E_{p}"),
            FamilySpec::CyclicP { p } => format!("C_{p}"),
            FamilySpec::CyclicPrimeOrder => "C_prime".into(),
            FamilySpec::CyclicAll { max_prime: None } => "C".into(),
            FamilySpec::CyclicAll { max_prime: Some(m) } => format!("C(p<={m})"),
            FamilySpec::AbelianPRank { p, r } => format!("A({p})<={r}"),
            FamilySpec::AbelianRank { r, max_prime: None } => format!("A<={r}"),
            FamilySpec::AbelianRank {
                r,
                max_prime: Some(m),
            } => format!("A<={r}(p<={m})"),
            FamilySpec::AbelianPExponent { p, l } => format!("A({p})[exp<={l}]"),
            FamilySpec::AbelianP { p } => format!("A({p})"),
            FamilySpec::Extensional(t) => t.name.clone().unwrap_or_else(|| "extensional".into()),
        }
    }

    pub(crate) fn shape(&self) -> Option<Shape> {
        let one = |p: u64| Some(BTreeSet::from([p]));
        let upto = |m: &Option<u64>| m.map(|m| primes_up_to(m).into_iter().collect());
        let s = match self.spec() {
            FamilySpec::ElementaryAbelian { p } => Shape {
                primes: one(*p),
                rank: None,
                exponent: Some(1),
                single_prime: false,
            },
            FamilySpec::CyclicP { p } => Shape {
                primes: one(*p),
                rank: Some(1),
                exponent: None,
                single_prime: false,
            },
            FamilySpec::CyclicPrimeOrder => Shape {
                primes: None,
                rank: Some(1),
                exponent: Some(1),
                single_prime: true,
            },
            FamilySpec::CyclicAll { max_prime } => Shape {
                primes: upto(max_prime),
                rank: Some(1),
                exponent: None,
                single_prime: false,
            },
            FamilySpec::AbelianPRank { p, r } => Shape {
                primes: one(*p),
                rank: Some(*r),
                exponent: None,
                single_prime: false,
            },
            FamilySpec::AbelianRank { r, max_prime } => Shape {
                primes: upto(max_prime),
                rank: Some(*r),
                exponent: None,
                single_prime: false,
            },
            FamilySpec::AbelianPExponent { p, l } => Shape {
                primes: one(*p),
                rank: None,
                exponent: Some(*l),
                single_prime: false,
            },
            FamilySpec::AbelianP { p } => Shape {
                primes: one(*p),
                rank: None,
                exponent: None,
                single_prime: false,
            },
            FamilySpec::Extensional(_) => return None,
        };
        Some(s)
    }

    pub fn contains(&self, x: &Member) -> Result<bool> {
        match (self.shape(), x) {
            (Some(shape), Member::Ab(g)) => Ok(shape.admits(g)),
            (Some(_), Member::Named(n)) => Err(Error::UnsupportedGroup(n.clone())),
            (None, Member::Named(n)) => Ok(self.table().unwrap().index_of(n).is_some()),
            (None, Member::Ab(g)) => Ok(self.table().unwrap().name_of_group(g).is_some()),
        }
    }

    pub fn contains_group(&self, g: &FinAbGroup) -> bool {
        self.contains(&Member::Ab(g.clone())).unwrap_or(false)
    }

    /// Maps a member to the family's preferred representation: named objects
    /// for extensional tables, canonical groups otherwise.
    pub fn resolve(&self, x: &Member) -> Result<Member> {
        if !self.contains(x)? {
            return Err(self.not_member(x));
        }
        match (self.table(), x) {
            (Some(t), Member::Ab(g)) => Ok(Member::Named(t.name_of_group(g).unwrap().to_string())),
            _ => Ok(x.clone()),
        }
    }

    pub(crate) fn not_member(&self, x: &Member) -> Error {
        Error::NotMember {
            group: x.to_string(),
            family: self.name(),
        }
    }

    /// Decides `a ≫ b` for two members.
    pub fn epi(&self, a: &Member, b: &Member) -> Result<bool> {
        match self.table() {
            Some(t) => {
                let (Member::Named(x), Member::Named(y)) = (self.resolve(a)?, self.resolve(b)?)
                else {
                    unreachable!()
                };
                Ok(t.epi(t.index_of(&x).unwrap(), t.index_of(&y).unwrap()))
            }
            None => match (a, b) {
                (Member::Ab(g), Member::Ab(h)) => Ok(epi_exists(g, h)),
                (Member::Named(n), _) | (_, Member::Named(n)) => {
                    Err(Error::UnsupportedGroup(n.clone()))
                }
            },
        }
    }

    pub fn unit(&self) -> Option<Member> {
        match self.table() {
            Some(t) => t.unit().map(|i| Member::Named(t.objects()[i].clone())),
            None => Some(Member::Ab(FinAbGroup::trivial())),
        }
    }

    /// Whether the standard filtration is essentially finite at every stage.
    pub fn has_finite_stages(&self) -> bool {
        !matches!(
            self.spec(),
            FamilySpec::ElementaryAbelian { .. }
                | FamilySpec::AbelianPExponent { .. }
                | FamilySpec::AbelianP { .. }
        )
    }

    fn require_stages(&self) -> Result<()> {
        if self.has_finite_stages() {
            Ok(())
        } else {
            Err(Error::NoEssentiallyFiniteFiltration(self.name()))
        }
    }

    /// Exponent cap `l_p = ⌊log_p n⌋` at stage `n`.
    pub fn stage_level(p: u64, n: u64) -> u32 {
        floor_log(p, n)
    }

    /// Least stage index with the same members as stage `n`.
    pub fn canonical_index(&self, n: u64) -> Result<u64> {
        self.require_stages()?;
        let n = n.max(1);
        if self.is_extensional() {
            return Ok(1);
        }
        let shape = self.shape().unwrap();
        let relevant = |q: u64| shape.primes.as_ref().is_none_or(|s| s.contains(&q));
        let cap_exp = shape.exponent;
        // The stage only changes at prime powers `q^k` where `q^k` is admissible.
        let mut best = 1u64;
        for q in primes_up_to(n).into_iter().filter(|&q| relevant(q)) {
            let l = floor_log(q, n);
            let l = cap_exp.map_or(l, |c| l.min(c));
            if l > 0 {
                best = best.max(q.pow(l));
            }
        }
        Ok(best)
    }

    /// Distinct stage indices `<= cap`, ascending, each in canonical form.
    pub fn stage_indices(&self, cap: u64) -> Result<Vec<u64>> {
        self.require_stages()?;
        let mut out = BTreeSet::new();
        for n in 1..=cap.max(1) {
            out.insert(self.canonical_index(n)?);
        }
        Ok(out.into_iter().collect())
    }

    /// Stage `n` of the standard filtration: members whose `p`-exponent is at
    /// most `p^{l_p}` at every prime.
    pub fn stage(&self, n: u64) -> Result<Arc<FiltrationStage>> {
        self.require_stages()?;
        let n = self.canonical_index(n)?;
        if let Some(s) = self.inner.stages.lock().unwrap().get(&n) {
            return Ok(s.clone());
        }
        let members = match self.table() {
            Some(t) => t.objects().iter().cloned().map(Member::Named).collect(),
            None => self.abelian_stage_members(n)?,
        };
        let stage = Arc::new(FiltrationStage { index: n, members });
        self.inner
            .stages
            .lock()
            .unwrap()
            .insert(n, stage.clone());
        Ok(stage)
    }

    /// Seeds the stage memo with a stage computed elsewhere, e.g. read from a
    /// cache. The stage must agree in size with the stage rule and list
    /// distinct members of the family at that index.
    pub fn preload_stage(&self, stage: FiltrationStage) -> Result<()> {
        self.require_stages()?;
        let n = self.canonical_index(stage.index)?;
        if n != stage.index {
            return Err(Error::InvalidSpec(format!("{} is not a canonical stage index", stage.index)));
        }
        let distinct: BTreeSet<&Member> = stage.members.iter().collect();
        if distinct.len() != stage.members.len() {
            return Err(Error::InvalidSpec("repeated stage member".into()));
        }
        for m in &stage.members {
            if !self.contains(m)? || self.reflect(n, m)? != *m {
                return Err(Error::InvalidSpec(format!("{m} does not belong to stage {n}")));
            }
        }
        let expected = match self.table() {
            Some(t) => t.len(),
            None => self.abelian_stage_count(n)?,
        };
        if expected != stage.members.len() {
            return Err(Error::InvalidSpec(format!(
                "stage {n} has {expected} members, not {}",
                stage.members.len()
            )));
        }
        self.inner.stages.lock().unwrap().insert(n, Arc::new(stage));
        Ok(())
    }

    fn abelian_stage_count(&self, n: u64) -> Result<usize> {
        let shape = self.shape().unwrap();
        let counts = primes_up_to(n)
            .into_iter()
            .filter(|q| shape.primes.as_ref().is_none_or(|s| s.contains(q)))
            .map(|q| {
                let l = floor_log(q, n).min(shape.exponent.unwrap_or(u32::MAX));
                bounded_partitions(l, shape.rank).len()
            });
        Ok(if shape.single_prime {
            1 + counts.map(|c| c - 1).sum::<usize>()
        } else {
            counts.product()
        })
    }

    fn abelian_stage_members(&self, n: u64) -> Result<Vec<Member>> {
        let shape = self.shape().unwrap();
        let primes: Vec<u64> = primes_up_to(n)
            .into_iter()
            .filter(|q| shape.primes.as_ref().is_none_or(|s| s.contains(q)))
            .collect();
        if shape.single_prime {
            let mut out = vec![Member::Ab(FinAbGroup::trivial())];
            for q in primes {
                let l = floor_log(q, n).min(shape.exponent.unwrap_or(u32::MAX));
                for lambda in bounded_partitions(l, shape.rank) {
                    if !lambda.is_empty() {
                        out.push(Member::Ab(FinAbGroup::p_group(q, &lambda)?));
                    }
                }
            }
            out.sort();
            return Ok(out);
        }
        let choices: Vec<(u64, Vec<Vec<u32>>)> = primes
            .iter()
            .map(|&q| {
                let l = floor_log(q, n).min(shape.exponent.unwrap_or(u32::MAX));
                (q, bounded_partitions(l, shape.rank))
            })
            .collect();
        let count = choices
            .iter()
            .fold(1u128, |a, (_, c)| a.saturating_mul(c.len() as u128));
        if count > STAGE_BUDGET {
            return Err(Error::CapExceeded {
                needed: count,
                cap: STAGE_BUDGET,
            });
        }
        let mut acc = vec![FinAbGroup::trivial()];
        for (q, parts) in &choices {
            let mut next = Vec::with_capacity(acc.len() * parts.len());
            for g in &acc {
                for lambda in parts {
                    let h = if lambda.is_empty() {
                        g.clone()
                    } else {
                        abgroup::product(g, &FinAbGroup::p_group(*q, lambda)?)
                    };
                    next.push(h);
                }
            }
            acc = next;
        }
        acc.sort();
        Ok(acc.into_iter().map(Member::Ab).collect())
    }

    /// The reflection `q_n`: per-prime truncation `λᵢ ↦ min(λᵢ, l_p)`.
    pub fn reflect(&self, n: u64, x: &Member) -> Result<Member> {
        self.require_stages()?;
        if !self.contains(x)? {
            return Err(self.not_member(x));
        }
        match x {
            Member::Ab(g) if !self.is_extensional() => {
                let n = n.max(1);
                Ok(Member::Ab(g.truncate_exponents(|p| floor_log(p, n))))
            }
            _ => self.resolve(x),
        }
    }

    /// Every member of order at most `order_cap`; extensional tables list all objects.
    pub fn members_up_to(&self, order_cap: u128) -> Result<Vec<Member>> {
        if let Some(t) = self.table() {
            return Ok(t.objects().iter().cloned().map(Member::Named).collect());
        }
        let shape = self.shape().unwrap();
        let bound = u64::try_from(order_cap).unwrap_or(u64::MAX);
        let primes: Vec<u64> = primes_up_to(bound.min(1 << 20))
            .into_iter()
            .filter(|q| shape.primes.as_ref().is_none_or(|s| s.contains(q)))
            .collect();
        let mut out = Vec::new();
        enumerate_groups(&primes, 0, order_cap, FinAbGroup::trivial(), &shape, &mut out);
        out.sort();
        Ok(out.into_iter().map(Member::Ab).collect())
    }

    /// Whether `self ⊆ other` and `self` is closed downwards inside `other`.
    pub fn is_downward_closed_in(&self, other: &Family) -> Result<bool> {
        match (self.shape(), other.shape()) {
            // Every abelian kind is closed under quotients, so inclusion suffices.
            (Some(a), Some(b)) => Ok(a.within(&b)),
            (None, Some(b)) => {
                let t = self.table().unwrap();
                let groups = t.require_groups()?;
                for g in groups {
                    if !b.admits(g) {
                        return Ok(false);
                    }
                    for q in abgroup::quotient_classes(g) {
                        if t.name_of_group(&q).is_none() {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            // Abelian kinds are infinite and never fit in a finite table.
            (Some(_), None) => Ok(false),
            (None, None) => {
                let t = other.table().unwrap();
                let members = self.members_up_to(u128::MAX)?;
                let mut idx = Vec::new();
                for m in &members {
                    let Member::Named(n) = other.resolve(m)? else {
                        unreachable!()
                    };
                    idx.push(t.index_of(&n).unwrap());
                }
                for &i in &idx {
                    for j in 0..t.objects().len() {
                        if t.epi(i, j) && !idx.contains(&j) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Descending partitions with parts `<= l` and at most `rank` parts (all
/// lengths when `rank` is `None`, which requires `l == 0` or a finite rank).
fn bounded_partitions(l: u32, rank: Option<usize>) -> Vec<Vec<u32>> {
    let rank = rank.expect("stage enumeration needs a rank bound");
    let mut out = Vec::new();
    fn rec(l: u32, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        if left == 0 {
            return;
        }
        for e in 1..=l {
            prefix.push(e);
            rec(e, left - 1, prefix, out);
            prefix.pop();
        }
    }
    rec(l, rank, &mut Vec::new(), &mut out);
    out
}

fn enumerate_groups(
    primes: &[u64],
    i: usize,
    budget: u128,
    acc: FinAbGroup,
    shape: &Shape,
    out: &mut Vec<FinAbGroup>,
) {
    if i == primes.len() || (primes[i] as u128) > budget {
        if shape.admits(&acc) {
            out.push(acc);
        }
        return;
    }
    let p = primes[i];
    let mut total = 0u32;
    while (p as u128).checked_pow(total).is_some_and(|o| o <= budget) {
        for lambda in abgroup::partitions(total) {
            let g = if lambda.is_empty() {
                acc.clone()
            } else {
                abgroup::product(&acc, &FinAbGroup::p_group(p, &lambda).unwrap())
            };
            if shape.single_prime && g.parts().len() > 1 {
                continue;
            }
            if !lambda.is_empty() && !shape.admits(&FinAbGroup::p_group(p, &lambda).unwrap()) {
                continue;
            }
            let rest = budget / (p as u128).pow(total);
            enumerate_groups(primes, i + 1, rest, g, shape, out);
        }
        total += 1;
    }
}
