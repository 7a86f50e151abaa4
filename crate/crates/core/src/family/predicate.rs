//! Three-valued closure checks and minimal complements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Family, FamilySpec, Member};
use crate::abgroup::{self, epi_exists, oracle_subgroup_type_counts, oracle_wide_subgroups};
use crate::abgroup::{FinAbGroup, ElementTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    Unital,
    DownwardClosed,
    WidelyClosed,
    MultiplicativeGlobal,
    RSubmultiplicative(usize),
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Unital => f.write_str("unital"),
            Predicate::DownwardClosed => f.write_str("downward_closed"),
            Predicate::WidelyClosed => f.write_str("widely_closed"),
            Predicate::MultiplicativeGlobal => f.write_str("multiplicative_global"),
            Predicate::RSubmultiplicative(r) => write!(f, "r_submultiplicative({r})"),
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;

    /// Accepts the display form, plus `r_submultiplicative:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let simple = match s {
            "unital" => Some(Predicate::Unital),
            "downward_closed" => Some(Predicate::DownwardClosed),
            "widely_closed" => Some(Predicate::WidelyClosed),
            "multiplicative_global" => Some(Predicate::MultiplicativeGlobal),
            _ => None,
        };
        if let Some(p) = simple {
            return Ok(p);
        }
        let arg = s
            .strip_prefix("r_submultiplicative")
            .map(|rest| rest.trim_matches(|c| c == '(' || c == ')' || c == ':'));
        match arg.map(str::parse::<usize>) {
            Some(Ok(r)) => Ok(Predicate::RSubmultiplicative(r)),
            _ => Err(Error::parse_at(s, 0, format!("unknown predicate '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PredicateOutcome {
    Certified { basis: String, checked: usize },
    Refuted { witness: Vec<Member>, reason: String },
    UnknownAtCap { reason: String },
}

impl PredicateOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, PredicateOutcome::Certified { .. })
    }
}

/// Closure properties that hold for a built-in kind by construction.
fn structural(f: &Family, pred: Predicate) -> Option<&'static str> {
    use FamilySpec::*;
    let spec = f.spec();
    if matches!(spec, Extensional(_)) {
        return None;
    }
    match pred {
        Predicate::Unital => Some("contains the trivial group"),
        Predicate::DownwardClosed => Some("defined by bounds preserved under quotients"),
        Predicate::WidelyClosed => Some("closed downwards, hence widely closed"),
        Predicate::MultiplicativeGlobal => match spec {
            ElementaryAbelian { .. } | AbelianPExponent { .. } | AbelianP { .. } => {
                Some("bounds preserved by subgroups, quotients and products")
            }
            _ => None,
        },
        Predicate::RSubmultiplicative(r) => match spec {
            CyclicP { .. } | CyclicAll { .. } if r == 1 => {
                Some("one-generated subgroups of products of cyclic groups are cyclic")
            }
            AbelianPRank { r: s, .. } | AbelianRank { r: s, .. } if r == *s => {
                Some("rank bounds are inherited by r-generated subgroups")
            }
            _ => None,
        },
    }
}

struct Checker<'a> {
    family: &'a Family,
    groups: Vec<FinAbGroup>,
    cap: u128,
    checked: usize,
}

impl Checker<'_> {
    fn inside(&self, g: &FinAbGroup) -> bool {
        self.family.contains_group(g)
    }

    fn label(&self, g: &FinAbGroup) -> Member {
        match self.family.table().and_then(|t| t.name_of_group(g)) {
            Some(n) => Member::Named(n.to_string()),
            None => Member::Ab(g.clone()),
        }
    }

    fn refute(&self, gs: &[&FinAbGroup], reason: String) -> PredicateOutcome {
        PredicateOutcome::Refuted {
            witness: gs.iter().map(|g| self.label(g)).collect(),
            reason,
        }
    }

    fn unital(&mut self) -> Option<PredicateOutcome> {
        self.checked += 1;
        let one = FinAbGroup::trivial();
        (!self.inside(&one)).then(|| self.refute(&[&one], "trivial group missing".into()))
    }

    fn downward(&mut self) -> Option<PredicateOutcome> {
        for g in &self.groups {
            for q in abgroup::quotient_classes(g) {
                self.checked += 1;
                if !self.inside(&q) {
                    return Some(self.refute(&[g, &q], format!("quotient {q} of {g} missing")));
                }
            }
        }
        None
    }

    fn widely(&mut self) -> Result<Option<PredicateOutcome>> {
        for h in &self.groups {
            for a in &self.groups {
                for b in &self.groups {
                    if a > b || !epi_exists(h, a) || !epi_exists(h, b) {
                        continue;
                    }
                    if a.order().saturating_mul(b.order()) > self.cap {
                        continue;
                    }
                    for l in oracle_wide_subgroups(a, b, self.cap)? {
                        self.checked += 1;
                        if epi_exists(h, &l) && !self.inside(&l) {
                            return Ok(Some(self.refute(
                                &[a, b, &l],
                                format!("wide subgroup {l} of {a} x {b} missing"),
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// Subgroups `L ≤ G₀ × G₁` passing `keep` must lie in the family.
    fn sub_of_products(
        &mut self,
        keep: impl Fn(&FinAbGroup) -> bool,
    ) -> Result<Option<PredicateOutcome>> {
        for (i, a) in self.groups.iter().enumerate() {
            for b in &self.groups[i..] {
                let prod = abgroup::product(a, b);
                if prod.order() > self.cap {
                    continue;
                }
                for l in oracle_subgroup_type_counts(&prod, self.cap)?.into_keys() {
                    if !keep(&l) {
                        continue;
                    }
                    self.checked += 1;
                    if !self.inside(&l) {
                        return Ok(Some(self.refute(
                            &[a, b, &l],
                            format!("subgroup {l} of {a} x {b} missing"),
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    fn rsub(&mut self, r: usize) -> Result<Option<PredicateOutcome>> {
        for g in &self.groups {
            self.checked += 1;
            if g.rank() > r {
                return Ok(Some(self.refute(&[g], format!("{g} needs more than {r} generators"))));
            }
        }
        if let Some(o) = self.unital() {
            return Ok(Some(o));
        }
        self.sub_of_products(|l| l.rank() <= r)
    }

    fn multiplicative_global(&mut self) -> Result<Option<PredicateOutcome>> {
        if let Some(o) = self.downward() {
            return Ok(Some(o));
        }
        for g in &self.groups {
            let t = ElementTable::new(g, self.cap)?;
            for s in t.subgroups() {
                self.checked += 1;
                let h = t.isomorphism_type(&s);
                if !self.inside(&h) {
                    return Ok(Some(self.refute(&[g, &h], format!("subgroup {h} of {g} missing"))));
                }
            }
        }
        self.sub_of_products(|_| true)
    }
}

/// Bounded verification of a closure property.
///
/// Abelian kinds are checked on every member of order at most `order_cap`
/// using the element-level oracle. Extensional tables are checked from their
/// metadata; without it the answer is `UnknownAtCap`.
pub fn check_predicate(f: &Family, pred: Predicate, order_cap: u128) -> Result<PredicateOutcome> {
    let groups: Vec<FinAbGroup> = match f.table() {
        None => f
            .members_up_to(order_cap)?
            .into_iter()
            .filter_map(|m| m.group().cloned())
            .collect(),
        Some(t) => match t.require_groups() {
            Ok(gs) => gs.to_vec(),
            Err(_) => return Ok(check_table_without_groups(f, pred)),
        },
    };
    let mut c = Checker {
        family: f,
        groups,
        cap: order_cap,
        checked: 0,
    };
    let found = match pred {
        Predicate::Unital => c.unital(),
        Predicate::DownwardClosed => c.downward(),
        Predicate::WidelyClosed => c.widely()?,
        Predicate::MultiplicativeGlobal => c.multiplicative_global()?,
        Predicate::RSubmultiplicative(r) => c.rsub(r)?,
    };
    if let Some(o) = found {
        return Ok(o);
    }
    let why = structural(f, pred);
    let finite = f.is_extensional();
    Ok(match (why, finite) {
        (_, true) => PredicateOutcome::Certified {
            basis: "exhaustive check of the table".into(),
            checked: c.checked,
        },
        (Some(reason), false) => PredicateOutcome::Certified {
            basis: format!("{reason}; no counterexample up to order {order_cap}"),
            checked: c.checked,
        },
        (None, false) => PredicateOutcome::UnknownAtCap {
            reason: format!("no counterexample up to order {order_cap}"),
        },
    })
}

fn check_table_without_groups(f: &Family, pred: Predicate) -> PredicateOutcome {
    let t = f.table().unwrap();
    let unknown = |what: &str| PredicateOutcome::UnknownAtCap {
        reason: format!("table lacks {what} metadata"),
    };
    let downward = || -> Option<PredicateOutcome> {
        let mut checked = 0;
        for i in 0..t.len() {
            let qs = t.quotients_of(i)?;
            for q in qs {
                checked += 1;
                if t.index_of(&q).is_none() {
                    return Some(PredicateOutcome::Refuted {
                        witness: vec![
                            Member::Named(t.objects()[i].clone()),
                            Member::Named(q.clone()),
                        ],
                        reason: format!("quotient {q} of {} missing", t.objects()[i]),
                    });
                }
            }
        }
        Some(PredicateOutcome::Certified {
            basis: "every listed quotient is an object".into(),
            checked,
        })
    };
    match pred {
        Predicate::Unital => match t.unit() {
            Some(_) => PredicateOutcome::Certified {
                basis: "object 1 present".into(),
                checked: 1,
            },
            None => PredicateOutcome::UnknownAtCap {
                reason: "no object is identified as trivial".into(),
            },
        },
        Predicate::DownwardClosed => downward().unwrap_or_else(|| unknown("quotients")),
        Predicate::WidelyClosed => {
            if t.is_groupoid() {
                PredicateOutcome::Certified {
                    basis: "only identity epimorphisms, so every wide image is a graph".into(),
                    checked: t.len(),
                }
            } else {
                match downward() {
                    Some(PredicateOutcome::Certified { checked, .. }) => {
                        PredicateOutcome::Certified {
                            basis: "closed downwards, hence widely closed".into(),
                            checked,
                        }
                    }
                    _ => unknown("wide subgroup"),
                }
            }
        }
        Predicate::MultiplicativeGlobal | Predicate::RSubmultiplicative(_) => unknown("groups"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MinimalComplement {
    /// The complete list of `≫`-minimal members not dominated by `G`.
    Complete { minimal: Vec<Member> },
    /// Infinitely many minimal elements; `sample` lists those of order at most the cap.
    Unbounded { sample: Vec<Member> },
}

/// `≫`-minimal members of `{H ∈ F : not G ≫ H}`.
pub fn minimal_complement(f: &Family, g: &Member, cap: u128) -> Result<MinimalComplement> {
    if !f.contains(g)? {
        return Err(f.not_member(g));
    }
    if let Some(t) = f.table() {
        let gi = t.index_of(&f.resolve(g)?.to_string()).unwrap();
        let outside: Vec<usize> = (0..t.len()).filter(|&h| !t.epi(gi, h)).collect();
        let minimal = outside
            .iter()
            .filter(|&&h| !outside.iter().any(|&k| k != h && t.epi(h, k)))
            .map(|&h| Member::Named(t.objects()[h].clone()))
            .collect();
        return Ok(MinimalComplement::Complete { minimal });
    }
    let Member::Ab(g) = g else { unreachable!() };
    let minimal_of = |cands: Vec<FinAbGroup>| -> Vec<Member> {
        let outside: Vec<FinAbGroup> = cands
            .into_iter()
            .filter(|h| f.contains_group(h) && !epi_exists(g, h))
            .collect();
        let mut out: Vec<FinAbGroup> = outside
            .iter()
            .filter(|h| !outside.iter().any(|k| k != *h && epi_exists(h, k)))
            .cloned()
            .collect();
        out.sort();
        out.into_iter().map(Member::Ab).collect()
    };
    match f.prime() {
        Some(p) => {
            // A minimal μ has μᵢ <= λ₁ + 1 and length <= len(λ) + 1: lowering an
            // entry above that bound, or dropping a part beyond it, keeps μ outside.
            let lambda = g.partition(p);
            let top = lambda.first().copied().unwrap_or(0) + 1;
            let len = lambda.len() + 1;
            let mut cands = Vec::new();
            for total in 0..=(top as usize * len) as u32 {
                for mu in abgroup::partitions(total) {
                    if mu.len() <= len && mu.iter().all(|&e| e <= top) {
                        cands.push(FinAbGroup::p_group(p, &mu)?);
                    }
                }
            }
            Ok(MinimalComplement::Complete {
                minimal: minimal_of(cands),
            })
        }
        None => {
            // Families over infinitely many primes contain `C_q` for every prime
            // `q` not dividing `|G|`, and each such `C_q` is minimal outside.
            let sample = minimal_of(
                f.members_up_to(cap)?
                    .into_iter()
                    .filter_map(|m| m.group().cloned())
                    .collect(),
            );
            match f.spec() {
                FamilySpec::CyclicAll { max_prime: Some(_) }
                | FamilySpec::AbelianRank {
                    max_prime: Some(_), ..
                } => Err(Error::Unsupported(
                    "minimal complements for prime-truncated families".into(),
                )),
                _ => Ok(MinimalComplement::Unbounded { sample }),
            }
        }
    }
}
