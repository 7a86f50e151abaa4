//! The profinite point space of a family and its clopen topology.
//!
//! Points are stabilizing threads (ordinary members), symbolic per-prime
//! monotone vectors over `ℕ ∪ {∞}`, or caller-supplied threads.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abgroup::{floor_log, is_prime, FinAbGroup};
use crate::error::{Error, Result};
use crate::family::{Family, Member};

mod clopen;
mod points;
mod space;

pub use clopen::{ClopenSet, Decision, OpenSet};
pub use points::{
    embed_spectrum, fiber_is_singleton, is_isolated, limit_points, point_space, PointSpace,
};
pub use space::{cb_rank, space_description, CbRank, SpaceDesc};

/// A coordinate in `ℕ ∪ {∞}`. Serialized as an integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Fin(u32),
    Inf,
}

impl Serialize for Coord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coord::Fin(e) => s.serialize_u32(*e),
            Coord::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(e) => Ok(Coord::Fin(e)),
            Raw::S(s) if s == "inf" || s == "∞" => Ok(Coord::Inf),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad coordinate {s}"))),
        }
    }
}

impl Coord {
    pub fn min_with(self, l: u32) -> u32 {
        match self {
            Coord::Fin(e) => e.min(l),
            Coord::Inf => l,
        }
    }

    pub fn is_inf(self) -> bool {
        self == Coord::Inf
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Fin(e) => write!(f, "{e}"),
            Coord::Inf => f.write_str("inf"),
        }
    }
}

/// Per-prime weakly decreasing vectors over `ℕ ∪ {∞}` with at least one `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbolic {
    parts: BTreeMap<u64, Vec<Coord>>,
}

impl Symbolic {
    pub fn parts(&self) -> &BTreeMap<u64, Vec<Coord>> {
        &self.parts
    }

    pub fn vector(&self, p: u64) -> &[Coord] {
        self.parts.get(&p).map_or(&[], Vec::as_slice)
    }

    /// Image at exponent levels `l_p`.
    pub fn truncate_levels(&self, level: impl Fn(u64) -> u32) -> FinAbGroup {
        let parts = self.parts.iter().map(|(&p, v)| {
            let l = level(p);
            (p, v.iter().map(|c| c.min_with(l)).filter(|&e| e > 0).collect())
        });
        FinAbGroup::from_parts(parts).expect("valid truncation")
    }

    pub fn label(&self, ascii: bool) -> String {
        let z = if ascii { "Z_" } else { "ℤ_" };
        let mut out = Vec::new();
        for (p, v) in &self.parts {
            for c in v {
                out.push(match c {
                    Coord::Inf => format!("{z}{p}"),
                    Coord::Fin(e) => format!("C{}", p.pow(*e)),
                });
            }
        }
        out.join("x")
    }
}

impl Ord for Symbolic {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |s: &Self| {
            s.parts
                .iter()
                .map(|(p, v)| (*p, v.clone()))
                .collect::<Vec<_>>()
        };
        let infs = |s: &Self| s.parts.values().flatten().filter(|c| c.is_inf()).count();
        infs(self)
            .cmp(&infs(other))
            .then_with(|| key(self).cmp(&key(other)))
    }
}

impl PartialOrd for Symbolic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Rule = Arc<dyn Fn(u64) -> Member + Send + Sync>;

/// A point given by its stage values `n ↦ x_n`, trusted up to `cap`.
#[derive(Clone)]
pub struct Thread {
    pub name: String,
    pub cap: u64,
    rule: Rule,
}

impl Thread {
    pub fn new(name: impl Into<String>, cap: u64, rule: impl Fn(u64) -> Member + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            cap,
            rule: Arc::new(rule),
        }
    }

    pub fn at(&self, n: u64) -> Member {
        (self.rule)(n)
    }

    /// Checks `q_n(x_m) = x_n` for all stage indices `n <= m <= cap`.
    pub fn check_compatible(&self, f: &Family) -> Result<()> {
        let idx = f.stage_indices(self.cap)?;
        for (j, &m) in idx.iter().enumerate() {
            let xm = self.at(m);
            if f.stage(m)?.position(&f.resolve(&xm)?).is_none() {
                return Err(Error::InvalidSpec(format!(
                    "thread {} leaves stage {m} at {xm}",
                    self.name
                )));
            }
            for &n in &idx[..=j] {
                if f.reflect(n, &xm)? != f.resolve(&self.at(n))? {
                    return Err(Error::InvalidSpec(format!(
                        "thread {} is incompatible between stages {n} and {m}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Thread")
            .field("name", &self.name)
            .field("cap", &self.cap)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Thread {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.cap == other.cap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfinitePoint {
    Stabilizing(Member),
    Symbolic(Symbolic),
    Thread(Thread),
}

impl ProfinitePoint {
    pub fn group(g: FinAbGroup) -> Self {
        ProfinitePoint::Stabilizing(Member::Ab(g))
    }

    /// Normalising constructor: sorts each vector, strips zeros, and returns a
    /// stabilizing point when no coordinate is infinite.
    pub fn symbolic(parts: impl IntoIterator<Item = (u64, Vec<Coord>)>) -> Result<Self> {
        let mut map: BTreeMap<u64, Vec<Coord>> = BTreeMap::new();
        for (p, v) in parts {
            if !is_prime(p) {
                return Err(Error::InvalidSpec(format!("{p} is not prime")));
            }
            map.entry(p).or_default().extend(v);
        }
        map.retain(|_, v| {
            v.retain(|c| *c != Coord::Fin(0));
            v.sort_unstable_by(|a, b| b.cmp(a));
            !v.is_empty()
        });
        if map.values().flatten().any(|c| c.is_inf()) {
            return Ok(ProfinitePoint::Symbolic(Symbolic { parts: map }));
        }
        let finite = map.into_iter().map(|(p, v)| {
            let e = v
                .into_iter()
                .map(|c| match c {
                    Coord::Fin(e) => e,
                    Coord::Inf => unreachable!(),
                })
                .collect();
            (p, e)
        });
        Ok(ProfinitePoint::group(FinAbGroup::from_parts(finite)?))
    }

    /// Single-prime convenience: `vector(p, [∞, 1])` is `ℤ_p × ℤ/p`.
    pub fn vector(p: u64, coords: &[Coord]) -> Result<Self> {
        Self::symbolic([(p, coords.to_vec())])
    }

    /// Coordinates at `p`, padded with zeros to length `len`.
    pub fn coords(&self, p: u64, len: usize) -> Option<Vec<Coord>> {
        let mut v: Vec<Coord> = match self {
            ProfinitePoint::Stabilizing(Member::Ab(g)) => {
                g.partition(p).iter().map(|&e| Coord::Fin(e)).collect()
            }
            ProfinitePoint::Symbolic(s) => s.vector(p).to_vec(),
            _ => return None,
        };
        v.resize(len.max(v.len()), Coord::Fin(0));
        Some(v)
    }

    pub fn label(&self, ascii: bool) -> String {
        match self {
            ProfinitePoint::Stabilizing(m) => m.label(),
            ProfinitePoint::Symbolic(s) => s.label(ascii),
            ProfinitePoint::Thread(t) => t.name.clone(),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, ProfinitePoint::Symbolic(_))
    }

    /// Parses a member literal, or a symbolic literal such as `2:[inf,1]`.
    pub fn parse(s: &str) -> Result<Self> {
        if !s.contains("inf") && !s.contains('∞') {
            if let Ok(g) = s.parse::<FinAbGroup>() {
                return Ok(Self::group(g));
            }
            if s.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Ok(ProfinitePoint::Stabilizing(Member::Named(s.to_string())));
            }
        }
        let mut parts = Vec::new();
        for chunk in s.split(';') {
            let (p, rest) = chunk
                .split_once(':')
                .ok_or_else(|| Error::parse_at(s, 0, "expected p:[...]"))?;
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::parse_at(s, 0, "expected a prime"))?;
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::parse_at(s, 0, "expected [...]"))?;
            let mut coords = Vec::new();
            for c in inner.split(',') {
                let c = c.trim();
                coords.push(match c {
                    "inf" | "∞" => Coord::Inf,
                    _ => Coord::Fin(
                        c.parse()
                            .map_err(|_| Error::parse_at(s, 0, format!("bad coordinate '{c}'")))?,
                    ),
                });
            }
            parts.push((p, coords));
        }
        Self::symbolic(parts)
    }
}

impl fmt::Display for ProfinitePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfinitePoint::Stabilizing(m) => write!(f, "{m}"),
            ProfinitePoint::Symbolic(s) => {
                let parts: Vec<String> = s
                    .parts
                    .iter()
                    .map(|(p, v)| {
                        let c: Vec<String> = v.iter().map(Coord::to_string).collect();
                        format!("{p}:[{}]", c.join(","))
                    })
                    .collect();
                f.write_str(&parts.join(";"))
            }
            ProfinitePoint::Thread(t) => f.write_str(&t.name),
        }
    }
}

/// Whether `x` is a point of the profinite extension of `f`.
pub fn validate_point(f: &Family, x: &ProfinitePoint) -> Result<()> {
    match x {
        ProfinitePoint::Stabilizing(m) => {
            if f.contains(m)? {
                Ok(())
            } else {
                Err(f.not_member(m))
            }
        }
        ProfinitePoint::Symbolic(s) => {
            let shape = f
                .shape()
                .ok_or_else(|| Error::Unsupported("symbolic points in a finite table".into()))?;
            let bad = |why: &str| Error::InvalidSpec(format!("{x} is not a point of {}: {why}", f.name()));
            if shape.single_prime && s.parts.len() > 1 {
                return Err(bad("more than one prime"));
            }
            for (p, v) in &s.parts {
                if shape.primes.as_ref().is_some_and(|ps| !ps.contains(p)) {
                    return Err(bad("prime not allowed"));
                }
                if shape.rank.is_some_and(|r| v.len() > r) {
                    return Err(bad("rank too large"));
                }
                if let Some(l) = shape.exponent {
                    if v[0] > Coord::Fin(l) {
                        return Err(bad("exponent bound exceeded"));
                    }
                }
            }
            Ok(())
        }
        ProfinitePoint::Thread(t) => t.check_compatible(f),
    }
}

/// The image of `x` in stage `n`.
pub fn truncate(f: &Family, x: &ProfinitePoint, n: u64) -> Result<Member> {
    match x {
        ProfinitePoint::Stabilizing(m) => f.reflect(n, m),
        ProfinitePoint::Symbolic(s) => {
            let n = n.max(1);
            let g = s.truncate_levels(|p| floor_log(p, n));
            f.resolve(&Member::Ab(g))
        }
        ProfinitePoint::Thread(t) => f.resolve(&t.at(f.canonical_index(n)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(j: &str) -> Family {
        Family::from_json(j).unwrap()
    }

    #[test]
    fn symbolic_normalisation() {
        let x = ProfinitePoint::vector(2, &[Coord::Fin(1), Coord::Inf, Coord::Fin(0)]).unwrap();
        assert_eq!(x.to_string(), "2:[inf,1]");
        assert_eq!(x.label(true), "Z_2xC2");
        let y = ProfinitePoint::vector(3, &[Coord::Fin(2)]).unwrap();
        assert_eq!(y, ProfinitePoint::group("3:[2]".parse().unwrap()));
        assert_eq!(ProfinitePoint::parse("2:[inf,1]").unwrap(), x);
        assert_eq!(ProfinitePoint::parse("2:[2]").unwrap(), ProfinitePoint::group("2:[2]".parse().unwrap()));
    }

    #[test]
    fn truncation() {
        let f = fam(r#"{"kind":"abelian_p_rank","p":2,"r":2}"#);
        let x = ProfinitePoint::vector(2, &[Coord::Inf, Coord::Fin(1)]).unwrap();
        assert_eq!(truncate(&f, &x, 8).unwrap(), Member::Ab("2:[3,1]".parse().unwrap()));
        let y = ProfinitePoint::vector(2, &[Coord::Inf, Coord::Inf]).unwrap();
        assert_eq!(truncate(&f, &y, 2).unwrap(), Member::Ab("2:[1,1]".parse().unwrap()));
        let z = ProfinitePoint::group("2:[2]".parse().unwrap());
        assert_eq!(truncate(&f, &z, 32).unwrap(), Member::Ab("2:[2]".parse().unwrap()));
    }

    #[test]
    fn point_validation() {
        let c = fam(r#"{"kind":"cyclic_p","p":3}"#);
        assert!(validate_point(&c, &ProfinitePoint::vector(3, &[Coord::Inf]).unwrap()).is_ok());
        assert!(validate_point(&c, &ProfinitePoint::vector(3, &[Coord::Inf, Coord::Inf]).unwrap()).is_err());
        assert!(validate_point(&c, &ProfinitePoint::vector(2, &[Coord::Inf]).unwrap()).is_err());
        let t = Thread::new("Z_3", 27, |n| {
            Member::Ab(FinAbGroup::p_group(3, &[floor_log(3, n)]).unwrap())
        });
        assert!(validate_point(&c, &ProfinitePoint::Thread(t)).is_ok());
        let bad = Thread::new("bad", 27, |n| {
            Member::Ab(FinAbGroup::p_group(3, &[if n >= 9 { 2 } else { 0 }]).unwrap())
        });
        assert!(validate_point(&c, &ProfinitePoint::Thread(bad)).is_err());
    }

    #[test]
    fn coord_json() {
        let v = vec![Coord::Inf, Coord::Fin(2)];
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, r#"["inf",2]"#);
        assert_eq!(serde_json::from_str::<Vec<Coord>>(&j).unwrap(), v);
    }
}
