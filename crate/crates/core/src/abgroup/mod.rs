//! Finite abelian groups in primary canonical form and the epimorphism preorder.
//!
//! A group is stored as a map `p -> λ` where `λ` is the descending partition of
//! the `p`-primary part `⊕ᵢ ℤ/p^{λᵢ}`. The trivial group is the empty map.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod oracle;
pub mod snf;

pub use oracle::{
    oracle_epi_exists, oracle_hom_counts, oracle_quotient_classes, oracle_subgroup_type_counts,
    oracle_wide_subgroups, ElementTable, HomCounts, Subgroup,
};
pub use snf::{smith_normal_form, smith_normal_form_i64};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Vec<u32>>", into = "BTreeMap<u64, Vec<u32>>")]
pub struct FinAbGroup {
    parts: BTreeMap<u64, Vec<u32>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation as ascending `(p, multiplicity)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Largest `l` with `p^l <= n`; zero when `p > n`.
pub fn floor_log(p: u64, n: u64) -> u32 {
    let mut l = 0;
    let mut acc = p as u128;
    while acc <= n as u128 {
        l += 1;
        acc *= p as u128;
    }
    l
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&q| is_prime(q)).collect()
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Builds the canonical form of `⊕ ℤ/nᵢ`.
    pub fn canonicalize(orders: &[i64]) -> Result<Self> {
        let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in orders {
            if n < 1 {
                return Err(Error::InvalidSpec(format!("cyclic order {n} must be at least 1")));
            }
            for (p, k) in factorize(n as u64) {
                parts.entry(p).or_default().push(k);
            }
        }
        Ok(Self::normalized(parts))
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::canonicalize(&[n as i64])
    }

    /// The `p`-group `⊕ ℤ/p^{λᵢ}`; zero entries are dropped.
    pub fn p_group(p: u64, partition: &[u32]) -> Result<Self> {
        let parts: Vec<u32> = partition.iter().copied().filter(|&e| e > 0).collect();
        Self::from_parts([(p, parts)])
    }

    pub fn elementary(p: u64, rank: usize) -> Result<Self> {
        Self::p_group(p, &vec![1; rank])
    }

    /// Validating constructor from raw per-prime exponent lists.
    ///
    /// Exponents may be unsorted; zero exponents are rejected so that
    /// malformed literals do not silently change meaning.
    pub fn from_parts(parts: impl IntoIterator<Item = (u64, Vec<u32>)>) -> Result<Self> {
        let mut merged: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (p, exps) in parts {
            if !is_prime(p) {
                return Err(Error::InvalidSpec(format!("{p} is not prime")));
            }
            if exps.contains(&0) {
                return Err(Error::InvalidSpec(format!(
                    "exponents for prime {p} must be positive"
                )));
            }
            merged.entry(p).or_default().extend(exps);
        }
        Ok(Self::normalized(merged))
    }

    fn normalized(mut parts: BTreeMap<u64, Vec<u32>>) -> Self {
        parts.retain(|_, v| {
            v.retain(|&e| e > 0);
            v.sort_unstable_by(|a, b| b.cmp(a));
            !v.is_empty()
        });
        Self { parts }
    }

    pub fn parts(&self) -> &BTreeMap<u64, Vec<u32>> {
        &self.parts
    }

    /// The partition at `p`, empty if `p` does not divide the order.
    pub fn partition(&self, p: u64) -> &[u32] {
        self.parts.get(&p).map_or(&[], |v| v.as_slice())
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.parts.keys().copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    /// True when every element has `p`-power order. The trivial group qualifies.
    pub fn is_p_group(&self, p: u64) -> bool {
        self.parts.keys().all(|&q| q == p)
    }

    pub fn single_prime(&self) -> Option<u64> {
        if self.parts.len() == 1 {
            self.parts.keys().next().copied()
        } else {
            None
        }
    }

    pub fn p_rank(&self, p: u64) -> usize {
        self.partition(p).len()
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.parts.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_cyclic(&self) -> bool {
        self.rank() <= 1
    }

    /// Group order, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.parts.iter().fold(1u128, |acc, (&p, v)| {
            v.iter()
                .fold(acc, |a, &e| a.saturating_mul((p as u128).saturating_pow(e)))
        })
    }

    pub fn order_big(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (&p, v) in &self.parts {
            for &e in v {
                acc *= BigUint::from(p).pow(e);
            }
        }
        acc
    }

    pub fn exponent(&self) -> u128 {
        self.parts.iter().fold(1u128, |acc, (&p, v)| {
            acc.saturating_mul((p as u128).saturating_pow(v[0]))
        })
    }

    /// Cyclic factor orders `p^{λᵢ}`, grouped by ascending prime.
    pub fn cyclic_factors(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for (&p, v) in &self.parts {
            for &e in v {
                out.push((p, p.pow(e)));
            }
        }
        out
    }

    /// Invariant factors `d₁ | d₂ | …`, all greater than one.
    pub fn invariant_factors(&self) -> Vec<u128> {
        let len = self.rank();
        let mut out = vec![1u128; len];
        for (&p, v) in &self.parts {
            for (i, &e) in v.iter().enumerate() {
                out[len - 1 - i] *= (p as u128).pow(e);
            }
        }
        out
    }

    /// Applies `λᵢ ↦ min(λᵢ, cap(p))` at every prime.
    pub fn truncate_exponents(&self, cap: impl Fn(u64) -> u32) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|(&p, v)| {
                let l = cap(p);
                (p, v.iter().map(|&e| e.min(l)).collect())
            })
            .collect();
        Self::normalized(parts)
    }

    pub fn dominates(&self, other: &Self) -> bool {
        epi_exists(self, other)
    }

    /// Compact label such as `C4xC2xC3`, or `1` for the trivial group.
    pub fn short_name(&self) -> String {
        if self.is_trivial() {
            return "1".into();
        }
        self.cyclic_factors()
            .iter()
            .map(|(_, n)| format!("C{n}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Human-readable direct sum, e.g. `ℤ/4⊕ℤ/2` or `Z/4 + Z/2`.
    pub fn pretty(&self, ascii: bool) -> String {
        if self.is_trivial() {
            return "1".into();
        }
        let (z, sep) = if ascii { ("Z", " + ") } else { ("ℤ", "⊕") };
        self.cyclic_factors()
            .iter()
            .map(|(_, n)| format!("{z}/{n}"))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl Ord for FinAbGroup {
    /// Order first, then number of cyclic factors, then partitions by ascending prime.
    fn cmp(&self, other: &Self) -> Ordering {
        let factors = |g: &Self| g.parts.values().map(Vec::len).sum::<usize>();
        self.order()
            .cmp(&other.order())
            .then_with(|| factors(self).cmp(&factors(other)))
            .then_with(|| self.parts.iter().cmp(other.parts.iter()))
    }
}

impl PartialOrd for FinAbGroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<BTreeMap<u64, Vec<u32>>> for FinAbGroup {
    type Error = Error;
    fn try_from(parts: BTreeMap<u64, Vec<u32>>) -> Result<Self> {
        let g = Self::from_parts(parts.clone())?;
        if g.parts != parts {
            return Err(Error::InvalidSpec(
                "partitions must be nonempty and sorted descending".into(),
            ));
        }
        Ok(g)
    }
}

// String keys keep deserialization working inside buffered (tagged) content.
impl TryFrom<BTreeMap<String, Vec<u32>>> for FinAbGroup {
    type Error = Error;
    fn try_from(raw: BTreeMap<String, Vec<u32>>) -> Result<Self> {
        let mut parts = BTreeMap::new();
        for (k, v) in raw {
            let p: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("`{k}` is not a prime")))?;
            if parts.insert(p, v).is_some() {
                return Err(Error::InvalidSpec(format!("prime {p} listed twice")));
            }
        }
        Self::try_from(parts)
    }
}

impl From<FinAbGroup> for BTreeMap<u64, Vec<u32>> {
    fn from(g: FinAbGroup) -> Self {
        g.parts
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("1");
        }
        let mut first = true;
        for (p, v) in &self.parts {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            let exps: Vec<String> = v.iter().map(u32::to_string).collect();
            write!(f, "{p}:[{}]", exps.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for FinAbGroup {
    type Err = Error;

    /// Parses `1` or `p:[e,…];q:[…]`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        parse_group_literal(s, 0, s)
    }
}

/// Parses a group literal embedded at byte `base` of `full` so that errors
/// report positions in the enclosing input.
pub(crate) fn parse_group_literal(s: &str, base: usize, full: &str) -> Result<FinAbGroup> {
    let err = |off: usize, msg: &str| Error::parse_at(full, base + off, msg);
    let trimmed = s.trim();
    if trimmed == "1" || trimmed == "{}" {
        return Ok(FinAbGroup::trivial());
    }
    if trimmed.is_empty() {
        return Err(err(0, "empty group literal"));
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let number = |i: &mut usize| -> Option<u64> {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        s[start..*i].parse().ok()
    };
    let mut parts = Vec::new();
    loop {
        skip_ws(&mut i);
        let at = i;
        let p = number(&mut i).ok_or_else(|| err(at, "expected a prime"))?;
        if !is_prime(p) {
            return Err(err(at, &format!("{p} is not prime")));
        }
        skip_ws(&mut i);
        if bytes.get(i) != Some(&b':') {
            return Err(err(i, "expected ':'"));
        }
        i += 1;
        skip_ws(&mut i);
        if bytes.get(i) != Some(&b'[') {
            return Err(err(i, "expected '['"));
        }
        i += 1;
        let mut exps = Vec::new();
        loop {
            skip_ws(&mut i);
            let at = i;
            let e = number(&mut i).ok_or_else(|| err(at, "expected an exponent"))?;
            if e == 0 || e > u32::MAX as u64 {
                return Err(err(at, "exponents must be positive"));
            }
            exps.push(e as u32);
            skip_ws(&mut i);
            match bytes.get(i) {
                Some(b',') => i += 1,
                Some(b']') => {
                    i += 1;
                    break;
                }
                _ => return Err(err(i, "expected ',' or ']'")),
            }
        }
        parts.push((p, exps));
        skip_ws(&mut i);
        match bytes.get(i) {
            None => break,
            Some(b';') => i += 1,
            Some(_) => return Err(err(i, "expected ';' or end of literal")),
        }
    }
    FinAbGroup::from_parts(parts)
}

/// Decides `G ≫ H`: a surjection exists iff at every prime the padded
/// partition of `H` is dominated coordinatewise by that of `G`.
pub fn epi_exists(g: &FinAbGroup, h: &FinAbGroup) -> bool {
    h.parts.iter().all(|(p, mu)| {
        let lambda = g.partition(*p);
        mu.len() <= lambda.len() && mu.iter().zip(lambda).all(|(m, l)| m <= l)
    })
}

pub fn product(g: &FinAbGroup, h: &FinAbGroup) -> FinAbGroup {
    let mut parts = g.parts.clone();
    for (&p, v) in &h.parts {
        parts.entry(p).or_default().extend(v.iter().copied());
    }
    FinAbGroup::normalized(parts)
}

/// Descending partitions `μ` with `μᵢ <= λᵢ`, including the empty one.
pub fn dominated_partitions(lambda: &[u32]) -> Vec<Vec<u32>> {
    fn rec(lambda: &[u32], prefix: &mut Vec<u32>, bound: u32, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        let i = prefix.len();
        if i == lambda.len() {
            return;
        }
        for e in 1..=bound.min(lambda[i]) {
            prefix.push(e);
            rec(lambda, prefix, e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(lambda, &mut Vec::new(), u32::MAX, &mut out);
    out
}

/// All `H` with `G ≫ H`, sorted by the canonical group order.
pub fn quotient_classes(g: &FinAbGroup) -> Vec<FinAbGroup> {
    let mut acc = vec![BTreeMap::new()];
    for (&p, lambda) in &g.parts {
        let choices = dominated_partitions(lambda);
        let mut next = Vec::with_capacity(acc.len() * choices.len());
        for base in &acc {
            for mu in &choices {
                let mut m: BTreeMap<u64, Vec<u32>> = base.clone();
                if !mu.is_empty() {
                    m.insert(p, mu.clone());
                }
                next.push(m);
            }
        }
        acc = next;
    }
    let mut out: Vec<FinAbGroup> = acc.into_iter().map(|parts| FinAbGroup { parts }).collect();
    out.sort();
    out
}

/// Integer partitions of `n` in descending form.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, bound: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for e in (1..=bound.min(rest)).rev() {
            prefix.push(e);
            rec(rest - e, e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every abelian `p`-group of order at most `max_order`, in canonical order.
pub fn p_groups_up_to(p: u64, max_order: u128) -> Vec<FinAbGroup> {
    let mut out = Vec::new();
    let mut n = 0u32;
    while (p as u128).checked_pow(n).is_some_and(|o| o <= max_order) {
        for lambda in partitions(n) {
            out.push(FinAbGroup::p_group(p, &lambda).expect("valid partition"));
        }
        n += 1;
    }
    out.sort();
    out
}

pub fn conjugate(lambda: &[u32]) -> Vec<u32> {
    let top = lambda.first().copied().unwrap_or(0);
    (1..=top)
        .map(|k| lambda.iter().filter(|&&e| e >= k).count() as u32)
        .collect()
}

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow(n - i) - 1u32;
        den *= q.pow(i + 1) - 1u32;
    }
    num / den
}

/// Number of subgroups of type `ν` in the abelian `p`-group of type `λ`.
fn p_subgroup_count(p: u64, lambda: &[u32], nu: &[u32]) -> BigUint {
    if nu.len() > lambda.len() || nu.iter().zip(lambda).any(|(n, l)| n > l) {
        return BigUint::zero();
    }
    let lc = conjugate(lambda);
    let nc = conjugate(nu);
    let at = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
    let pb = BigUint::from(p);
    let mut acc = BigUint::one();
    for i in 0..lc.len() {
        let (a, b, c) = (lc[i], at(&nc, i), at(&nc, i + 1));
        acc *= pb.pow(c * (a - b));
        acc *= gaussian_binomial(a - c, b - c, p);
    }
    acc
}

/// Number of subgroups of `G` isomorphic to `H`.
pub fn subgroup_count(g: &FinAbGroup, h: &FinAbGroup) -> BigUint {
    if h.primes().any(|p| !g.parts.contains_key(&p)) {
        return BigUint::zero();
    }
    g.parts
        .iter()
        .map(|(&p, lambda)| p_subgroup_count(p, lambda, h.partition(p)))
        .product()
}

/// Number of normal subgroups `N ≤ K` with `K/N ≅ G`, i.e. the number of
/// `Aut(G)`-orbits on `Epi(K, G)`. Equal to [`subgroup_count`] by duality.
pub fn quotient_count(k: &FinAbGroup, g: &FinAbGroup) -> BigUint {
    subgroup_count(k, g)
}

/// `|Aut(G)|`, the product over primes of the closed form for abelian `p`-groups.
pub fn aut_order(g: &FinAbGroup) -> BigUint {
    let mut acc = BigUint::one();
    for (&p, lambda) in &g.parts {
        let e: Vec<u32> = lambda.iter().rev().copied().collect();
        let k = e.len();
        let pb = BigUint::from(p);
        for j in 0..k {
            let d = (0..k).rev().find(|&l| e[l] == e[j]).unwrap() + 1;
            let c = (0..k).find(|&l| e[l] == e[j]).unwrap() + 1;
            acc *= pb.pow(d as u32) - pb.pow(j as u32);
            acc *= pb.pow(e[j] * (k - d) as u32);
            acc *= pb.pow((e[j] - 1) * (k - c + 1) as u32);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FinAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(FinAbGroup::canonicalize(&[4, 2]).unwrap(), g("2:[2,1]"));
        assert_eq!(FinAbGroup::canonicalize(&[6]).unwrap(), g("2:[1];3:[1]"));
        assert_eq!(FinAbGroup::canonicalize(&[]).unwrap(), FinAbGroup::trivial());
        assert_eq!(FinAbGroup::canonicalize(&[1, 1]).unwrap(), FinAbGroup::trivial());
        assert!(matches!(
            FinAbGroup::canonicalize(&[0]),
            Err(Error::InvalidSpec(_))
        ));
        assert!(FinAbGroup::canonicalize(&[-3]).is_err());
    }

    #[test]
    fn literal_round_trip() {
        for s in ["1", "2:[2,1]", "2:[1];3:[1]", "5:[3,3,1]"] {
            assert_eq!(g(s).to_string(), s);
        }
        assert_eq!(g(" 3:[1] ; 2:[1, 2] "), g("2:[2,1];3:[1]"));
        let e = "2:[2,x]".parse::<FinAbGroup>().unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 1,
                column: 6,
                message: "expected an exponent".into()
            }
        );
        assert!("4:[1]".parse::<FinAbGroup>().is_err());
        assert!("2:[0]".parse::<FinAbGroup>().is_err());
    }

    #[test]
    fn json_form() {
        let x = g("2:[2,1];3:[1]");
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(j, r#"{"2":[2,1],"3":[1]}"#);
        assert_eq!(serde_json::from_str::<FinAbGroup>(&j).unwrap(), x);
        assert_eq!(serde_json::to_string(&FinAbGroup::trivial()).unwrap(), "{}");
        assert!(serde_json::from_str::<FinAbGroup>(r#"{"2":[1,2]}"#).is_err());
        assert!(serde_json::from_str::<FinAbGroup>(r#"{"2":[]}"#).is_err());
    }

    #[test]
    fn epi_examples() {
        assert!(epi_exists(&g("2:[2,1]"), &g("2:[1,1]")));
        assert!(!epi_exists(&g("2:[1,1]"), &g("2:[2]")));
        assert!(epi_exists(&g("2:[1]"), &FinAbGroup::trivial()));
        assert!(!epi_exists(&g("2:[1]"), &g("3:[1]")));
    }

    #[test]
    fn products() {
        assert_eq!(product(&g("2:[2]"), &g("2:[1]")), g("2:[2,1]"));
        assert_eq!(product(&g("2:[1]"), &g("3:[1]")), g("2:[1];3:[1]"));
        assert_eq!(product(&g("2:[1]"), &FinAbGroup::trivial()), g("2:[1]"));
    }

    #[test]
    fn quotient_class_listing() {
        let got: Vec<String> = quotient_classes(&g("2:[2,1]"))
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(got, ["1", "2:[1]", "2:[2]", "2:[1,1]", "2:[2,1]"]);
        assert_eq!(quotient_classes(&FinAbGroup::trivial()), vec![FinAbGroup::trivial()]);
        assert_eq!(quotient_classes(&g("3:[1]")).len(), 2);
    }

    #[test]
    fn invariants_and_names() {
        let x = g("2:[2,1];3:[1]");
        assert_eq!(x.order(), 24);
        assert_eq!(x.exponent(), 12);
        assert_eq!(x.invariant_factors(), vec![2, 12]);
        assert_eq!(x.rank(), 2);
        assert_eq!(x.short_name(), "C4xC2xC3");
        assert_eq!(x.pretty(false), "ℤ/4⊕ℤ/2⊕ℤ/3");
        assert_eq!(floor_log(2, 7), 2);
        assert_eq!(floor_log(5, 4), 0);
    }

    #[test]
    fn counting_closed_forms() {
        assert_eq!(gaussian_binomial(2, 1, 2), BigUint::from(3u32));
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        let z4z2 = g("2:[2,1]");
        assert_eq!(subgroup_count(&z4z2, &g("2:[1]")), BigUint::from(3u32));
        assert_eq!(subgroup_count(&z4z2, &g("2:[2]")), BigUint::from(2u32));
        assert_eq!(subgroup_count(&z4z2, &g("2:[1,1]")), BigUint::from(1u32));
        assert_eq!(aut_order(&g("2:[1,1]")), BigUint::from(6u32));
        assert_eq!(aut_order(&g("2:[2,1]")), BigUint::from(8u32));
        assert_eq!(aut_order(&g("3:[1]")), BigUint::from(2u32));
        assert_eq!(aut_order(&FinAbGroup::trivial()), BigUint::one());
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(conjugate(&[3, 1]), vec![2, 1, 1]);
    }
}
