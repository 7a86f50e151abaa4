//! Element-level oracle: explicit group tables, subgroup enumeration and
//! homomorphism search. Independent of the partition rules in the parent module.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;

use super::{snf::smith_normal_form, FinAbGroup};
use crate::error::{Error, Result};

/// `⊕ ℤ/nᵢ` with elements encoded in mixed radix.
#[derive(Debug, Clone)]
pub struct ElementTable {
    moduli: Vec<u64>,
    primes: Vec<u64>,
    order: usize,
}

/// A subgroup as a bitset over element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    bits: Vec<u64>,
    size: usize,
}

impl Subgroup {
    fn empty(n: usize) -> Self {
        Self {
            bits: vec![0; n.div_ceil(64)],
            size: 0,
        }
    }

    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        if self.bits[w] & b != 0 {
            return false;
        }
        self.bits[w] |= b;
        self.size += 1;
        true
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word & (1u64 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

fn cap_check(needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::CapExceeded { needed, cap })
    } else {
        Ok(())
    }
}

impl ElementTable {
    pub fn new(g: &FinAbGroup, cap: u128) -> Result<Self> {
        cap_check(g.order(), cap)?;
        Ok(Self::from_factors(&g.cyclic_factors()))
    }

    /// Table of `⊕ ℤ/nᵢ` from `(prime, prime power)` factors, kept in the given order.
    pub fn from_factors(factors: &[(u64, u64)]) -> Self {
        let moduli: Vec<u64> = factors.iter().map(|f| f.1).collect();
        let primes = factors.iter().map(|f| f.0).collect();
        let order = moduli.iter().product::<u64>() as usize;
        Self {
            moduli,
            primes,
            order,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&m| {
                let c = idx as u64 % m;
                idx /= m as usize;
                c
            })
            .collect()
    }

    pub fn encode(&self, coords: &[u64]) -> usize {
        let mut idx = 0usize;
        for (c, &m) in coords.iter().zip(&self.moduli).rev() {
            idx = idx * m as usize + (c % m) as usize;
        }
        idx
    }

    /// Exponent tuples of every element, in index order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        (0..self.order).map(|i| self.decode(i)).collect()
    }

    pub fn generators(&self) -> Vec<usize> {
        (0..self.moduli.len())
            .map(|i| {
                let mut c = vec![0; self.moduli.len()];
                c[i] = 1;
                self.encode(&c)
            })
            .collect()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = x
            .iter()
            .zip(&y)
            .zip(&self.moduli)
            .map(|((u, v), m)| (u + v) % m)
            .collect();
        self.encode(&s)
    }

    pub fn scale(&self, k: u64, a: usize) -> usize {
        let x = self.decode(a);
        let s: Vec<u64> = x
            .iter()
            .zip(&self.moduli)
            .map(|(u, &m)| ((*u as u128 * k as u128) % m as u128) as u64)
            .collect();
        self.encode(&s)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut s = Subgroup::empty(self.order);
        s.insert(0);
        s
    }

    pub fn whole(&self) -> Subgroup {
        let mut s = Subgroup::empty(self.order);
        for i in 0..self.order {
            s.insert(i);
        }
        s
    }

    /// `⟨S, h⟩ = S + ⟨h⟩`.
    pub fn extend(&self, s: &Subgroup, h: usize) -> Subgroup {
        let mut out = s.clone();
        let mut shift = h;
        while !s.contains(shift) {
            for x in s.elements() {
                out.insert(self.add(x, shift));
            }
            shift = self.add(shift, h);
        }
        out
    }

    /// Subgroup generated by `gens`, by breadth-first closure.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut s = self.trivial_subgroup();
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if s.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        s
    }

    /// Every subgroup, each listed once.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let start = self.trivial_subgroup();
        let mut seen: HashSet<Vec<u64>> = HashSet::from([start.bits.clone()]);
        let mut out = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for h in 0..self.order {
                if s.contains(h) {
                    continue;
                }
                let t = self.extend(&s, h);
                if seen.insert(t.bits.clone()) {
                    out.push(t.clone());
                    queue.push_back(t);
                }
            }
        }
        out
    }

    fn distinct_primes(&self) -> BTreeSet<u64> {
        self.primes.iter().copied().collect()
    }

    /// Recovers a partition from `tₖ = p^{λ'₁+…+λ'ₖ}` torsion counts.
    fn type_from_torsion(&self, count: impl Fn(u64, u64) -> usize) -> FinAbGroup {
        let mut parts = Vec::new();
        for p in self.distinct_primes() {
            let mut conj = Vec::new();
            let mut prev = 1usize;
            let mut pk = p;
            loop {
                let t = count(p, pk);
                if t == prev {
                    break;
                }
                let mut ratio = t / prev;
                let mut e = 0u32;
                while ratio > 1 {
                    ratio /= p as usize;
                    e += 1;
                }
                conj.push(e);
                prev = t;
                pk = pk.saturating_mul(p);
            }
            let lambda = super::conjugate(&conj);
            if !lambda.is_empty() {
                parts.push((p, lambda));
            }
        }
        FinAbGroup::from_parts(parts).expect("torsion counts give a valid type")
    }

    pub fn isomorphism_type(&self, s: &Subgroup) -> FinAbGroup {
        self.type_from_torsion(|_, pk| s.elements().filter(|&x| self.scale(pk, x) == 0).count())
    }

    /// Type of `G/N` from `#{x : p^k x ∈ N} / |N|`.
    pub fn quotient_type(&self, n: &Subgroup) -> FinAbGroup {
        self.type_from_torsion(|_, pk| {
            (0..self.order).filter(|&x| n.contains(self.scale(pk, x))).count() / n.size()
        })
    }

    /// Type of `G/N` from the Smith normal form of the relation matrix.
    pub fn quotient_type_snf(&self, n: &Subgroup) -> FinAbGroup {
        let k = self.moduli.len();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (i, &m) in self.moduli.iter().enumerate() {
            let mut r = vec![BigInt::from(0); k];
            r[i] = BigInt::from(m);
            rows.push(r);
        }
        for x in n.elements() {
            rows.push(self.decode(x).into_iter().map(BigInt::from).collect());
        }
        let orders: Vec<i64> = smith_normal_form(&rows)
            .into_iter()
            .map(|d| i64::try_from(d).expect("finite quotient"))
            .collect();
        FinAbGroup::canonicalize(&orders).expect("positive invariant factors")
    }
}

/// Decides `G ≫ H` by searching generator images.
///
/// The `i`-th standard generator of `G` has order `nᵢ` and may map to any `h`
/// with `ord(h) | nᵢ`. Only the generated subgroup matters for the remaining
/// search, so branches are deduplicated per depth by that subgroup.
pub fn oracle_epi_exists(g: &FinAbGroup, h: &FinAbGroup, order_cap: u128) -> Result<bool> {
    cap_check(g.order().saturating_mul(h.order()), order_cap)?;
    let tg = ElementTable::from_factors(&g.cyclic_factors());
    let th = ElementTable::from_factors(&h.cyclic_factors());
    let target = th.order();
    let admissible: Vec<Vec<usize>> = tg
        .moduli()
        .iter()
        .map(|&n| (0..target).filter(|&x| th.scale(n, x) == 0).collect())
        .collect();
    // Upper bound on how much the remaining generators can enlarge the image.
    let mut tail = vec![1u128; admissible.len() + 1];
    for i in (0..admissible.len()).rev() {
        tail[i] = tail[i + 1].saturating_mul(tg.moduli()[i] as u128);
    }
    let mut frontier = vec![th.trivial_subgroup()];
    for (depth, images) in admissible.iter().enumerate() {
        if frontier.iter().any(|s| s.size() == target) {
            return Ok(true);
        }
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for s in &frontier {
            if (s.size() as u128).saturating_mul(tail[depth]) < target as u128 {
                continue;
            }
            for &y in images {
                let t = th.extend(s, y);
                if seen.insert(t.bits.clone()) {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.iter().any(|s| s.size() == target))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomCounts {
    pub homs: u128,
    pub epis: u128,
}

/// Counts all homomorphisms and epimorphisms `G → H` by full enumeration.
/// The cap bounds the number of candidate generator-image tuples.
pub fn oracle_hom_counts(g: &FinAbGroup, h: &FinAbGroup, cap: u128) -> Result<HomCounts> {
    let tg = ElementTable::from_factors(&g.cyclic_factors());
    let th = ElementTable::from_factors(&h.cyclic_factors());
    let admissible: Vec<Vec<usize>> = tg
        .moduli()
        .iter()
        .map(|&n| (0..th.order()).filter(|&x| th.scale(n, x) == 0).collect())
        .collect();
    let total = admissible
        .iter()
        .fold(1u128, |a, v| a.saturating_mul(v.len() as u128));
    cap_check(total, cap)?;
    let mut epis = 0u128;
    let mut idx = vec![0usize; admissible.len()];
    for _ in 0..total {
        let imgs: Vec<usize> = idx.iter().zip(&admissible).map(|(&i, v)| v[i]).collect();
        if th.closure(&imgs).size() == th.order() {
            epis += 1;
        }
        for (i, v) in idx.iter_mut().zip(&admissible) {
            *i += 1;
            if *i < v.len() {
                break;
            }
            *i = 0;
        }
    }
    Ok(HomCounts { homs: total, epis })
}

/// Isomorphism classes of subgroups `L ≤ G × K` projecting onto both factors.
pub fn oracle_wide_subgroups(
    g: &FinAbGroup,
    k: &FinAbGroup,
    order_cap: u128,
) -> Result<Vec<FinAbGroup>> {
    cap_check(g.order().saturating_mul(k.order()), order_cap)?;
    let gf = g.cyclic_factors();
    let split = gf.len();
    let mut factors = gf;
    factors.extend(k.cyclic_factors());
    let table = ElementTable::from_factors(&factors);
    let (go, ko) = (g.order() as usize, k.order() as usize);
    let mut found = BTreeSet::new();
    for s in table.subgroups() {
        if s.size() % go.max(ko) != 0 {
            continue;
        }
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        for x in s.elements() {
            let c = table.decode(x);
            left.insert(c[..split].to_vec());
            right.insert(c[split..].to_vec());
        }
        if left.len() == go && right.len() == ko {
            found.insert(table.isomorphism_type(&s));
        }
    }
    Ok(found.into_iter().collect())
}

/// All quotient types `G/N`, computed from kernels.
pub fn oracle_quotient_classes(g: &FinAbGroup, order_cap: u128) -> Result<Vec<FinAbGroup>> {
    let table = ElementTable::new(g, order_cap)?;
    let set: BTreeSet<FinAbGroup> = table
        .subgroups()
        .iter()
        .map(|n| table.quotient_type(n))
        .collect();
    Ok(set.into_iter().collect())
}

/// Number of subgroups of each isomorphism type.
pub fn oracle_subgroup_type_counts(
    g: &FinAbGroup,
    order_cap: u128,
) -> Result<BTreeMap<FinAbGroup, u64>> {
    let table = ElementTable::new(g, order_cap)?;
    let mut out = BTreeMap::new();
    for s in table.subgroups() {
        *out.entry(table.isomorphism_type(&s)).or_insert(0) += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FinAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn table_basics() {
        let t = ElementTable::new(&g("2:[2,1]"), 64).unwrap();
        assert_eq!(t.order(), 8);
        assert_eq!(t.elements().len(), 8);
        let gens = t.generators();
        assert_eq!(t.element_order(gens[0]), 4);
        assert_eq!(t.closure(&gens).size(), 8);
        assert!(ElementTable::new(&g("2:[7]"), 64).is_err());
    }

    #[test]
    fn subgroup_enumeration() {
        // Klein four: trivial, three lines, whole.
        let t = ElementTable::new(&g("2:[1,1]"), 64).unwrap();
        assert_eq!(t.subgroups().len(), 5);
        let t = ElementTable::new(&g("2:[1,1,1,1,1,1]"), 64).unwrap();
        assert_eq!(t.subgroups().len(), 2825);
    }

    #[test]
    fn quotient_routes_agree() {
        let t = ElementTable::new(&g("2:[2,1];3:[1]"), 64).unwrap();
        for n in t.subgroups() {
            assert_eq!(t.quotient_type(&n), t.quotient_type_snf(&n));
        }
    }

    #[test]
    fn epi_search() {
        assert!(oracle_epi_exists(&g("2:[2,1]"), &g("2:[1,1]"), 64).unwrap());
        assert!(!oracle_epi_exists(&g("2:[1]"), &g("2:[1,1]"), 64).unwrap());
        assert!(oracle_epi_exists(&g("3:[2]"), &g("3:[2]"), 81).unwrap());
        assert!(!oracle_epi_exists(&g("2:[1,1]"), &g("2:[2]"), 64).unwrap());
        assert!(matches!(
            oracle_epi_exists(&g("2:[5]"), &g("2:[5]"), 64),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn hom_counts() {
        let c = oracle_hom_counts(&g("2:[2,1]"), &g("2:[1,1]"), 1000).unwrap();
        assert_eq!(c, HomCounts { homs: 16, epis: 6 });
    }

    #[test]
    fn wide_subgroups() {
        let c2 = g("2:[1]");
        assert_eq!(
            oracle_wide_subgroups(&c2, &c2, 64).unwrap(),
            vec![g("2:[1]"), g("2:[1,1]")]
        );
        let x = g("2:[2]");
        assert_eq!(
            oracle_wide_subgroups(&x, &FinAbGroup::trivial(), 64).unwrap(),
            vec![x]
        );
        assert_eq!(
            oracle_wide_subgroups(&c2, &g("3:[1]"), 64).unwrap(),
            vec![g("2:[1];3:[1]")]
        );
    }
}
