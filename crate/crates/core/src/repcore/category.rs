use std::collections::HashMap;

use crate::abgroup::{oracle::ElementTable, FinAbGroup};
use crate::error::{Error, Result};
use crate::family::{Family, Member};

/// Images of the domain's standard generators, as element indices of the codomain.
pub type Hom = Vec<usize>;

const ORDER_CAP: u128 = 1 << 12;
const HOM_CAP: u128 = 1 << 16;

/// The category of concrete epimorphisms between the members of an
/// extensional family whose objects carry abelian identifications.
///
/// `epis(k, g)` lists `Epi(K, G)`; `Out(G) = Epi(G, G)` acts freely on it by
/// post-composition, and every epimorphism factors uniquely as `θ ∘ r_j` with
/// `r_j` a fixed orbit representative.
#[derive(Debug, Clone)]
pub struct EpiCategory {
    family: Family,
    names: Vec<String>,
    groups: Vec<FinAbGroup>,
    tables: Vec<ElementTable>,
    epis: Vec<Vec<Vec<Hom>>>,
    lookup: Vec<Vec<HashMap<Hom, usize>>>,
    identity: Vec<usize>,
    inverse: Vec<Vec<usize>>,
    reps: Vec<Vec<Vec<usize>>>,
    factor: Vec<Vec<Vec<(usize, usize)>>>,
}

impl EpiCategory {
    pub fn new(family: &Family) -> Result<Self> {
        let t = family
            .table()
            .ok_or_else(|| Error::Unsupported(format!("{} is not extensional", family.name())))?;
        let groups = t.require_groups()?.to_vec();
        let names = t.objects().to_vec();
        let tables = groups
            .iter()
            .map(|g| ElementTable::new(g, ORDER_CAP))
            .collect::<Result<Vec<_>>>()?;
        let n = names.len();
        let mut epis = vec![vec![Vec::new(); n]; n];
        for k in 0..n {
            for g in 0..n {
                if t.epi(k, g) {
                    epis[k][g] = enumerate_epis(&tables[k], &tables[g])?;
                }
            }
        }
        let lookup: Vec<Vec<HashMap<Hom, usize>>> = epis
            .iter()
            .map(|row| {
                row.iter()
                    .map(|l| l.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect())
                    .collect()
            })
            .collect();
        let identity = (0..n)
            .map(|g| {
                let id: Hom = tables[g].generators();
                lookup[g][g].get(&id).copied().ok_or_else(|| {
                    Error::InvalidSpec(format!("{} is missing its identity", names[g]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cat = Self {
            family: family.clone(),
            names,
            groups,
            tables,
            epis,
            lookup,
            identity,
            inverse: Vec::new(),
            reps: Vec::new(),
            factor: Vec::new(),
        };
        cat.inverse = (0..n)
            .map(|g| {
                (0..cat.out_order(g))
                    .map(|t| {
                        (0..cat.out_order(g))
                            .find(|&s| cat.compose(g, g, g, t, s) == cat.identity[g])
                            .expect("automorphisms are invertible")
                    })
                    .collect()
            })
            .collect();
        cat.build_orbits();
        cat.check_metadata(family)?;
        Ok(cat)
    }

    fn build_orbits(&mut self) {
        let n = self.len();
        self.reps = vec![vec![Vec::new(); n]; n];
        self.factor = vec![vec![Vec::new(); n]; n];
        for k in 0..n {
            for g in 0..n {
                let m = self.epis[k][g].len();
                let mut factor = vec![None; m];
                let mut reps = Vec::new();
                let mut order: Vec<usize> = (0..m).collect();
                if k == g {
                    order.swap(0, self.identity[g]);
                }
                for a in order {
                    if factor[a].is_some() {
                        continue;
                    }
                    let j = reps.len();
                    reps.push(a);
                    for t in 0..self.out_order(g) {
                        let b = self.compose(k, g, g, a, t);
                        factor[b] = Some((t, j));
                    }
                }
                self.reps[k][g] = reps;
                self.factor[k][g] = factor.into_iter().map(Option::unwrap).collect();
            }
        }
    }

    fn check_metadata(&self, family: &Family) -> Result<()> {
        let t = family.table().expect("extensional");
        for g in 0..self.len() {
            if t.out_order(g)? != self.out_order(g) as u64 {
                return Err(Error::InvalidSpec(format!(
                    "out order of {} disagrees with its group",
                    self.names[g]
                )));
            }
            for k in 0..self.len() {
                if t.epi(k, g) && t.orbit_count(k, g)? != self.orbit_count(k, g) as u64 {
                    return Err(Error::InvalidSpec(format!(
                        "orbit count for ({}, {}) disagrees with its groups",
                        self.names[k], self.names[g]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn group(&self, i: usize) -> &FinAbGroup {
        &self.groups[i]
    }

    pub fn index_of(&self, x: &Member) -> Result<usize> {
        match self.family.resolve(x)? {
            Member::Named(n) => Ok(self.names.iter().position(|m| *m == n).expect("resolved")),
            Member::Ab(_) => unreachable!("extensional members resolve to names"),
        }
    }

    pub fn unit(&self) -> Option<usize> {
        self.groups.iter().position(FinAbGroup::is_trivial)
    }

    pub fn epi_exists(&self, k: usize, g: usize) -> bool {
        !self.epis[k][g].is_empty()
    }

    /// Members admitting an epimorphism onto `g`, other than `g` itself.
    pub fn strict_up_set(&self, g: usize) -> Vec<usize> {
        (0..self.len()).filter(|&h| h != g && self.epi_exists(h, g)).collect()
    }

    pub fn epi_count(&self, k: usize, g: usize) -> usize {
        self.epis[k][g].len()
    }

    pub fn out_order(&self, g: usize) -> usize {
        self.epis[g][g].len()
    }

    pub fn identity(&self, g: usize) -> usize {
        self.identity[g]
    }

    pub fn inverse(&self, g: usize, t: usize) -> usize {
        self.inverse[g][t]
    }

    pub fn orbit_count(&self, k: usize, g: usize) -> usize {
        self.reps[k][g].len()
    }

    pub fn orbit_rep(&self, k: usize, g: usize, j: usize) -> usize {
        self.reps[k][g][j]
    }

    /// `(θ, j)` with `α = θ ∘ r_j`.
    pub fn factor(&self, k: usize, g: usize, a: usize) -> (usize, usize) {
        self.factor[k][g][a]
    }

    /// Image of element `x` of the domain under `epis(k, g)[a]`.
    pub fn apply(&self, k: usize, g: usize, a: usize, x: usize) -> usize {
        let coords = self.tables[k].decode(x);
        let tg = &self.tables[g];
        coords
            .iter()
            .zip(&self.epis[k][g][a])
            .fold(0, |acc, (&c, &img)| tg.add(acc, tg.scale(c, img)))
    }

    /// `α ∘ β` for `β ∈ Epi(K2, K1)` and `α ∈ Epi(K1, G)`.
    pub fn compose(&self, k2: usize, k1: usize, g: usize, b: usize, a: usize) -> usize {
        let img: Hom = self.epis[k2][k1][b]
            .iter()
            .map(|&y| self.apply(k1, g, a, y))
            .collect();
        self.lookup[k2][g][&img]
    }

    /// All `θ ∈ Out(G)` with `β = θ ∘ α`, for `α, β ∈ Epi(K, G)`.
    pub fn relating_aut(&self, k: usize, g: usize, a: usize, b: usize) -> Option<usize> {
        let (ta, ja) = self.factor(k, g, a);
        let (tb, jb) = self.factor(k, g, b);
        (ja == jb).then(|| self.compose(g, g, g, self.inverse(g, ta), tb))
    }
}

fn enumerate_epis(tk: &ElementTable, tg: &ElementTable) -> Result<Vec<Hom>> {
    let admissible: Vec<Vec<usize>> = tk
        .moduli()
        .iter()
        .map(|&n| (0..tg.order()).filter(|&x| tg.scale(n, x) == 0).collect())
        .collect();
    let total = admissible
        .iter()
        .fold(1u128, |a, v| a.saturating_mul(v.len() as u128));
    if total > HOM_CAP {
        return Err(Error::CapExceeded {
            needed: total,
            cap: HOM_CAP,
        });
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; admissible.len()];
    for _ in 0..total {
        let imgs: Hom = idx.iter().zip(&admissible).map(|(&i, v)| v[i]).collect();
        if tg.closure(&imgs).size() == tg.order() {
            out.push(imgs);
        }
        for (i, v) in idx.iter_mut().zip(&admissible) {
            *i += 1;
            if *i < v.len() {
                break;
            }
            *i = 0;
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::family::{ExtensionalTable, FamilySpec};

    pub(crate) fn quotients_family(g: &str) -> Family {
        let g: FinAbGroup = g.parse().unwrap();
        Family::new(FamilySpec::Extensional(ExtensionalTable::from_quotients_of(&g))).unwrap()
    }

    #[test]
    fn counts_match_closed_forms() {
        let f = quotients_family("2:[2,1]");
        let c = EpiCategory::new(&f).unwrap();
        assert_eq!(c.len(), 5);
        let top = c.index_of(&Member::Ab("2:[2,1]".parse().unwrap())).unwrap();
        assert_eq!(c.out_order(top), 8);
        let one = c.unit().unwrap();
        assert_eq!(c.epi_count(top, one), 1);
        assert_eq!(c.strict_up_set(one).len(), 4);
        let c3 = EpiCategory::new(&quotients_family("3:[1]")).unwrap();
        let g = c3.index_of(&Member::Ab("3:[1]".parse().unwrap())).unwrap();
        assert_eq!(c3.out_order(g), 2);
        assert_eq!(c3.orbit_count(g, g), 1);
        assert_eq!(c3.orbit_rep(g, g, 0), c3.identity(g));
    }

    #[test]
    fn factorisation_is_unique() {
        let c = EpiCategory::new(&quotients_family("2:[2,1]")).unwrap();
        for k in 0..c.len() {
            for g in 0..c.len() {
                for a in 0..c.epi_count(k, g) {
                    let (t, j) = c.factor(k, g, a);
                    let r = c.orbit_rep(k, g, j);
                    assert_eq!(c.compose(k, g, g, r, t), a);
                    for b in 0..c.epi_count(k, g) {
                        if let Some(th) = c.relating_aut(k, g, a, b) {
                            assert_eq!(c.compose(k, g, g, a, th), b);
                        } else {
                            assert_ne!(c.factor(k, g, b).1, j);
                        }
                    }
                }
            }
        }
    }
}
