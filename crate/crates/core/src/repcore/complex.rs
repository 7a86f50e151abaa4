use std::collections::{BTreeMap, BTreeSet};

use super::category::EpiCategory;
use super::functor::{FunctorRep, NatTrans};
use super::linalg::Matrix;
use crate::error::{Error, Result};

/// A bounded chain complex of functors with homological differentials
/// `d_n : C_n → C_{n-1}`, stored per member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorComplex {
    members: usize,
    terms: BTreeMap<i64, FunctorRep>,
    diffs: BTreeMap<i64, Vec<Matrix>>,
}

/// Chain map components, per degree and member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub comps: BTreeMap<i64, Vec<Matrix>>,
}

impl FunctorComplex {
    pub fn zero(cat: &EpiCategory) -> Self {
        Self {
            members: cat.len(),
            terms: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    pub fn concentrated(cat: &EpiCategory, rep: FunctorRep, degree: i64) -> Self {
        let mut c = Self::zero(cat);
        if rep.total_dim() > 0 {
            c.terms.insert(degree, rep);
        }
        c
    }

    /// Assembles a complex and checks `d² = 0` and naturality of `d`.
    pub fn new(
        cat: &EpiCategory,
        terms: BTreeMap<i64, FunctorRep>,
        diffs: BTreeMap<i64, Vec<Matrix>>,
    ) -> Result<Self> {
        let c = Self {
            members: cat.len(),
            terms,
            diffs,
        };
        c.check(cat)?;
        Ok(c.pruned())
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, t| t.total_dim() > 0);
        let terms = &self.terms;
        self.diffs.retain(|n, d| {
            terms.contains_key(n) && terms.contains_key(&(n - 1)) && d.iter().any(|m| !m.is_zero())
        });
        self
    }

    pub fn degrees(&self) -> BTreeSet<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn term(&self, n: i64) -> Option<&FunctorRep> {
        self.terms.get(&n)
    }

    fn term_or_zero(&self, cat: &EpiCategory, n: i64) -> FunctorRep {
        self.terms.get(&n).cloned().unwrap_or_else(|| FunctorRep::zero(cat))
    }

    pub fn dim(&self, n: i64, k: usize) -> usize {
        self.terms.get(&n).map_or(0, |t| t.dim(k))
    }

    /// `d_n` at member `k`.
    pub fn diff(&self, n: i64, k: usize) -> Matrix {
        match self.diffs.get(&n) {
            Some(d) => d[k].clone(),
            None => Matrix::zeros(self.dim(n - 1, k), self.dim(n, k)),
        }
    }

    /// Restriction of `C_n` along `epis(k2, k1)[b]`.
    pub fn restriction(&self, n: i64, k2: usize, k1: usize, b: usize) -> Matrix {
        match self.terms.get(&n) {
            Some(t) => t.map(k2, k1, b).clone(),
            None => Matrix::zeros(0, 0),
        }
    }

    /// Functoriality of every term, then [`Self::check_differentials`].
    pub fn check(&self, cat: &EpiCategory) -> Result<()> {
        for t in self.terms.values() {
            t.check(cat)?;
        }
        self.check_differentials(cat)
    }

    /// `d² = 0` and naturality of `d`. Sums, shifts, tensors and cones of
    /// functors are functors, so operations only need this check.
    pub fn check_differentials(&self, cat: &EpiCategory) -> Result<()> {
        let degrees = self.degrees();
        for &n in &degrees {
            for k in 0..self.members {
                let d = self.diff(n, k);
                if (d.rows(), d.cols()) != (self.dim(n - 1, k), self.dim(n, k)) {
                    return Err(Error::NaturalityViolation(format!(
                        "differential d_{n} at {} has the wrong shape",
                        cat.names()[k]
                    )));
                }
                if !self.diff(n - 1, k).mul(&d).is_zero() {
                    return Err(Error::NaturalityViolation(format!(
                        "d∘d ≠ 0 in degree {n} at {}",
                        cat.names()[k]
                    )));
                }
            }
            if self.diffs.contains_key(&n) {
                let nt = NatTrans {
                    comps: (0..self.members).map(|k| self.diff(n, k)).collect(),
                };
                nt.check(cat, &self.term_or_zero(cat, n), &self.term_or_zero(cat, n - 1))?;
            }
        }
        Ok(())
    }

    pub fn shift(&self) -> Self {
        Self {
            members: self.members,
            terms: self.terms.iter().map(|(&n, t)| (n + 1, t.clone())).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(&n, d)| (n + 1, d.iter().map(Matrix::neg).collect()))
                .collect(),
        }
    }

    pub fn sum(&self, cat: &EpiCategory, other: &Self) -> Self {
        let degrees: BTreeSet<i64> = self.degrees().union(&other.degrees()).copied().collect();
        let terms = degrees
            .iter()
            .map(|&n| (n, self.term_or_zero(cat, n).direct_sum(&other.term_or_zero(cat, n))))
            .collect();
        let diffs = degrees
            .iter()
            .map(|&n| {
                let d = (0..self.members)
                    .map(|k| self.diff(n, k).direct_sum(&other.diff(n, k)))
                    .collect();
                (n, d)
            })
            .collect();
        Self {
            members: self.members,
            terms,
            diffs,
        }
        .pruned()
    }

    /// Pointwise tensor product with Koszul signs: on `X_i ⊗ Y_j`,
    /// `d = d_X ⊗ 1 + (-1)^i 1 ⊗ d_Y`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut pairs: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for &i in &self.degrees() {
            for &j in &other.degrees() {
                pairs.entry(i + j).or_default().push((i, j));
            }
        }
        let mut terms = BTreeMap::new();
        for (&n, ps) in &pairs {
            let mut t: Option<FunctorRep> = None;
            for &(i, j) in ps {
                let piece = self.terms[&i].tensor(&other.terms[&j]);
                t = Some(match t {
                    None => piece,
                    Some(acc) => acc.direct_sum(&piece),
                });
            }
            terms.insert(n, t.expect("nonempty"));
        }
        let mut diffs = BTreeMap::new();
        for (&n, cols) in &pairs {
            let Some(rows) = pairs.get(&(n - 1)) else {
                continue;
            };
            let d = (0..self.members)
                .map(|k| {
                    let rs: Vec<usize> = rows.iter().map(|&(i, j)| self.dim(i, k) * other.dim(j, k)).collect();
                    let cs: Vec<usize> = cols.iter().map(|&(i, j)| self.dim(i, k) * other.dim(j, k)).collect();
                    Matrix::blocks(&rs, &cs, |r, c| {
                        let (i2, j2) = rows[r];
                        let (i, j) = cols[c];
                        if (i2, j2) == (i - 1, j) {
                            Some(self.diff(i, k).kron(&Matrix::identity(other.dim(j, k))))
                        } else if (i2, j2) == (i, j - 1) {
                            let m = Matrix::identity(self.dim(i, k)).kron(&other.diff(j, k));
                            Some(if i.rem_euclid(2) == 1 { m.neg() } else { m })
                        } else {
                            None
                        }
                    })
                })
                .collect();
            diffs.insert(n, d);
        }
        Self {
            members: self.members,
            terms,
            diffs,
        }
        .pruned()
    }

    /// The mapping cone of `f : self → target`: `cone_n = X_{n-1} ⊕ Y_n` with
    /// `d(x, y) = (-dx, f x + dy)`. Fails unless `f` is a natural chain map.
    pub fn cone(&self, cat: &EpiCategory, target: &Self, f: &ChainMap) -> Result<Self> {
        f.check(cat, self, target)?;
        let degrees: BTreeSet<i64> = self
            .degrees()
            .iter()
            .map(|n| n + 1)
            .chain(target.degrees())
            .collect();
        let terms = degrees
            .iter()
            .map(|&n| {
                (n, self.term_or_zero(cat, n - 1).direct_sum(&target.term_or_zero(cat, n)))
            })
            .collect();
        let diffs = degrees
            .iter()
            .map(|&n| {
                let d = (0..self.members)
                    .map(|k| {
                        let rs = [self.dim(n - 2, k), target.dim(n - 1, k)];
                        let cs = [self.dim(n - 1, k), target.dim(n, k)];
                        Matrix::blocks(&rs, &cs, |r, c| match (r, c) {
                            (0, 0) => Some(self.diff(n - 1, k).neg()),
                            (1, 0) => Some(f.comp(self, target, n - 1, k)),
                            (1, 1) => Some(target.diff(n, k)),
                            _ => None,
                        })
                    })
                    .collect();
                (n, d)
            })
            .collect();
        let c = Self {
            members: self.members,
            terms,
            diffs,
        }
        .pruned();
        c.check_differentials(cat)?;
        Ok(c)
    }

    /// The subquotient keeping the members where `keep` holds.
    pub fn restrict_to(&self, keep: &[bool]) -> Self {
        Self {
            members: self.members,
            terms: self.terms.iter().map(|(&n, t)| (n, t.restrict_to(keep))).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(&n, d)| {
                    let d = d
                        .iter()
                        .enumerate()
                        .map(|(k, m)| {
                            if keep[k] {
                                m.clone()
                            } else {
                                Matrix::zeros(0, 0)
                            }
                        })
                        .collect();
                    (n, d)
                })
                .collect(),
        }
        .pruned()
    }

    /// Graded homology dimensions at member `k`, nonzero degrees only.
    pub fn homology_at(&self, k: usize) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &n in &self.degrees() {
            let h = self.dim(n, k) - self.diff(n, k).rank() - self.diff(n + 1, k).rank();
            if h > 0 {
                out.insert(n, h);
            }
        }
        out
    }

    pub fn homology(&self) -> Vec<BTreeMap<i64, usize>> {
        (0..self.members).map(|k| self.homology_at(k)).collect()
    }

    /// Members where the homology is nonzero.
    pub fn hsupp_oracle(&self) -> BTreeSet<usize> {
        (0..self.members)
            .filter(|&k| !self.homology_at(k).is_empty())
            .collect()
    }

    pub fn euler_characteristic(&self, k: usize) -> i64 {
        self.terms
            .iter()
            .map(|(&n, t)| if n.rem_euclid(2) == 0 { t.dim(k) as i64 } else { -(t.dim(k) as i64) })
            .sum()
    }

    pub fn total_dim(&self) -> usize {
        self.terms.values().map(FunctorRep::total_dim).sum()
    }

    pub fn identity_map(&self) -> ChainMap {
        ChainMap {
            comps: self
                .terms
                .iter()
                .map(|(&n, t)| (n, t.dims().iter().map(|&d| Matrix::identity(d)).collect()))
                .collect(),
        }
    }
}

impl ChainMap {
    fn comp(&self, x: &FunctorComplex, y: &FunctorComplex, n: i64, k: usize) -> Matrix {
        match self.comps.get(&n) {
            Some(c) => c[k].clone(),
            None => Matrix::zeros(y.dim(n, k), x.dim(n, k)),
        }
    }

    /// Naturality in every degree and `d f = f d`.
    pub fn check(&self, cat: &EpiCategory, x: &FunctorComplex, y: &FunctorComplex) -> Result<()> {
        let degrees: BTreeSet<i64> = x.degrees().union(&y.degrees()).copied().collect();
        for &n in &degrees {
            let nt = NatTrans {
                comps: (0..x.members).map(|k| self.comp(x, y, n, k)).collect(),
            };
            nt.check(cat, &x.term_or_zero(cat, n), &y.term_or_zero(cat, n))?;
            for k in 0..x.members {
                let lhs = y.diff(n, k).mul(&self.comp(x, y, n, k));
                let rhs = self.comp(x, y, n - 1, k).mul(&x.diff(n, k));
                if lhs != rhs {
                    return Err(Error::NaturalityViolation(format!(
                        "not a chain map in degree {n} at {}",
                        cat.names()[k]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Member;
    use crate::repcore::category::tests::quotients_family;
    use crate::repcore::linalg::q;
    use crate::repcore::module::OutModule;

    #[test]
    fn augmentation_cone() {
        let cat = EpiCategory::new(&quotients_family("2:[1]")).unwrap();
        let one = cat.unit().unwrap();
        let c2 = 1 - one;
        let e = FunctorRep::e(&cat, &OutModule::trivial(&cat, c2, 1)).unwrap();
        let x = FunctorComplex::concentrated(&cat, e, 0);
        let y = FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 0);
        let mut comps = vec![Matrix::zeros(1, 0); 2];
        comps[c2] = Matrix::from_fn(1, 1, |_, _| q(1));
        let f = ChainMap {
            comps: [(0, comps)].into_iter().collect(),
        };
        let c = x.cone(&cat, &y, &f).unwrap();
        assert_eq!(c.hsupp_oracle(), [one].into_iter().collect());
        assert_eq!(c.homology_at(one), [(0, 1)].into_iter().collect());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let cat = EpiCategory::new(&quotients_family("2:[2]")).unwrap();
        let g = cat.index_of(&Member::Ab("2:[2]".parse().unwrap())).unwrap();
        let e = FunctorRep::e(&cat, &OutModule::regular(&cat, g)).unwrap();
        let x = FunctorComplex::concentrated(&cat, e, 0)
            .sum(&cat, &FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 1));
        let c = x.cone(&cat, &x, &x.identity_map()).unwrap();
        assert!(c.hsupp_oracle().is_empty());
        for k in 0..cat.len() {
            assert_eq!(c.euler_characteristic(k), 0);
        }
    }

    #[test]
    fn shifts_and_units() {
        let cat = EpiCategory::new(&quotients_family("3:[1]")).unwrap();
        let g = 1 - cat.unit().unwrap();
        let e = FunctorRep::e(&cat, &OutModule::regular(&cat, g)).unwrap();
        let x = FunctorComplex::concentrated(&cat, e, 0);
        assert_eq!(x.shift().shift().degrees(), [2].into_iter().collect());
        let u = FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 0);
        assert_eq!(u.tensor(&x), x);
        assert!(x.cone(&cat, &x, &ChainMap { comps: BTreeMap::new() }).is_ok());
        let mut comps = vec![Matrix::zeros(0, 0); cat.len()];
        comps[g] = Matrix::from_rows(&[vec![1, 0], vec![0, 0]]);
        let bad = ChainMap {
            comps: [(0, comps)].into_iter().collect(),
        };
        assert!(matches!(x.cone(&cat, &x, &bad), Err(Error::NaturalityViolation(_))));
    }
}
