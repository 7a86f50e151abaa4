use num_traits::Zero;

use super::category::EpiCategory;
use super::linalg::{Matrix, Q};
use super::module::OutModule;
use crate::error::{Error, Result};

/// A contravariant functor from the epimorphism category to rational vector
/// spaces: a dimension per member and, for each `β ∈ Epi(K2, K1)`, a matrix
/// `X(K1) → X(K2)` of size `dims[K2] × dims[K1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorRep {
    dims: Vec<usize>,
    maps: Vec<Vec<Vec<Matrix>>>,
}

impl FunctorRep {
    /// Builds a functor from a rule for its restriction maps and validates it.
    pub fn from_fn(
        cat: &EpiCategory,
        dims: Vec<usize>,
        map: impl Fn(usize, usize, usize) -> Matrix,
    ) -> Result<Self> {
        let rep = Self::build(cat, dims, map);
        rep.check(cat)?;
        Ok(rep)
    }

    pub(crate) fn build(
        cat: &EpiCategory,
        dims: Vec<usize>,
        map: impl Fn(usize, usize, usize) -> Matrix,
    ) -> Self {
        let n = cat.len();
        let maps = (0..n)
            .map(|k2| {
                (0..n)
                    .map(|k1| (0..cat.epi_count(k2, k1)).map(|b| map(k2, k1, b)).collect())
                    .collect()
            })
            .collect();
        Self { dims, maps }
    }

    pub fn zero(cat: &EpiCategory) -> Self {
        Self::build(cat, vec![0; cat.len()], |_, _, _| Matrix::zeros(0, 0))
    }

    /// The constant functor with value `k`.
    pub fn unit(cat: &EpiCategory) -> Self {
        Self::build(cat, vec![1; cat.len()], |_, _, _| Matrix::identity(1))
    }

    /// `e_{G,V}(K) = V ⊗_{Out(G)} k[Epi(K, G)]`, with basis `[r_j] ⊗ v_a` over orbit
    /// representatives. The relation is `[θα] ⊗ v = [α] ⊗ θ⁻¹v`.
    pub fn e(cat: &EpiCategory, v: &OutModule) -> Result<Self> {
        let g = v.object();
        let d = v.dim();
        let dims = (0..cat.len()).map(|k| cat.orbit_count(k, g) * d).collect();
        Self::from_fn(cat, dims, |k2, k1, b| {
            let mut m = Matrix::zeros(cat.orbit_count(k2, g) * d, cat.orbit_count(k1, g) * d);
            for j in 0..cat.orbit_count(k1, g) {
                let r = cat.orbit_rep(k1, g, j);
                let (t, i) = cat.factor(k2, g, cat.compose(k2, k1, g, b, r));
                let block = v.act(cat.inverse(g, t));
                place(&mut m, i * d, j * d, block);
            }
            m
        })
    }

    /// `χ_{G,V}`: `e_{G,V}` at `G`, zero at every other member.
    pub fn chi(cat: &EpiCategory, v: &OutModule) -> Result<Self> {
        let g = v.object();
        Self::chi_from_action(cat, g, v.dim(), |t| v.act(cat.inverse(g, t)).clone())
    }

    /// A functor supported at `g` alone, with restriction along `θ ∈ Out(G)`
    /// given by `action(θ)`.
    pub fn chi_from_action(
        cat: &EpiCategory,
        g: usize,
        dim: usize,
        action: impl Fn(usize) -> Matrix,
    ) -> Result<Self> {
        let dims = (0..cat.len()).map(|k| if k == g { dim } else { 0 }).collect();
        Self::from_fn(cat, dims, |k2, k1, b| {
            if k2 == g && k1 == g {
                action(b)
            } else {
                Matrix::zeros(usize::from(k2 == g) * dim, usize::from(k1 == g) * dim)
            }
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Restriction along `epis(k2, k1)[b]`.
    pub fn map(&self, k2: usize, k1: usize, b: usize) -> &Matrix {
        &self.maps[k2][k1][b]
    }

    /// Identities go to identities and `X(α ∘ β) = X(β) · X(α)`.
    pub fn check(&self, cat: &EpiCategory) -> Result<()> {
        let n = cat.len();
        for k in 0..n {
            if self.map(k, k, cat.identity(k)) != &Matrix::identity(self.dims[k]) {
                return Err(Error::NaturalityViolation(format!(
                    "identity of {} does not act as the identity",
                    cat.names()[k]
                )));
            }
        }
        for k3 in 0..n {
            for k2 in 0..n {
                for b in 0..cat.epi_count(k3, k2) {
                    for k1 in 0..n {
                        for a in 0..cat.epi_count(k2, k1) {
                            let ab = cat.compose(k3, k2, k1, b, a);
                            if self.map(k3, k1, ab) != &self.map(k3, k2, b).mul(self.map(k2, k1, a)) {
                                return Err(Error::NaturalityViolation(format!(
                                    "functoriality fails for {} → {} → {}",
                                    cat.names()[k3],
                                    cat.names()[k2],
                                    cat.names()[k1]
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Pointwise tensor product, basis ordered lexicographically.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a * b).collect(),
            maps: zip_maps(&self.maps, &other.maps, Matrix::kron),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            maps: zip_maps(&self.maps, &other.maps, Matrix::direct_sum),
        }
    }

    /// Keeps the members where `keep` holds and zeroes the rest.
    pub fn restrict_to(&self, keep: &[bool]) -> Self {
        let dims: Vec<usize> = self
            .dims
            .iter()
            .zip(keep)
            .map(|(&d, &k)| if k { d } else { 0 })
            .collect();
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(k2, row)| {
                row.iter()
                    .enumerate()
                    .map(|(k1, l)| {
                        l.iter()
                            .map(|m| {
                                if keep[k2] && keep[k1] {
                                    m.clone()
                                } else {
                                    Matrix::zeros(dims[k2], dims[k1])
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { dims, maps }
    }
}

fn zip_maps(
    a: &[Vec<Vec<Matrix>>],
    b: &[Vec<Vec<Matrix>>],
    op: impl Fn(&Matrix, &Matrix) -> Matrix,
) -> Vec<Vec<Vec<Matrix>>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(la, lb)| la.iter().zip(lb).map(|(x, y)| op(x, y)).collect())
                .collect()
        })
        .collect()
}

pub(crate) fn place(m: &mut Matrix, r0: usize, c0: usize, block: &Matrix) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            m[(r0 + r, c0 + c)] = block[(r, c)].clone();
        }
    }
}

/// A family of matrices `X(K) → Y(K)`, one per member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub comps: Vec<Matrix>,
}

impl NatTrans {
    pub fn check(&self, cat: &EpiCategory, x: &FunctorRep, y: &FunctorRep) -> Result<()> {
        for (k, c) in self.comps.iter().enumerate() {
            if (c.rows(), c.cols()) != (y.dim(k), x.dim(k)) {
                return Err(Error::NaturalityViolation(format!(
                    "component at {} has the wrong shape",
                    cat.names()[k]
                )));
            }
        }
        for k2 in 0..cat.len() {
            for k1 in 0..cat.len() {
                for b in 0..cat.epi_count(k2, k1) {
                    let lhs = self.comps[k2].mul(x.map(k2, k1, b));
                    let rhs = y.map(k2, k1, b).mul(&self.comps[k1]);
                    if lhs != rhs {
                        return Err(Error::NaturalityViolation(format!(
                            "not natural along an epimorphism {} → {}",
                            cat.names()[k2],
                            cat.names()[k1]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }
}

/// Coordinates of `[α] ⊗ v` in the orbit basis of `e_{G,V}(K)`.
pub fn reduce(cat: &EpiCategory, v: &OutModule, k: usize, a: usize, x: &[Q]) -> Vec<Q> {
    let g = v.object();
    let d = v.dim();
    let (t, j) = cat.factor(k, g, a);
    let mut out = vec![Q::zero(); cat.orbit_count(k, g) * d];
    let y = v.act(cat.inverse(g, t)).apply(x);
    out[j * d..(j + 1) * d].clone_from_slice(&y);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Member;
    use crate::repcore::category::tests::quotients_family;

    fn idx(cat: &EpiCategory, g: &str) -> usize {
        cat.index_of(&Member::Ab(g.parse().unwrap())).unwrap()
    }

    #[test]
    fn generator_dimensions() {
        let cat = EpiCategory::new(&quotients_family("2:[1]")).unwrap();
        let c2 = idx(&cat, "2:[1]");
        let e = FunctorRep::e(&cat, &OutModule::regular(&cat, c2)).unwrap();
        assert_eq!((e.dim(c2), e.dim(cat.unit().unwrap())), (1, 0));
        let c3 = EpiCategory::new(&quotients_family("3:[1]")).unwrap();
        let g = idx(&c3, "3:[1]");
        let e = FunctorRep::e(&c3, &OutModule::regular(&c3, g)).unwrap();
        assert_eq!(e.dim(g), 2);
        let one = c3.unit().unwrap();
        let e1 = FunctorRep::e(&c3, &OutModule::trivial(&c3, one, 1)).unwrap();
        assert_eq!(e1, FunctorRep::unit(&c3));
    }

    #[test]
    fn chi_vanishes_off_its_member() {
        let cat = EpiCategory::new(&quotients_family("2:[2]")).unwrap();
        let c2 = idx(&cat, "2:[1]");
        let c4 = idx(&cat, "2:[2]");
        let chi = FunctorRep::chi(&cat, &OutModule::trivial(&cat, c2, 1)).unwrap();
        assert_eq!(chi.dim(c4), 0);
        assert_eq!(chi.dim(c2), 1);
        let e = FunctorRep::e(&cat, &OutModule::trivial(&cat, c2, 1)).unwrap();
        assert_eq!(e.dim(c4), 1);
    }

    #[test]
    fn regular_generators_over_a_noncyclic_group() {
        let cat = EpiCategory::new(&quotients_family("2:[2,1]")).unwrap();
        for g in 0..cat.len() {
            let e = FunctorRep::e(&cat, &OutModule::regular(&cat, g)).unwrap();
            for k in 0..cat.len() {
                assert_eq!(e.dim(k), cat.epi_count(k, g));
            }
        }
    }
}
