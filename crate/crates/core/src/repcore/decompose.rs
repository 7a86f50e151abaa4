use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use super::category::EpiCategory;
use super::complex::{ChainMap, FunctorComplex};
use super::functor::{reduce, FunctorRep, NatTrans};
use super::linalg::{q, Matrix, Q};
use super::module::OutModule;
use crate::error::{Error, Result};

/// One peeling step: a map `χ_{G,V} → X` that is a quasi-isomorphism at `G`,
/// replaced by its cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeelStep {
    pub member: String,
    /// Graded dimensions of `V = H_*(X)(G)`.
    pub homology: BTreeMap<i64, usize>,
    pub support_after: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeelTrace {
    pub initial_support: Vec<String>,
    pub steps: Vec<PeelStep>,
}

impl PeelTrace {
    /// Each step removes exactly its member from the support, and the last
    /// step leaves nothing.
    pub fn is_valid(&self) -> bool {
        let mut current: BTreeSet<&String> = self.initial_support.iter().collect();
        for s in &self.steps {
            if !current.remove(&s.member) {
                return false;
            }
            let after: BTreeSet<&String> = s.support_after.iter().collect();
            if after != current {
                return false;
            }
        }
        current.is_empty()
    }
}

/// A `≫`-maximal member of `support`, ties broken by member order.
fn maximal(cat: &EpiCategory, support: &BTreeSet<usize>) -> usize {
    *support
        .iter()
        .find(|&&g| !support.iter().any(|&h| h != g && cat.epi_exists(h, g)))
        .expect("finite posets have maximal elements")
}

/// Basis `W` of a complement to the boundaries inside the cycles, and the
/// projection of cycles onto `W`-coordinates.
struct HomologyBasis {
    reps: Vec<Vec<Q>>,
    solver: Matrix,
    boundaries: usize,
}

impl HomologyBasis {
    fn new(d_out: &Matrix, d_in: &Matrix) -> Self {
        let dim = d_out.cols();
        let mut columns: Vec<Vec<Q>> = (0..d_in.cols()).map(|c| d_in.column(c)).collect();
        let split = columns.len();
        columns.extend(d_out.kernel());
        let (_, pivots) = Matrix::from_columns(dim, &columns).rref();
        let boundary: Vec<Vec<Q>> = pivots.iter().filter(|&&c| c < split).map(|&c| columns[c].clone()).collect();
        let reps: Vec<Vec<Q>> = pivots.iter().filter(|&&c| c >= split).map(|&c| columns[c].clone()).collect();
        let boundaries = boundary.len();
        let mut basis = boundary;
        basis.extend(reps.iter().cloned());
        Self {
            reps,
            solver: Matrix::from_columns(dim, &basis),
            boundaries,
        }
    }

    /// `W`-coordinates of each column of `cycles`.
    fn coords(&self, cycles: &Matrix) -> Matrix {
        let x = self.solver.solve_many(cycles).expect("cycles");
        Matrix::from_fn(self.reps.len(), cycles.cols(), |r, c| x[(self.boundaries + r, c)].clone())
    }
}

/// Peels a complex down to zero support, one `≫`-maximal member at a time.
pub fn chi_decompose(cat: &EpiCategory, x: &FunctorComplex) -> Result<PeelTrace> {
    let names = |s: &BTreeSet<usize>| s.iter().map(|&k| cat.names()[k].clone()).collect();
    let mut current = x.clone();
    let mut support = current.hsupp_oracle();
    let initial_support = names(&support);
    let mut steps = Vec::new();
    while !support.is_empty() {
        let g = maximal(cat, &support);
        let mut keep = vec![true; cat.len()];
        for h in cat.strict_up_set(g) {
            keep[h] = false;
        }
        let quotient = current.restrict_to(&keep);
        let (chi, map, homology) = peel_map(cat, &quotient, g)?;
        current = chi.cone(cat, &quotient, &map)?;
        let after = current.hsupp_oracle();
        let mut expected = support.clone();
        expected.remove(&g);
        if after != expected {
            return Err(Error::ClassificationViolation(format!(
                "peeling {} did not remove exactly that member",
                cat.names()[g]
            )));
        }
        support = after;
        steps.push(PeelStep {
            member: cat.names()[g].clone(),
            homology,
            support_after: names(&support),
        });
    }
    Ok(PeelTrace {
        initial_support,
        steps,
    })
}

/// The `χ` complex `H_*(Q)(G)` with zero differential and an `Out(G)`-equivariant
/// map into `Q` picking cycle representatives.
fn peel_map(
    cat: &EpiCategory,
    quotient: &FunctorComplex,
    g: usize,
) -> Result<(FunctorComplex, ChainMap, BTreeMap<i64, usize>)> {
    let out = cat.out_order(g);
    let mut chi = FunctorComplex::zero(cat);
    let mut comps = BTreeMap::new();
    let mut homology = BTreeMap::new();
    for n in quotient.degrees() {
        let hb = HomologyBasis::new(&quotient.diff(n, g), &quotient.diff(n + 1, g));
        let h = hb.reps.len();
        if h == 0 {
            continue;
        }
        homology.insert(n, h);
        let dim = quotient.dim(n, g);
        let section = Matrix::from_columns(dim, &hb.reps);
        let images: Vec<Matrix> = (0..out)
            .map(|t| quotient.restriction(n, g, g, t).mul(&section))
            .collect();
        let all = hb.coords(&Matrix::blocks(&[dim], &vec![h; out], |_, t| Some(images[t].clone())));
        let induced: Vec<Matrix> = (0..out)
            .map(|t| Matrix::from_fn(h, h, |r, c| all[(r, t * h + c)].clone()))
            .collect();
        let mut avg = Matrix::zeros(dim, h);
        for t in 0..out {
            let term = images[t].mul(&induced[cat.inverse(g, t)]);
            avg = avg.add(&term);
        }
        let avg = avg.scale(&q(out as i64).recip());
        let rep = FunctorRep::chi_from_action(cat, g, h, |t| induced[t].clone())?;
        chi = chi.sum(cat, &FunctorComplex::concentrated(cat, rep, n));
        let c = (0..cat.len())
            .map(|k| if k == g { avg.clone() } else { Matrix::zeros(quotient.dim(n, k), 0) })
            .collect();
        comps.insert(n, c);
    }
    Ok((chi, ChainMap { comps }, homology))
}

/// The fiber of `e_{G,V} → χ_{G,V}`, as a complex in degrees 0 and 1.
pub fn augmentation_fiber(cat: &EpiCategory, v: &OutModule) -> Result<FunctorComplex> {
    let g = v.object();
    let e = FunctorRep::e(cat, v)?;
    let chi = FunctorRep::chi(cat, v)?;
    let x = FunctorComplex::concentrated(cat, e.clone(), 0);
    let y = FunctorComplex::concentrated(cat, chi.clone(), 0);
    let comps: Vec<Matrix> = (0..cat.len())
        .map(|k| {
            if k == g {
                Matrix::identity(v.dim())
            } else {
                Matrix::zeros(chi.dim(k), e.dim(k))
            }
        })
        .collect();
    NatTrans { comps: comps.clone() }.check(cat, &e, &chi)?;
    let f = ChainMap {
        comps: [(0, comps)].into_iter().collect(),
    };
    // The fiber is the cone shifted down by one; supports agree.
    x.cone(cat, &y, &f)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetractionReport {
    pub members: usize,
    pub epis_checked: usize,
    pub relations_checked: usize,
}

/// Checks that `e_{G,U⊗V}` is a retract of `e_{G,U} ⊗ e_{G,V}` via
///
/// ```text
/// i([α] ⊗ (u ⊗ v)) = ([α] ⊗ u) ⊗ ([α] ⊗ v)
/// p(([α] ⊗ u) ⊗ ([β] ⊗ v)) = [α] ⊗ (u ⊗ θ⁻¹v)   if β = θα, else 0
/// ```
///
/// with `p ∘ i = 1` at every member, both maps natural, and `p` independent
/// of the chosen representatives.
pub fn verify_retraction(cat: &EpiCategory, u: &OutModule, v: &OutModule) -> Result<RetractionReport> {
    let g = u.object();
    if v.object() != g {
        return Err(Error::InvalidSpec("modules over different groups".into()));
    }
    let w = u.tensor(v);
    let (du, dv) = (u.dim(), v.dim());
    let ew = FunctorRep::e(cat, &w)?;
    let eu = FunctorRep::e(cat, u)?;
    let ev = FunctorRep::e(cat, v)?;
    let euv = eu.tensor(&ev);
    let basis = |d: usize, a: usize| -> Vec<Q> {
        let mut x = vec![Q::zero(); d];
        x[a] = q(1);
        x
    };
    let kron = |a: &[Q], b: &[Q]| -> Vec<Q> {
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
    };
    let p_formula = |k: usize, a: usize, x: &[Q], b: usize, y: &[Q]| -> Vec<Q> {
        match cat.relating_aut(k, g, a, b) {
            Some(t) => {
                let ty = v.act(cat.inverse(g, t)).apply(y);
                reduce(cat, &w, k, a, &kron(x, &ty))
            }
            None => vec![Q::zero(); ew.dim(k)],
        }
    };
    let mut i_comps = Vec::new();
    let mut p_comps = Vec::new();
    let mut relations = 0;
    for k in 0..cat.len() {
        let c = cat.orbit_count(k, g);
        let mut i_cols = Vec::new();
        for j in 0..c {
            let r = cat.orbit_rep(k, g, j);
            for a in 0..du {
                for b in 0..dv {
                    let left = reduce(cat, u, k, r, &basis(du, a));
                    let right = reduce(cat, v, k, r, &basis(dv, b));
                    i_cols.push(kron(&left, &right));
                }
            }
        }
        let i = Matrix::from_columns(euv.dim(k), &i_cols);
        let mut p_cols = Vec::new();
        for j in 0..c {
            for a in 0..du {
                for l in 0..c {
                    for b in 0..dv {
                        let (rj, rl) = (cat.orbit_rep(k, g, j), cat.orbit_rep(k, g, l));
                        p_cols.push(p_formula(k, rj, &basis(du, a), rl, &basis(dv, b)));
                    }
                }
            }
        }
        let p = Matrix::from_columns(ew.dim(k), &p_cols);
        if p.mul(&i) != Matrix::identity(ew.dim(k)) {
            return Err(Error::NaturalityViolation(format!(
                "p∘i is not the identity at {}",
                cat.names()[k]
            )));
        }
        // p evaluated on arbitrary representatives must agree with the matrix.
        let m = cat.epi_count(k, g);
        for a in 0..m {
            for b in 0..m {
                for x in 0..du {
                    for y in 0..dv {
                        let (ux, vy) = (basis(du, x), basis(dv, y));
                        let elem = kron(&reduce(cat, u, k, a, &ux), &reduce(cat, v, k, b, &vy));
                        if p.apply(&elem) != p_formula(k, a, &ux, b, &vy) {
                            return Err(Error::NaturalityViolation(format!(
                                "p depends on representatives at {}",
                                cat.names()[k]
                            )));
                        }
                        relations += 1;
                    }
                }
            }
        }
        i_comps.push(i);
        p_comps.push(p);
    }
    NatTrans { comps: i_comps }.check(cat, &ew, &euv)?;
    NatTrans { comps: p_comps }.check(cat, &euv, &ew)?;
    let epis_checked = (0..cat.len())
        .flat_map(|a| (0..cat.len()).map(move |b| (a, b)))
        .map(|(a, b)| cat.epi_count(a, b))
        .sum();
    Ok(RetractionReport {
        members: cat.len(),
        epis_checked,
        relations_checked: relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Member;
    use crate::repcore::category::tests::quotients_family;

    #[test]
    fn peeling_traces() {
        let cat = EpiCategory::new(&quotients_family("2:[1]")).unwrap();
        let one = cat.unit().unwrap();
        let c2 = 1 - one;
        let e = FunctorRep::e(&cat, &OutModule::regular(&cat, c2)).unwrap();
        let t = chi_decompose(&cat, &FunctorComplex::concentrated(&cat, e, 0)).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert!(t.is_valid());
        let u = FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 0);
        let t = chi_decompose(&cat, &u).unwrap();
        let order: Vec<&str> = t.steps.iter().map(|s| s.member.as_str()).collect();
        assert_eq!(order, [cat.names()[c2].as_str(), cat.names()[one].as_str()]);
        assert!(chi_decompose(&cat, &FunctorComplex::zero(&cat)).unwrap().steps.is_empty());
    }

    #[test]
    fn peeling_a_noncyclic_quotient_family() {
        let cat = EpiCategory::new(&quotients_family("2:[2,1]")).unwrap();
        let x = FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 0)
            .sum(&cat, &FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 3));
        let t = chi_decompose(&cat, &x).unwrap();
        assert_eq!(t.steps.len(), 5);
        assert!(t.is_valid());
        assert_eq!(t.steps[0].homology, [(0, 1), (3, 1)].into_iter().collect());
    }

    #[test]
    fn retraction_on_small_fixtures() {
        for g in ["2:[1]", "3:[1]"] {
            let cat = EpiCategory::new(&quotients_family(g)).unwrap();
            for h in 0..cat.len() {
                let mut mods = OutModule::irreducibles(&cat, h).unwrap();
                mods.push(OutModule::regular(&cat, h));
                for u in &mods {
                    for v in &mods {
                        verify_retraction(&cat, u, v).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn fiber_support_lies_strictly_above() {
        let cat = EpiCategory::new(&quotients_family("2:[2]")).unwrap();
        for g in 0..cat.len() {
            let fib = augmentation_fiber(&cat, &OutModule::trivial(&cat, g, 1)).unwrap();
            let above: BTreeSet<usize> = cat.strict_up_set(g).into_iter().collect();
            assert!(fib.hsupp_oracle().is_subset(&above));
        }
        let g = cat.index_of(&Member::Ab("2:[1]".parse().unwrap())).unwrap();
        let fib = augmentation_fiber(&cat, &OutModule::trivial(&cat, g, 1)).unwrap();
        assert!(!fib.hsupp_oracle().is_empty());
    }
}
