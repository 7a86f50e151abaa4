use super::category::EpiCategory;
use super::complex::{ChainMap, FunctorComplex};
use super::functor::FunctorRep;
use super::linalg::{q, Matrix};
use super::module::OutModule;
use crate::error::{Error, Result};
use crate::ttsupport::ObjectExpr;

/// Builds an explicit complex for `x`: `Gen` and `Chi` use the regular
/// module, `GenTwisted(G, d)` the trivial module of dimension `d`, and
/// `AugCone(G)` the cone of `e_{G,k} → 𝟙` sending each orbit to `1`.
pub fn realize(cat: &EpiCategory, x: &ObjectExpr) -> Result<FunctorComplex> {
    let at0 = |rep| Ok(FunctorComplex::concentrated(cat, rep, 0));
    match x {
        ObjectExpr::Zero => Ok(FunctorComplex::zero(cat)),
        ObjectExpr::Unit => at0(FunctorRep::unit(cat)),
        ObjectExpr::Gen(g) => {
            let g = cat.index_of(g)?;
            at0(FunctorRep::e(cat, &OutModule::regular(cat, g))?)
        }
        ObjectExpr::GenTwisted(g, d) => {
            let g = cat.index_of(g)?;
            if *d == 0 {
                return Err(Error::InvalidSpec("twisted generators need a positive dimension".into()));
            }
            at0(FunctorRep::e(cat, &OutModule::trivial(cat, g, *d as usize))?)
        }
        ObjectExpr::Chi(g) => {
            let g = cat.index_of(g)?;
            at0(FunctorRep::chi(cat, &OutModule::regular(cat, g))?)
        }
        ObjectExpr::AugCone(g) => {
            let g = cat.index_of(g)?;
            let e = FunctorRep::e(cat, &OutModule::trivial(cat, g, 1))?;
            let comps = (0..cat.len())
                .map(|k| Matrix::from_fn(1, e.dim(k), |_, _| q(1)))
                .collect();
            let src = FunctorComplex::concentrated(cat, e, 0);
            let dst = FunctorComplex::concentrated(cat, FunctorRep::unit(cat), 0);
            let f = ChainMap {
                comps: [(0, comps)].into_iter().collect(),
            };
            src.cone(cat, &dst, &f)
        }
        ObjectExpr::Shift(y) => Ok(realize(cat, y)?.shift()),
        ObjectExpr::Sum(a, b) => Ok(realize(cat, a)?.sum(cat, &realize(cat, b)?)),
        ObjectExpr::Tensor(a, b) => {
            let t = realize(cat, a)?.tensor(&realize(cat, b)?);
            t.check_differentials(cat)?;
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::family::Member;
    use crate::repcore::category::tests::quotients_family;
    use crate::ttsupport::{hsupp, parse_expr, Support};

    fn calculus_support(cat: &EpiCategory, x: &ObjectExpr) -> BTreeSet<usize> {
        let Support::Clopen(c) = hsupp(cat.family(), x).unwrap() else {
            panic!("extensional supports are clopen")
        };
        c.members().iter().map(|m| cat.index_of(m).unwrap()).collect()
    }

    #[test]
    fn realizations_match_the_support_calculus() {
        let f = quotients_family("2:[2]");
        let cat = EpiCategory::new(&f).unwrap();
        for s in [
            "aug[2:[1]]",
            "aug[1]",
            "e[2:[1]] (x) aug[2:[2]]",
            "chi[2:[1]] (+) shift e[2:[2]|2]",
            "(unit (+) aug[2:[1]]) (x) shift aug[2:[2]]",
        ] {
            let x = parse_expr(&f, s).unwrap();
            let c = realize(&cat, &x).unwrap();
            assert_eq!(c.hsupp_oracle(), calculus_support(&cat, &x), "{s}");
        }
    }

    #[test]
    fn augmentation_cone_over_c2() {
        let f = quotients_family("2:[1]");
        let cat = EpiCategory::new(&f).unwrap();
        let x = ObjectExpr::aug(Member::Ab("2:[1]".parse().unwrap()));
        let c = realize(&cat, &x).unwrap();
        assert_eq!(c.hsupp_oracle(), [cat.unit().unwrap()].into_iter().collect());
    }
}
