use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use ttgeo::family::ExtensionalTable;
use ttgeo::repcore::{
    augmentation_fiber, chi_decompose, q, realize, ChainMap, ComplexFixture, EpiCategory, FunctorComplex,
    FunctorRep, Matrix, OutModule,
};
use ttgeo::ttsupport::{hsupp, random_expr, ObjectExpr, Support};
use ttgeo::{Family, FamilySpec};

fn quotients_of(g: &str) -> (Family, EpiCategory) {
    let table = ExtensionalTable::from_quotients_of(&g.parse().unwrap());
    let f = Family::new(FamilySpec::Extensional(table)).unwrap();
    let cat = EpiCategory::new(&f).unwrap();
    (f, cat)
}

fn setting(which: usize) -> (Family, EpiCategory) {
    quotients_of(["2:[1,1]", "3:[1]", "2:[2]"][which])
}

fn exprs(f: &Family, seed: u64) -> (ObjectExpr, ObjectExpr) {
    let mut rng = StdRng::seed_from_u64(seed);
    (
        random_expr(f, &mut rng, 2, 8).unwrap(),
        random_expr(f, &mut rng, 2, 8).unwrap(),
    )
}

fn convolve(a: &BTreeMap<i64, usize>, b: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            *out.entry(i + j).or_default() += x * y;
        }
    }
    out.retain(|_, v| *v > 0);
    out
}

fn add(a: &BTreeMap<i64, usize>, b: &BTreeMap<i64, usize>, shift: i64) -> BTreeMap<i64, usize> {
    let mut out = a.clone();
    for (i, y) in b {
        *out.entry(i + shift).or_default() += y;
    }
    out
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, c), r).prop_map(|rows| Matrix::from_rows(&rows))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn realized_homology_obeys_kunneth(which in 0usize..3, seed in any::<u64>()) {
        let (f, cat) = setting(which);
        let (x, y) = exprs(&f, seed);
        let (cx, cy) = (realize(&cat, &x).unwrap(), realize(&cat, &y).unwrap());
        let ct = realize(&cat, &ObjectExpr::tensor(x.clone(), y.clone())).unwrap();
        let cs = realize(&cat, &ObjectExpr::sum(x.clone(), y.clone())).unwrap();
        let csh = realize(&cat, &ObjectExpr::shift(x)).unwrap();
        for k in 0..cat.len() {
            let (hx, hy) = (cx.homology_at(k), cy.homology_at(k));
            prop_assert_eq!(ct.homology_at(k), convolve(&hx, &hy));
            prop_assert_eq!(cs.homology_at(k), add(&hx, &hy, 0));
            prop_assert_eq!(csh.homology_at(k), add(&BTreeMap::new(), &hx, 1));
            prop_assert_eq!(ct.euler_characteristic(k), cx.euler_characteristic(k) * cy.euler_characteristic(k));
        }
    }

    #[test]
    fn realized_support_matches_calculus(which in 0usize..3, seed in any::<u64>()) {
        let (f, cat) = setting(which);
        let (x, _) = exprs(&f, seed);
        let oracle: BTreeSet<String> = realize(&cat, &x)
            .unwrap()
            .hsupp_oracle()
            .into_iter()
            .map(|k| cat.names()[k].clone())
            .collect();
        let Support::Clopen(c) = hsupp(&f, &x).unwrap() else {
            panic!("extensional supports are clopen")
        };
        let calculus: BTreeSet<String> = c.members().iter().map(|m| m.label()).collect();
        prop_assert_eq!(oracle, calculus);
    }

    #[test]
    fn cones_are_additive(which in 0usize..3, seed in any::<u64>()) {
        let (f, cat) = setting(which);
        let (x, y) = exprs(&f, seed);
        let (cx, cy) = (realize(&cat, &x).unwrap(), realize(&cat, &y).unwrap());
        let zero = ChainMap { comps: BTreeMap::new() };
        let cone = cx.cone(&cat, &cy, &zero).unwrap();
        let id = cx.cone(&cat, &cx, &cx.identity_map()).unwrap();
        for k in 0..cat.len() {
            prop_assert_eq!(cone.euler_characteristic(k), cy.euler_characteristic(k) - cx.euler_characteristic(k));
            prop_assert_eq!(cone.homology_at(k), add(&cy.homology_at(k), &cx.homology_at(k), 1));
            prop_assert_eq!(id.euler_characteristic(k), 0);
        }
        prop_assert!(id.hsupp_oracle().is_empty());
    }

    #[test]
    fn peeling_removes_one_member_per_step(which in 0usize..3, seed in any::<u64>()) {
        let (f, cat) = setting(which);
        let (x, _) = exprs(&f, seed);
        let c = realize(&cat, &x).unwrap();
        let trace = chi_decompose(&cat, &c).unwrap();
        prop_assert!(trace.is_valid());
        prop_assert_eq!(trace.steps.len(), c.hsupp_oracle().len());
        for step in &trace.steps {
            let k = cat.names().iter().position(|n| *n == step.member).unwrap();
            prop_assert_eq!(&step.homology, &c.homology_at(k));
        }
    }

    #[test]
    fn fixtures_round_trip(which in 0usize..3, seed in any::<u64>()) {
        let (f, cat) = setting(which);
        let (x, _) = exprs(&f, seed);
        let c = realize(&cat, &x).unwrap();
        let fixture = ComplexFixture::from_complex(&cat, &c).unwrap();
        let json = serde_json::to_string(&fixture).unwrap();
        let back: ComplexFixture = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &fixture);
        prop_assert_eq!(back.to_complex(&cat).unwrap(), c);
    }

    #[test]
    fn rank_and_nullity(m in matrix()) {
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(|x| *x == q(0)));
        }
    }

    #[test]
    fn solving_is_exact(a in matrix(), cols in 1usize..4, seed in any::<u64>()) {
        let x = Matrix::from_fn(a.cols(), cols, |i, j| q(((seed >> ((i * 3 + j) % 60)) & 7) as i64 - 3));
        let b = a.mul(&x);
        let solved = a.solve_many(&b).unwrap();
        prop_assert_eq!(a.mul(&solved), b);
        if a.rows() == a.cols() {
            if let Some(inv) = a.inverse() {
                prop_assert_eq!(a.mul(&inv), Matrix::identity(a.rows()));
                prop_assert_eq!(a.rank(), a.rows());
            } else {
                prop_assert!(a.rank() < a.rows());
            }
        }
    }
}

#[test]
fn augmentation_fibers_live_strictly_above() {
    for g in ["2:[1,1]", "3:[1]", "2:[2,1]"] {
        let (_, cat) = quotients_of(g);
        for h in 0..cat.len() {
            // Irreducibles are only enumerated for small automorphism groups.
            let mut mods = OutModule::irreducibles(&cat, h).unwrap_or_else(|_| vec![OutModule::trivial(&cat, h, 1)]);
            mods.push(OutModule::regular(&cat, h));
            let above: BTreeSet<usize> = cat.strict_up_set(h).into_iter().collect();
            for v in &mods {
                let fib = augmentation_fiber(&cat, v).unwrap();
                assert!(fib.hsupp_oracle().is_subset(&above), "{} escapes", cat.names()[h]);
                let (e, chi) = (FunctorRep::e(&cat, v).unwrap(), FunctorRep::chi(&cat, v).unwrap());
                for k in 0..cat.len() {
                    // The cone of e -> chi, so chi(cone) = dim chi - dim e pointwise.
                    let expected = chi.dim(k) as i64 - e.dim(k) as i64;
                    assert_eq!(fib.euler_characteristic(k), expected);
                }
            }
        }
    }
}

#[test]
fn zero_and_unit_complexes() {
    let (_, cat) = setting(0);
    let zero = FunctorComplex::zero(&cat);
    assert!(zero.hsupp_oracle().is_empty());
    let unit = FunctorComplex::concentrated(&cat, FunctorRep::unit(&cat), 0);
    assert_eq!(unit.hsupp_oracle().len(), cat.len());
    for k in 0..cat.len() {
        assert_eq!(unit.homology_at(k), BTreeMap::from([(0, 1)]));
    }
}
