//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, SeedableRng};

use ttgeo::abgroup::oracle::oracle_epi_exists;
use ttgeo::abgroup::{epi_exists, floor_log, p_groups_up_to, primes_up_to, FinAbGroup};
use ttgeo::family::ExtensionalTable;
use ttgeo::repcore::{
    augmentation_fiber, chi_decompose, realize, verify_retraction, EpiCategory, OutModule, RankWindow,
};
use ttgeo::spectrum::{
    cb_rank, is_isolated, limit_points, point_space, space_description, CbRank, Coord, Decision,
    ProfinitePoint, SpaceDesc,
};
use ttgeo::ttsupport::{
    classify_ideals, ideal_of, krull_chain, random_expr, vi_class, NatSet, ObjectExpr, PrimeIdeal,
};
use ttgeo::{Family, FamilySpec, Member};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fam(spec: FamilySpec) -> Family {
    Family::new(spec).expect("valid family")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {t:.2?}, budget {budget:.0?}"))
}

fn quotients_of(g: &FinAbGroup) -> Family {
    fam(FamilySpec::Extensional(ExtensionalTable::from_quotients_of(g)))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for p in [2, 3] {
        let groups = p_groups_up_to(p, 64);
        for g in &groups {
            for h in &groups {
                let fast = epi_exists(g, h);
                let slow = oracle_epi_exists(g, h, 4096).map_err(|e| e.to_string())?;
                ensure(fast == slow, || format!("disagreement on {g} ->> {h}"))?;
                pairs += 1;
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{pairs} ordered pairs agree in {:.2?}", start.elapsed()))
}

fn elementary_spectrum(window: &RankWindow) -> Outcome {
    let start = Instant::now();
    let e = fam(FamilySpec::ElementaryAbelian { p: 2 });
    ensure(space_description(&e).ok() == Some(SpaceDesc::NaturalsWithClosedPoint), || {
        "space is not N with a closed point".into()
    })?;
    let pts = point_space(&e, 12).map_err(|e| e.to_string())?;
    let ranks: Vec<usize> = pts.finite.iter().map(|m| m.group().unwrap().rank()).collect();
    ensure(ranks == (0..=12).collect::<Vec<_>>(), || format!("finite points {ranks:?}"))?;
    ensure(pts.extra_closed_point.is_some() && pts.symbolic.is_empty(), || {
        "expected exactly one extra closed point".into()
    })?;
    let c = classify_ideals(&e).map_err(|e| e.to_string())?;
    ensure(c.lattice == "all subsets of ℕ, plus the whole space", || {
        format!("lattice reads {:?}", c.lattice)
    })?;
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..200 {
        let x = random_expr(&e, &mut rng, 4, 8).map_err(|e| e.to_string())?;
        let class = vi_class(&e, &x).map_err(|e| e.to_string())?;
        ensure(class.is_empty() || class.is_cofinite(), || format!("{x}: class {class}"))?;
        let sq = vi_class(&e, &ObjectExpr::tensor(x.clone(), x.clone())).map_err(|e| e.to_string())?;
        ensure(sq == class, || format!("{x}: class of square differs"))?;
        let seen = window.support(&x).map_err(|e| e.to_string())?;
        let expect: BTreeSet<u64> = (0..=window.max_rank() as u64).filter(|&n| class.contains(n)).collect();
        ensure(seen == expect, || format!("{x}: pointwise homology {seen:?} vs class {class}"))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("200 random objects classified in {:.2?}", start.elapsed()))
}

/// Restriction of an expression to the members of rank `<= max`.
fn restrict(x: &ObjectExpr, max: usize) -> ObjectExpr {
    let rank = |m: &Member| m.group().map_or(0, FinAbGroup::rank);
    match x {
        ObjectExpr::Gen(g) | ObjectExpr::GenTwisted(g, _) if rank(g) > max => ObjectExpr::Zero,
        ObjectExpr::AugCone(g) if rank(g) > max => ObjectExpr::Unit,
        ObjectExpr::Shift(y) => ObjectExpr::shift(restrict(y, max)),
        ObjectExpr::Sum(a, b) => ObjectExpr::sum(restrict(a, max), restrict(b, max)),
        ObjectExpr::Tensor(a, b) => ObjectExpr::tensor(restrict(a, max), restrict(b, max)),
        other => other.clone(),
    }
}

fn vi_classification(window: &RankWindow) -> Outcome {
    let start = Instant::now();
    let e = fam(FamilySpec::ElementaryAbelian { p: 2 });
    let elem = |n: usize| Member::Ab(FinAbGroup::elementary(2, n).unwrap());
    let mut classes: BTreeMap<NatSet, ObjectExpr> = BTreeMap::new();
    for n in 0..=6 {
        for x in [ObjectExpr::Gen(elem(n)), ObjectExpr::AugCone(elem(n))] {
            let c = vi_class(&e, &x).map_err(|e| e.to_string())?;
            classes.entry(c).or_insert(x);
        }
    }
    loop {
        let reps: Vec<ObjectExpr> = classes.values().cloned().collect();
        let before = classes.len();
        for a in &reps {
            for b in &reps {
                for x in [ObjectExpr::sum(a.clone(), b.clone()), ObjectExpr::tensor(a.clone(), b.clone())] {
                    let c = vi_class(&e, &x).map_err(|e| e.to_string())?;
                    classes.entry(c).or_insert(x);
                }
            }
        }
        if classes.len() == before {
            break;
        }
    }
    let mut target = BTreeSet::from([NatSet::empty()]);
    for mask in 0u32..(1 << 7) {
        target.insert(NatSet::all_but((0..7).filter(|i| mask & (1 << i) != 0)));
    }
    let got: BTreeSet<NatSet> = classes.keys().cloned().collect();
    ensure(got == target, || {
        format!("{} classes, {} expected", got.len(), target.len())
    })?;
    // Pointwise homology over ranks 0..=7 separates every class.
    let mut seen = BTreeSet::new();
    for (class, x) in &classes {
        let s = window.support(x).map_err(|e| e.to_string())?;
        let expect: BTreeSet<u64> = (0..=window.max_rank() as u64).filter(|&n| class.contains(n)).collect();
        ensure(s == expect, || format!("{x}: pointwise {s:?} vs {class}"))?;
        seen.insert(s);
    }
    ensure(seen.len() == classes.len(), || "pointwise supports collide".into())?;
    // Explicit complexes on the truncation to ranks <= 2.
    let trunc = quotients_of(&FinAbGroup::elementary(2, 2).unwrap());
    let cat = EpiCategory::new(&trunc).map_err(|e| e.to_string())?;
    for (class, x) in &classes {
        let c = realize(&cat, &restrict(x, 2)).map_err(|e| e.to_string())?;
        let s: BTreeSet<u64> = c.hsupp_oracle().iter().map(|&k| cat.group(k).rank() as u64).collect();
        let expect: BTreeSet<u64> = (0..=2).filter(|&n| class.contains(n)).collect();
        ensure(s == expect, || format!("{x}: complex support {s:?} vs {class}"))?;
    }
    Ok(format!(
        "{} classes, bijective onto the target, homology agrees ({:.2?})",
        classes.len(),
        start.elapsed()
    ))
}

fn monotone_vectors_space() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for r in 1..=3usize {
        let f = fam(FamilySpec::AbelianPRank { p: 2, r });
        let stage = 32;
        let pts = point_space(&f, stage).map_err(|e| e.to_string())?;
        let limits = limit_points(&f, stage).map_err(|e| e.to_string())?;
        let mut got: BTreeSet<String> = pts.finite.iter().map(|m| m.to_string()).collect();
        got.extend(pts.symbolic.iter().chain(&limits).map(|x| x.to_string()));
        let mut expect = BTreeSet::new();
        let mut vectors = vec![Vec::new()];
        for _ in 0..r {
            vectors = vectors
                .into_iter()
                .flat_map(|v: Vec<Coord>| {
                    let bound = v.last().copied().unwrap_or(Coord::Inf);
                    (0..=5)
                        .map(Coord::Fin)
                        .chain([Coord::Inf])
                        .filter(move |c| *c <= bound)
                        .map(move |c| {
                            let mut w = v.clone();
                            w.push(c);
                            w
                        })
                })
                .collect();
        }
        for v in &vectors {
            let x = ProfinitePoint::vector(2, v).map_err(|e| e.to_string())?;
            expect.insert(x.to_string());
            let finite = v.iter().all(|c| !c.is_inf());
            let iso = is_isolated(&f, &x).map_err(|e| e.to_string())?;
            ensure(iso == finite, || format!("isolation of {x} is {iso}"))?;
        }
        ensure(got == expect, || {
            format!("r = {r}: {} points, {} expected", got.len(), expect.len())
        })?;
        total += got.len();
    }
    for r in 1..=4 {
        let rank = cb_rank(&SpaceDesc::MonotoneVectors { r }).map_err(|e| e.to_string())?;
        ensure(rank == CbRank::Finite(r as u64), || format!("rank of S_<={r} is {rank}"))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{total} points match, ranks 1..4 ({:.2?})", start.elapsed()))
}

fn cyclic_families() -> Outcome {
    let start = Instant::now();
    let cp = fam(FamilySpec::CyclicP { p: 2 });
    ensure(space_description(&cp).ok() == Some(SpaceDesc::nat_plus()), || "cyclic_p space".into())?;
    let zp = ProfinitePoint::parse("2:[inf]").map_err(|e| e.to_string())?;
    let tors = PrimeIdeal::of_point(&cp, zp).map_err(|e| e.to_string())?;
    let top = FinAbGroup::cyclic(32).unwrap();
    let trunc = quotients_of(&top);
    let cat = EpiCategory::new(&trunc).map_err(|e| e.to_string())?;
    let top_idx = cat.index_of(&Member::Ab(top)).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(5);
    let mut in_prime = 0;
    for _ in 0..100 {
        let x = random_expr(&cp, &mut rng, 3, 8).map_err(|e| e.to_string())?;
        let member = tors.contains(&x).map_err(|e| e.to_string())?;
        // Atoms have exponent at most 8, so X(C_32) decides the tail.
        let c = realize(&cat, &x).map_err(|e| e.to_string())?;
        let eventually_empty = c.homology_at(top_idx).is_empty();
        ensure(member == eventually_empty, || format!("{x}: prime {member}, tail {eventually_empty}"))?;
        in_prime += usize::from(member);
    }
    let cpo = fam(FamilySpec::CyclicPrimeOrder);
    ensure(space_description(&cpo).ok() == Some(SpaceDesc::nat_plus()), || {
        "cyclic_prime_order space".into()
    })?;
    let trivial = ProfinitePoint::group(FinAbGroup::trivial());
    ensure(!is_isolated(&cpo, &trivial).map_err(|e| e.to_string())?, || {
        "trivial group should be the accumulation point".into()
    })?;
    for p in primes_up_to(50) {
        let x = ProfinitePoint::group(FinAbGroup::cyclic(p).unwrap());
        ensure(is_isolated(&cpo, &x).map_err(|e| e.to_string())?, || format!("C_{p} not isolated"))?;
    }
    let call = fam(FamilySpec::CyclicAll { max_prime: Some(11) });
    ensure(
        space_description(&call).ok()
            == Some(SpaceDesc::FiniteProduct {
                factors: vec![SpaceDesc::MonotoneVectors { r: 1 }; 5],
            }),
        || "cyclic_all space".into(),
    )?;
    let mut stages = 0;
    for n in call.stage_indices(200).map_err(|e| e.to_string())? {
        let stage = call.stage(n).map_err(|e| e.to_string())?;
        let got: BTreeSet<FinAbGroup> = stage.members.iter().map(|m| m.group().unwrap().clone()).collect();
        let mut expect = BTreeSet::from([FinAbGroup::trivial()]);
        for p in primes_up_to(11) {
            let powers: Vec<u64> = (0..=floor_log(p, n)).map(|e| p.pow(e)).collect();
            expect = expect
                .iter()
                .flat_map(|g| {
                    powers.iter().map(move |&q| {
                        ttgeo::abgroup::product(g, &FinAbGroup::cyclic(q).unwrap())
                    })
                })
                .collect();
        }
        ensure(got == expect, || format!("stage {n}: {} members, {} expected", got.len(), expect.len()))?;
        stages += 1;
    }
    Ok(format!(
        "{in_prime}/100 in the torsion prime, {stages} stages of C(p<=11) match ({:.2?})",
        start.elapsed()
    ))
}

fn essentially_finite_engine() -> Outcome {
    let start = Instant::now();
    let f = quotients_of(&"2:[2,1]".parse().unwrap());
    let cat = EpiCategory::new(&f).map_err(|e| e.to_string())?;
    ensure(cat.len() == 5, || format!("{} members", cat.len()))?;
    let mut rng = StdRng::seed_from_u64(6);
    let mut contained = 0;
    let mut steps = 0;
    for _ in 0..100 {
        let x = random_expr(&f, &mut rng, 3, 8).map_err(|e| e.to_string())?;
        let y = random_expr(&f, &mut rng, 3, 8).map_err(|e| e.to_string())?;
        let (cx, cy) = (
            realize(&cat, &x).map_err(|e| e.to_string())?,
            realize(&cat, &y).map_err(|e| e.to_string())?,
        );
        let (sx, sy) = (cx.hsupp_oracle(), cy.hsupp_oracle());
        let ideal = ideal_of(&f, std::slice::from_ref(&y)).map_err(|e| e.to_string())?;
        let member = ideal.contains(&x, 64).map_err(|e| e.to_string())?;
        ensure(member == Decision::from_bool(sx.is_subset(&sy)), || {
            format!("{x} in <{y}>: {member:?}, supports {sx:?} / {sy:?}")
        })?;
        contained += usize::from(member == Decision::Yes);
        for (c, s) in [(&cx, &sx), (&cy, &sy)] {
            let trace = chi_decompose(&cat, c).map_err(|e| e.to_string())?;
            ensure(trace.is_valid() && trace.steps.len() == s.len(), || {
                "invalid peeling trace".into()
            })?;
            steps += trace.steps.len();
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "100 pairs, {contained} memberships, {steps} peeling steps ({:.2?})",
        start.elapsed()
    ))
}

fn generator_identities() -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    for g in ["2:[1]", "3:[1]"] {
        let f = quotients_of(&g.parse().unwrap());
        let cat = EpiCategory::new(&f).map_err(|e| e.to_string())?;
        for h in 0..cat.len() {
            let mut mods = OutModule::irreducibles(&cat, h).map_err(|e| e.to_string())?;
            mods.push(OutModule::regular(&cat, h));
            for u in &mods {
                for v in &mods {
                    verify_retraction(&cat, u, v).map_err(|e| e.to_string())?;
                    triples += 1;
                }
                let fib = augmentation_fiber(&cat, u).map_err(|e| e.to_string())?;
                let above: BTreeSet<usize> = cat.strict_up_set(h).into_iter().collect();
                ensure(fib.hsupp_oracle().is_subset(&above), || {
                    format!("fiber support escapes the strict up-set of {}", cat.names()[h])
                })?;
            }
        }
    }
    Ok(format!("{triples} retractions verified ({:.2?})", start.elapsed()))
}

fn krull_chain_in_abelian_p_groups() -> Outcome {
    let start = Instant::now();
    let a = fam(FamilySpec::AbelianP { p: 2 });
    let chain = krull_chain(&a, 8).map_err(|e| e.to_string())?;
    let built = start.elapsed();
    ensure(chain.len() == 8, || format!("{} links", chain.len()))?;
    for link in &chain {
        ensure(matches!(link.prime, PrimeIdeal::FamilyPrime { .. }), || "not a family prime".into())?;
        ensure(link.is_strict(), || format!("link {} is not strict", link.level))?;
        // Independently: Z/2^l is no quotient of Z/2^(l-1), but is one of itself.
        let l = link.level;
        let w = FinAbGroup::p_group(2, &[l]).unwrap();
        let below = FinAbGroup::p_group(2, &[l - 1]).unwrap();
        ensure(
            !oracle_epi_exists(&below, &w, 1 << 16).map_err(|e| e.to_string())?
                && oracle_epi_exists(&w, &w, 1 << 16).map_err(|e| e.to_string())?,
            || format!("witness at level {l} fails the element check"),
        )?;
    }
    ensure(built < Duration::from_secs(1), || format!("took {built:.2?}, budget 1s"))?;
    Ok(format!(
        "8 strict links in {built:.2?}, witnesses checked in {:.2?}",
        start.elapsed() - built
    ))
}

fn main() -> ExitCode {
    let window = RankWindow::new(&fam(FamilySpec::ElementaryAbelian { p: 2 }), 7).expect("rank window");
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("elementary abelian spectrum", Box::new(|| elementary_spectrum(&window))),
        ("VI classification", Box::new(|| vi_classification(&window))),
        ("monotone vector spaces", Box::new(monotone_vectors_space)),
        ("cyclic families", Box::new(cyclic_families)),
        ("essentially finite engine", Box::new(essentially_finite_engine)),
        ("generator identities", Box::new(generator_identities)),
        ("Krull chain", Box::new(krull_chain_in_abelian_p_groups)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
