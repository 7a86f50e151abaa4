use proptest::prelude::*;
use ttgeo::abgroup::{
    epi_exists, oracle_epi_exists, oracle_quotient_classes, p_groups_up_to, product, quotient_classes,
};
use ttgeo::FinAbGroup;

const CAP: u128 = 1 << 14;

/// A p-group of order at most `p^4` for `p ∈ {2, 3}`.
fn small_p_group() -> impl Strategy<Value = FinAbGroup> {
    (prop::sample::select(vec![2u64, 3]), prop::collection::vec(1u32..=3, 0..=3))
        .prop_filter("order too large", |(_, parts)| parts.iter().sum::<u32>() <= 4)
        .prop_map(|(p, mut parts)| {
            parts.sort_unstable_by(|a, b| b.cmp(a));
            FinAbGroup::p_group(p, &parts).unwrap()
        })
}

/// A group with both 2- and 3-parts, of order at most 72.
fn small_group() -> impl Strategy<Value = FinAbGroup> {
    (prop::collection::vec(1i64..=12, 0..=2)).prop_filter_map("order too large", |orders| {
        let g = FinAbGroup::canonicalize(&orders).ok()?;
        (g.order() <= 72).then_some(g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epi_is_reflexive(g in small_group()) {
        prop_assert!(epi_exists(&g, &g));
        prop_assert!(epi_exists(&g, &FinAbGroup::trivial()));
    }

    #[test]
    fn epi_agrees_with_element_oracle(g in small_p_group(), h in small_p_group()) {
        prop_assert_eq!(epi_exists(&g, &h), oracle_epi_exists(&g, &h, CAP).unwrap());
    }

    #[test]
    fn epi_is_transitive(g in small_p_group(), h in small_p_group(), k in small_p_group()) {
        if epi_exists(&g, &h) && epi_exists(&h, &k) {
            prop_assert!(epi_exists(&g, &k));
        }
    }

    #[test]
    fn epi_is_antisymmetric(g in small_group(), h in small_group()) {
        if epi_exists(&g, &h) && epi_exists(&h, &g) {
            prop_assert_eq!(g, h);
        }
    }

    #[test]
    fn epi_divides_orders(g in small_group(), h in small_group()) {
        if epi_exists(&g, &h) {
            prop_assert_eq!(g.order() % h.order(), 0);
        }
    }

    #[test]
    fn product_laws(g in small_group(), h in small_group(), k in small_group()) {
        prop_assert_eq!(product(&g, &h), product(&h, &g));
        prop_assert_eq!(product(&product(&g, &h), &k), product(&g, &product(&h, &k)));
        prop_assert_eq!(product(&g, &FinAbGroup::trivial()), g.clone());
        let gh = product(&g, &h);
        prop_assert_eq!(gh.order(), g.order() * h.order());
        prop_assert!(epi_exists(&gh, &g) && epi_exists(&gh, &h));
        let mut orders: Vec<i64> = g.invariant_factors().into_iter().map(|n| n as i64).collect();
        orders.extend(h.invariant_factors().into_iter().map(|n| n as i64));
        prop_assert_eq!(FinAbGroup::canonicalize(&orders).unwrap(), gh);
    }

    #[test]
    fn products_preserve_epis(g in small_p_group(), h in small_p_group(), k in small_p_group()) {
        if epi_exists(&g, &h) {
            prop_assert!(epi_exists(&product(&g, &k), &product(&h, &k)));
        }
    }

    #[test]
    fn quotients_match_oracle(g in small_p_group()) {
        let mut fast = quotient_classes(&g);
        let mut slow = oracle_quotient_classes(&g, CAP).unwrap();
        fast.sort();
        slow.sort();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn display_round_trips(g in small_group()) {
        let parsed: FinAbGroup = g.to_string().parse().unwrap();
        prop_assert_eq!(parsed, g.clone());
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<FinAbGroup>(&json).unwrap(), g);
    }
}

#[test]
fn p_groups_are_listed_once() {
    for p in [2u64, 3] {
        let all = p_groups_up_to(p, 81);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert!(all.iter().all(|g| g.order() <= 81 && (g.is_trivial() || g.is_p_group(p))));
    }
    // Partitions of 0..=4 give 1 + 1 + 2 + 3 + 5 groups of order at most 16.
    assert_eq!(p_groups_up_to(2, 16).len(), 12);
}
