use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::catalog;
use crate::error::Error;

fn set(n: usize) -> Presheaf {
    catalog::finite_set(n)
}

#[test]
fn terminal_category_validates() {
    assert!(FinCategory::terminal().validate().is_ok());
}

#[test]
fn finite_set_validates() {
    assert!(set(4).validate().is_ok());
}

#[test]
fn broken_degeneracy_is_reported() {
    // a reflexive graph with one edge 0→1 whose degenerate loop on vertex 1
    // is claimed to sit on vertex 0
    let good = catalog::reflexive_graph(2, &[(0, 1)]).unwrap();
    let cat = good.base().clone();
    let s0 = cat.morphism_index("s0").unwrap();
    let mut actions = good.actions().to_vec();
    actions[s0] = vec![0, 0];
    let bad = Presheaf::from_parts_unchecked(cat.clone(), good.sizes().to_vec(), actions);
    let report = bad.validate();
    assert!(!report.is_ok());
    let named: Vec<&str> = report.violations().iter().map(|v| v.law).collect();
    assert!(named.contains(&"functoriality"), "{report}");
    assert!(
        report.violations().iter().any(|v| v.witness.contains("s0")),
        "{report}"
    );
}

#[test]
fn malformed_references_are_violations_not_panics() {
    let cat = Arc::new(FinCategory::terminal());
    let p = Presheaf::from_parts_unchecked(cat, vec![2], vec![vec![0, 5]]);
    assert!(!p.validate().is_ok());
}

#[test]
fn endomaps_of_the_interval() {
    let d1 = catalog::representable(&catalog::delta_le1(), 1);
    let maps = enumerate_maps(&d1, &d1).unwrap();
    assert_eq!(maps.len(), 3);
    assert!(maps.contains(&PresheafMap::identity(&d1)));

    // brute force over all component tables, kept when natural
    let mut oracle = 0;
    for v in 0..d1.size(0).pow(d1.size(0) as u32) {
        for e in 0..d1.size(1).pow(d1.size(1) as u32) {
            let c0: Vec<usize> = (0..d1.size(0)).map(|i| v / d1.size(0).pow(i as u32) % d1.size(0)).collect();
            let c1: Vec<usize> = (0..d1.size(1)).map(|i| e / d1.size(1).pow(i as u32) % d1.size(1)).collect();
            let m = PresheafMap::from_parts_unchecked(d1.clone(), d1.clone(), vec![c0, c1]);
            if m.validate().is_ok() {
                oracle += 1;
            }
        }
    }
    assert_eq!(oracle, 3);
}

#[test]
fn maps_between_finite_sets() {
    assert_eq!(enumerate_maps(&set(2), &set(3)).unwrap().len(), 9);
    let maps = enumerate_maps(&set(2), &set(2)).unwrap();
    let tables: Vec<_> = maps.iter().map(|m| m.component(0).to_vec()).collect();
    assert_eq!(tables, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
}

#[test]
fn empty_source_has_one_map() {
    let cat = catalog::delta_le2();
    let empty = Presheaf::empty(&cat);
    let d2 = catalog::representable(&cat, 2);
    assert_eq!(enumerate_maps(&empty, &d2).unwrap().len(), 1);
    assert_eq!(enumerate_maps(&d2, &empty).unwrap().len(), 0);
}

#[test]
fn mixed_bases_are_incompatible() {
    let d1 = catalog::representable(&catalog::delta_le1(), 1);
    assert!(matches!(enumerate_maps(&set(1), &d1), Err(Error::Incompatible(_))));
}

#[test]
fn composition_basics() {
    let f = PresheafMap::new(set(2), set(3), vec![vec![2, 0]]).unwrap();
    let id3 = PresheafMap::identity(&set(3));
    assert_eq!(id3.compose(&f).unwrap(), f);
    assert!(PresheafMap::identity(&set(3)).is_iso());
    assert!(!f.is_iso());
    assert!(matches!(f.compose(&f), Err(Error::Incompatible(_))));
    let swap = PresheafMap::new(set(2), set(2), vec![vec![1, 0]]).unwrap();
    assert_eq!(swap.inverse().unwrap().compose(&swap).unwrap(), PresheafMap::identity(&set(2)));
}

#[test]
fn counts_match_materialised_lists() {
    let cat = catalog::delta_le1();
    let x = catalog::reflexive_graph(2, &[(0, 1), (1, 0)]).unwrap();
    let y = catalog::reflexive_graph(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
    assert!(x.shares_base(&Presheaf::terminal(&cat)));
    let listed = enumerate_maps(&x, &y).unwrap();
    assert_eq!(count_maps_where(&x, &y, |_, _, _| true).unwrap(), listed.len());
    assert!(listed.iter().all(|m| m.validate().is_ok()));
    let mut sorted = listed.clone();
    sorted.sort_by(|a, b| a.components().cmp(b.components()));
    assert_eq!(sorted, listed);
}

fn small_graph() -> impl Strategy<Value = Presheaf> {
    (1usize..=3)
        .prop_flat_map(|v| (Just(v), prop::collection::vec((0..v, 0..v), 0..=2)))
        .prop_map(|(v, edges)| catalog::reflexive_graph(v, &edges).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_set_hom_count_is_a_power(a in 0usize..=3, b in 0usize..=3) {
        let n = enumerate_maps(&set(a), &set(b)).unwrap().len();
        prop_assert_eq!(n, b.pow(a as u32));
    }

    #[test]
    fn composition_is_associative_and_unital(x in small_graph(), y in small_graph(), z in small_graph(), pick in 0usize..1000) {
        let xy = enumerate_maps(&x, &y).unwrap();
        let yz = enumerate_maps(&y, &z).unwrap();
        let zx = enumerate_maps(&z, &x).unwrap();
        prop_assume!(!xy.is_empty() && !yz.is_empty() && !zx.is_empty());
        let f = &xy[pick % xy.len()];
        let g = &yz[pick % yz.len()];
        let h = &zx[pick % zx.len()];
        let left = h.compose(&g.compose(f).unwrap()).unwrap();
        let right = h.compose(g).unwrap().compose(f).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(left.validate().is_ok());
        prop_assert_eq!(&PresheafMap::identity(&y).compose(f).unwrap(), f);
        prop_assert_eq!(&f.compose(&PresheafMap::identity(&x)).unwrap(), f);
    }

    #[test]
    fn endomaps_contain_the_identity(x in small_graph()) {
        let maps = enumerate_maps(&x, &x).unwrap();
        prop_assert!(maps.contains(&PresheafMap::identity(&x)));
    }
}
