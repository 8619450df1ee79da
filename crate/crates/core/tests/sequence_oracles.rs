//! End-to-end checks of the Garner and classical sequences against answers
//! computed directly from the input map.

use algsoa::algebra::{check_bijection, count_lifting_tables, enumerate_algebra_structures};
use algsoa::arrow::{ArrowObj, GeneratingSet, Square};
use algsoa::catalog;
use algsoa::onestep::{build_onestep, onestep_on_square};
use algsoa::presheaf::{enumerate_maps, PresheafMap};
use algsoa::sequence::{build_comparison, run_garner, run_sequence, Mode, OrdinalBudget};
use proptest::prelude::*;

fn arb_function(max: usize) -> impl Strategy<Value = ArrowObj> {
    (0..=max, 1..=max).prop_flat_map(|(c, d)| {
        prop::collection::vec(0..d, c).prop_map(move |v| ArrowObj::from(catalog::function(c, d, &v).unwrap()))
    })
}

fn image_size(g: &ArrowObj) -> usize {
    let mut hit = vec![false; g.codomain().size(0)];
    for &v in g.map().component(0) {
        hit[v] = true;
    }
    hit.into_iter().filter(|&h| h).count()
}

/// `K ≅ C ⊔ D` under `λ` and `ρ` exactly when λ is injective, |K| = |C|+|D|,
/// and ρ maps the complement of the image of λ bijectively onto D.
fn is_cograph(g: &ArrowObj, lambda: &PresheafMap, rho: &PresheafMap) -> bool {
    let (c, d) = (g.domain().size(0), g.codomain().size(0));
    let k = lambda.target().size(0);
    if !lambda.is_injective() || k != c + d {
        return false;
    }
    let in_image: Vec<bool> = (0..k).map(|e| lambda.component(0).contains(&e)).collect();
    let mut seen = vec![false; d];
    for e in (0..k).filter(|&e| !in_image[e]) {
        let y = rho.apply(0, e);
        if std::mem::replace(&mut seen[y], true) {
            return false;
        }
    }
    seen.into_iter().all(|s| s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn point_generator_gives_the_cograph(g in arb_function(6)) {
        let s = run_garner(&catalog::point(), &g, OrdinalBudget::default()).unwrap();
        let gamma = s.converged_at().unwrap();
        prop_assert!(gamma <= 2);
        let (lambda, _, rho) = s.factorization();
        prop_assert!(is_cograph(&g, lambda, rho));
    }

    #[test]
    fn codiagonal_gives_the_image(g in arb_function(6)) {
        let s = run_garner(&catalog::codiagonal(), &g, OrdinalBudget::default()).unwrap();
        prop_assert!(s.converged_at().is_some());
        let (lambda, k, rho) = s.factorization();
        prop_assert!(rho.is_injective());
        prop_assert!(lambda.is_surjective());
        prop_assert_eq!(k.size(0), image_size(&g));
    }

    #[test]
    fn second_coequalizer_is_the_displayed_pair(g in arb_function(4), codiag in any::<bool>()) {
        let gens = if codiag { catalog::codiagonal() } else { catalog::point() };
        let s = run_sequence(Mode::Garner, &gens, &g, OrdinalBudget::new(3, 0).unwrap(), false).unwrap();
        let os_g = build_onestep(&gens, &g).unwrap();
        let os_r = build_onestep(&gens, &os_g.rho_arrow()).unwrap();
        let unit = Square::new(g.clone(), os_g.rho_arrow(), os_g.lambda_prime().clone(), PresheafMap::identity(g.codomain())).unwrap();
        let expected = (os_r.lambda_prime().clone(), onestep_on_square(&os_g, &os_r, &unit).unwrap());
        prop_assert_eq!(s.stage(2).coequalized_pair().unwrap(), &expected);
    }

    #[test]
    fn comparison_maps_are_surjective(g in arb_function(4), codiag in any::<bool>()) {
        let gens = if codiag { catalog::codiagonal() } else { catalog::point() };
        let b = OrdinalBudget::new(4, 0).unwrap();
        let gr = run_sequence(Mode::Garner, &gens, &g, b, false).unwrap();
        let qr = run_sequence(Mode::Quillen, &gens, &g, b, false).unwrap();
        for q in build_comparison(&gr, &qr).unwrap() {
            prop_assert!(q.is_surjective());
        }
    }
}

/// Fillers of one square by brute force over all maps `B → C`.
fn brute_fillers(s: &Square) -> usize {
    enumerate_maps(s.source().codomain(), s.target().domain())
        .unwrap()
        .into_iter()
        .filter(|d| &d.compose(s.source().map()).unwrap() == s.top() && &s.target().map().compose(d).unwrap() == s.bottom())
        .count()
}

#[test]
fn algebras_match_lifting_tables_on_small_maps() {
    let corpus: Vec<(GeneratingSet, ArrowObj)> = [
        (catalog::point(), catalog::function(2, 2, &[0, 0]).unwrap()),
        (catalog::point(), catalog::function(2, 3, &[0, 2]).unwrap()),
        (catalog::codiagonal(), catalog::function(3, 2, &[0, 1, 1]).unwrap()),
        (catalog::codiagonal(), catalog::function(2, 2, &[1, 0]).unwrap()),
    ]
    .into_iter()
    .map(|(j, f)| (j, ArrowObj::from(f)))
    .collect();
    for (gens, g) in &corpus {
        let b = check_bijection(gens, g).unwrap();
        assert!(b.holds);
        let mut oracle = 1;
        for j in gens.members() {
            for s in algsoa::arrow::enumerate_squares(j, g).unwrap() {
                oracle *= brute_fillers(&s);
            }
        }
        assert_eq!(count_lifting_tables(gens, g).unwrap(), oracle);
        assert_eq!(enumerate_algebra_structures(gens, g).unwrap().len(), oracle);
    }
}

#[test]
fn horn_filling_on_a_graph_runs_out_of_budget() {
    let x = catalog::reflexive_graph(2, &[(0, 1)]).unwrap();
    let g = catalog::to_terminal(&x);
    let gens = catalog::horns(&catalog::delta_le1(), 1);
    let b = OrdinalBudget::new(3, 0).unwrap();
    let gr = run_sequence(Mode::Garner, &gens, &g, b, false).unwrap();
    let qr = run_sequence(Mode::Quillen, &gens, &g, b, false).unwrap();
    assert!(gr.is_exhausted());
    gr.check_invariants().unwrap();
    qr.check_invariants().unwrap();
    for (a, b) in gr.cardinalities().iter().zip(qr.cardinalities()) {
        assert!(a.iter().zip(&b).all(|(x, y)| x <= y));
    }
}
