use std::sync::Arc;

use super::*;
use crate::catalog::function;

fn arc<R: FactorizationRule + 'static>(r: R) -> Arc<dyn FactorizationRule> {
    Arc::new(r)
}

fn all_rules() -> Vec<Arc<dyn FactorizationRule>> {
    RULE_NAMES.iter().map(|n| rule_by_name(n).unwrap()).collect()
}

#[test]
fn builtin_rules_satisfy_every_law() {
    let sample = exhaustive_sample(4);
    let report = check_laws(&all_rules(), &sample).unwrap();
    assert!(report.all_pass(), "{report}");
    assert_eq!(report.verdicts.len(), RULE_NAMES.len() * LAWS.len());
}

#[test]
fn exhaustive_sample_counts_functions() {
    // Σ_{a+b ≤ n} b^a with 0^0 = 1
    for n in 0usize..=4 {
        let expected: usize = (0..=n).flat_map(|t| (0..=t).map(move |a| (t - a).pow(a as u32))).sum();
        assert_eq!(exhaustive_sample(n).len(), expected);
    }
}

#[test]
fn graph_tensor_graph_has_nested_product_middle() {
    let g: Arc<dyn FunctorialFactorization> = Arc::new(Graph);
    let f = function(2, 3, &[0, 2]).unwrap();
    let t = tensor_product(g.clone(), g.clone()).factor(&f).unwrap();
    assert_eq!(t.middle.sizes(), &[2 * 3 * 3]);
    assert_eq!(t.rho.compose(&t.lambda).unwrap(), f);
    // λ x = ((x, f x), f x), indices (x·3 + f x)·3 + f x
    assert_eq!(t.lambda.component(0), &[0, 3 * 5 + 2]);
    let o = odot_product(g.clone(), g).factor(&f).unwrap();
    assert_eq!(o.middle.sizes(), &[2 * 2 * 3]);
}

#[test]
fn trivial_rules_are_units() {
    let g: Arc<dyn FunctorialFactorization> = Arc::new(Cograph);
    let left: Arc<dyn FunctorialFactorization> = Arc::new(TrivialLeft);
    let right: Arc<dyn FunctorialFactorization> = Arc::new(TrivialRight);
    for f in exhaustive_sample(3) {
        let base = g.factor(&f).unwrap();
        assert_eq!(tensor_product(g.clone(), left.clone()).factor(&f).unwrap(), base);
        assert_eq!(tensor_product(left.clone(), g.clone()).factor(&f).unwrap(), base);
        assert_eq!(odot_product(g.clone(), right.clone()).factor(&f).unwrap(), base);
        assert_eq!(odot_product(right.clone(), g.clone()).factor(&f).unwrap(), base);
    }
}

/// The graph rule with `π((x, y'), y) = (x, y')`.
struct ForgetfulPi;

impl FunctorialFactorization for ForgetfulPi {
    fn name(&self) -> String {
        "graph-bad-pi".into()
    }
    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        Graph.factor(f)
    }
    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        Graph.on_square(f, g, h, k)
    }
}

impl FactorizationRule for ForgetfulPi {
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Graph.sigma(f)
    }
    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let kf = Graph.factor(f)?.middle;
        let kr = product(&kf, f.target())?;
        let ny = f.target().size(0);
        let comp = (0..kr.size(0)).map(|e| e / ny).collect();
        PresheafMap::new(kr, kf, vec![comp])
    }
}

#[test]
fn forgetful_pi_breaks_right_unit() {
    let report = check_laws(&[arc(ForgetfulPi)], &exhaustive_sample(3)).unwrap();
    assert!(!report.all_pass());
    let v = report.verdict("graph-bad-pi", "unit-right").unwrap();
    assert!(v.failures > 0);
    assert!(!v.counterexamples.is_empty());
    assert!(report.verdict("graph-bad-pi", "unit-left").unwrap().passed());
}

#[test]
fn seeded_mutations_are_caught() {
    let sample = exhaustive_sample(4);
    for seed in 0..6 {
        let m = seeded_mutation(seed, &sample).unwrap();
        let report = check_laws(&[arc(m)], &sample).unwrap();
        assert!(!report.all_pass(), "seed {seed} escaped");
    }
}

#[test]
fn seeded_mutation_is_deterministic() {
    let sample = exhaustive_sample(3);
    let a = seeded_mutation(9, &sample).unwrap();
    let b = seeded_mutation(9, &sample).unwrap();
    assert_eq!((a.arrow, a.object, a.element, a.value, a.component), (b.arrow, b.object, b.element, b.value, b.component));
}

#[test]
fn canonical_lift_solves_the_square() {
    let rule = Graph;
    let f = function(1, 2, &[0]).unwrap();
    let g = function(2, 1, &[0, 0]).unwrap();
    let coalgs = coalgebra_structures(&rule, &f).unwrap();
    let algs = algebra_structures(&rule, &g).unwrap();
    let h = function(1, 2, &[1]).unwrap();
    let k = function(2, 1, &[0, 0]).unwrap();
    for s in &coalgs {
        for p in &algs {
            let d = canonical_lift(&rule, &f, s, &g, p, &h, &k).unwrap();
            assert_eq!(d.compose(&f).unwrap(), h);
            assert_eq!(g.compose(&d).unwrap(), k);
        }
    }
}

#[test]
fn structures_match_brute_force() {
    for f in exhaustive_sample(4) {
        for name in RULE_NAMES {
            let rule = rule_by_name(name).unwrap();
            let fac = rule.factor(&f).unwrap();
            let brute_c = crate::presheaf::enumerate_maps(f.target(), &fac.middle)
                .unwrap()
                .into_iter()
                .filter(|s| s.compose(&f).unwrap() == fac.lambda && fac.rho.compose(s).unwrap() == PresheafMap::identity(f.target()))
                .count();
            assert_eq!(coalgebra_structures(rule.as_ref(), &f).unwrap().len(), brute_c);
            let brute_a = crate::presheaf::enumerate_maps(&fac.middle, f.source())
                .unwrap()
                .into_iter()
                .filter(|p| p.compose(&fac.lambda).unwrap() == PresheafMap::identity(f.source()) && f.compose(p).unwrap() == fac.rho)
                .count();
            assert_eq!(algebra_structures(rule.as_ref(), &f).unwrap().len(), brute_a);
        }
    }
}

#[test]
fn canonical_lift_rejects_a_non_commuting_square() {
    let rule = Cograph;
    let f = function(1, 1, &[0]).unwrap();
    let s = coalgebra_structures(&rule, &f).unwrap().remove(0);
    let g = function(2, 2, &[0, 1]).unwrap();
    let p = algebra_structures(&rule, &g).unwrap().remove(0);
    let h = function(1, 2, &[0]).unwrap();
    let k = function(1, 2, &[1]).unwrap();
    assert!(matches!(canonical_lift(&rule, &f, &s, &g, &p, &h, &k), Err(crate::Error::Precondition(_))));
}

#[test]
fn composite_coalgebra_is_a_section() {
    for name in ["graph", "cograph"] {
        let rule = rule_by_name(name).unwrap();
        let f = function(1, 2, &[1]).unwrap();
        let g = function(2, 3, &[0, 2]).unwrap();
        let ss = coalgebra_structures(rule.as_ref(), &f).unwrap();
        let ts = coalgebra_structures(rule.as_ref(), &g).unwrap();
        for s in &ss {
            for t in &ts {
                let u = compose_coalgebras(rule.as_ref(), &f, s, &g, t).unwrap();
                assert!(coalgebra_structures(rule.as_ref(), &g.compose(&f).unwrap()).unwrap().contains(&u));
            }
        }
    }
}

#[test]
fn report_serialises() {
    let report = check_laws(&[arc(Cograph)], &exhaustive_sample(2)).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["rules"][0], "cograph");
    assert!(report.to_string().ends_with("all laws hold"));
}
