//! Functorial factorisations given by explicit rules, and exhaustive checks
//! of the natural weak factorisation system axioms on them.

mod lifting;
mod monoidal;
mod mutation;
mod rules;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::error::Result;
use crate::presheaf::{enumerate_maps, Presheaf, PresheafMap};

pub use lifting::{algebra_structures, canonical_lift, coalgebra_structures, compose_coalgebras};
pub use monoidal::{interchange, odot_product, tensor_product, Odot, Tensor};
pub use mutation::{seeded_mutation, Component, Mutated};
pub use rules::{product, rule_by_name, Cograph, Graph, TrivialLeft, TrivialRight, RULE_NAMES};

/// `f = ρ ∘ λ` through `middle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lambda: PresheafMap,
    pub middle: Presheaf,
    pub rho: PresheafMap,
}

pub trait FunctorialFactorization: Send + Sync {
    fn name(&self) -> String;

    fn factor(&self, f: &PresheafMap) -> Result<Factorization>;

    /// `K(h, k): Kf → Kg` for a commuting square `(h, k): f → g`.
    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap>;

    fn middle(&self, f: &PresheafMap) -> Result<Presheaf> {
        Ok(self.factor(f)?.middle)
    }
}

/// A functorial factorisation with comultiplication `σ_f: Kf → K(λ_f)` and
/// multiplication `π_f: K(ρ_f) → Kf`.
pub trait FactorizationRule: FunctorialFactorization {
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap>;
    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap>;
}

pub fn evaluate_rule(rule: &dyn FunctorialFactorization, f: &PresheafMap) -> Result<Factorization> {
    rule.factor(f)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Counterexample {
    pub arrow: String,
    /// Where the composites first disagree.
    pub witness: String,
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LawVerdict {
    pub rule: String,
    pub law: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl LawVerdict {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LawReport {
    pub rules: Vec<String>,
    pub arrows: usize,
    pub verdicts: Vec<LawVerdict>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(LawVerdict::passed)
    }

    pub fn failures(&self) -> usize {
        self.verdicts.iter().map(|v| v.failures).sum()
    }

    pub fn verdict(&self, rule: &str, law: &str) -> Option<&LawVerdict> {
        self.verdicts.iter().find(|v| v.rule == rule && v.law == law)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rules: {}", self.rules.join(", "))?;
        writeln!(f, "arrows checked: {}", self.arrows)?;
        for v in &self.verdicts {
            let status = if v.passed() { "pass".to_string() } else { format!("FAIL ({} of {})", v.failures, v.checked) };
            writeln!(f, "  {:<14} {:<22} {}", v.rule, v.law, status)?;
            for c in &v.counterexamples {
                writeln!(f, "      at {}: {}", c.arrow, c.witness)?;
                writeln!(f, "        left  {:?}", c.left)?;
                writeln!(f, "        right {:?}", c.right)?;
            }
        }
        write!(f, "{}", if self.all_pass() { "all laws hold" } else { "counterexamples found" })
    }
}

pub const LAWS: &[&str] = &[
    "factorization",
    "functor-identity",
    "functor-composition",
    "sigma-natural",
    "pi-natural",
    "counit-left",
    "counit-right",
    "unit-left",
    "unit-right",
    "coassociativity",
    "associativity",
    "distributivity",
    "bialgebra-1",
    "bialgebra-2",
    "bialgebra-3",
    "bialgebra-4",
];

const MAX_COUNTEREXAMPLES: usize = 3;

fn render_arrow(f: &PresheafMap) -> String {
    format!("{:?}→{:?} {:?}", f.source().sizes(), f.target().sizes(), f.components())
}

struct Tally {
    verdicts: Vec<LawVerdict>,
}

impl Tally {
    fn record(&mut self, rule: &str, law: &'static str, f: &PresheafMap, left: Result<PresheafMap>, right: Result<PresheafMap>) {
        let idx = match self.verdicts.iter().position(|v| v.rule == rule && v.law == law) {
            Some(i) => i,
            None => {
                self.verdicts.push(LawVerdict {
                    rule: rule.to_string(),
                    law,
                    checked: 0,
                    failures: 0,
                    counterexamples: Vec::new(),
                });
                self.verdicts.len() - 1
            }
        };
        let v = &mut self.verdicts[idx];
        v.checked += 1;
        let failure = match (left, right) {
            (Ok(l), Ok(r)) => {
                if l.source() != r.source() || l.target() != r.target() {
                    Some(("composites are not parallel".to_string(), l, r))
                } else {
                    l.first_difference(&r).map(|(obj, e, a, b)| {
                        (format!("object {obj}, element {e}: left gives {a}, right gives {b}"), l, r)
                    })
                }
            }
            (l, r) => {
                let msg = [l.err(), r.err()].into_iter().flatten().map(|e| e.to_string()).collect::<Vec<_>>().join("; ");
                v.failures += 1;
                if v.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    v.counterexamples.push(Counterexample {
                        arrow: render_arrow(f),
                        witness: format!("composite undefined: {msg}"),
                        left: Vec::new(),
                        right: Vec::new(),
                    });
                }
                return;
            }
        };
        if let Some((witness, l, r)) = failure {
            v.failures += 1;
            if v.counterexamples.len() < MAX_COUNTEREXAMPLES {
                v.counterexamples.push(Counterexample {
                    arrow: render_arrow(f),
                    witness,
                    left: l.components().to_vec(),
                    right: r.components().to_vec(),
                });
            }
        }
    }
}

/// Squares `(h, k): f → f`.
fn endo_squares(f: &PresheafMap) -> Result<Vec<(PresheafMap, PresheafMap)>> {
    let mut out = Vec::new();
    for k in enumerate_maps(f.target(), f.target())? {
        for h in enumerate_maps(f.source(), f.source())? {
            if f.compose(&h)? == k.compose(f)? {
                out.push((h, k.clone()));
            }
        }
    }
    Ok(out)
}

fn check_rule(rule: &Arc<dyn FactorizationRule>, f: &PresheafMap, tally: &mut Tally) -> Result<()> {
    let name = rule.name();
    let r: &dyn FactorizationRule = rule.as_ref();
    let fac = r.factor(f)?;
    let (x, y) = (f.source(), f.target());
    let id_x = PresheafMap::identity(x);
    let id_y = PresheafMap::identity(y);
    let id_k = PresheafMap::identity(&fac.middle);
    let (lam, rho) = (&fac.lambda, &fac.rho);
    let on_l = r.factor(lam)?;
    let on_r = r.factor(rho)?;
    let sigma = r.sigma(f);
    let pi = r.pi(f);

    let mut rec = |law, left, right| tally.record(&name, law, f, left, right);

    rec("factorization", rho.compose(lam), Ok(f.clone()));
    rec("functor-identity", r.on_square(f, f, &id_x, &id_y), Ok(id_k.clone()));

    let squares = endo_squares(f)?;
    for (h1, k1) in &squares {
        let k1f = r.on_square(f, f, h1, k1)?;
        for (h2, k2) in squares.iter().take(8) {
            let composite = r.on_square(f, f, &h2.compose(h1)?, &k2.compose(k1)?);
            let stepwise = r.on_square(f, f, h2, k2).and_then(|k2f| k2f.compose(&k1f));
            rec("functor-composition", composite, stepwise);
        }
        let sig = sigma.clone();
        rec(
            "sigma-natural",
            r.on_square(lam, lam, h1, &k1f).and_then(|m| m.compose(sig.as_ref().map_err(Clone::clone)?)),
            sig.clone().and_then(|s| s.compose(&k1f)),
        );
        rec(
            "pi-natural",
            pi.clone().and_then(|p| k1f.compose(&p)),
            r.on_square(rho, rho, &k1f, k1).and_then(|m| pi.clone()?.compose(&m)),
        );
    }

    let sigma = sigma?;
    let pi = pi?;
    rec("counit-left", on_l.rho.compose(&sigma), Ok(id_k.clone()));
    rec(
        "counit-right",
        r.on_square(lam, f, &id_x, rho).and_then(|m| m.compose(&sigma)),
        Ok(id_k.clone()),
    );
    rec("unit-left", pi.compose(&on_r.lambda), Ok(id_k.clone()));
    rec(
        "unit-right",
        r.on_square(f, rho, lam, &id_y).and_then(|m| pi.compose(&m)),
        Ok(id_k.clone()),
    );

    // (co)associativity at the middle component
    let sigma_l = r.sigma(lam)?;
    rec(
        "coassociativity",
        sigma_l.compose(&sigma),
        r.on_square(lam, &on_l.lambda, &id_x, &sigma).and_then(|m| m.compose(&sigma)),
    );
    let pi_r = r.pi(rho)?;
    rec(
        "associativity",
        pi.compose(&pi_r),
        r.on_square(&on_r.rho, rho, &pi, &id_y).and_then(|m| pi.compose(&m)),
    );

    rec("distributivity", on_l.rho.compose(&sigma), pi.compose(&on_r.lambda));

    rec("bialgebra-1", sigma.compose(lam), Ok(on_l.lambda.clone()));
    rec("bialgebra-2", rho.compose(&pi), Ok(on_r.rho.clone()));
    rec("bialgebra-3", rho.compose(lam), Ok(f.clone()));
    rec("bialgebra-4", sigma.compose(&pi), bialgebra_four(rule, f, &sigma, &pi));
    Ok(())
}

/// The right-hand path of the fourth bialgebra diagram at `f`:
/// `π_{λ_f} ∘ (A⊗A)(id, π_f) ∘ z ∘ σ_{ρ^{A⊙A}_f} ∘ K(σ_f, id)`.
fn bialgebra_four(rule: &Arc<dyn FactorizationRule>, f: &PresheafMap, sigma: &PresheafMap, pi: &PresheafMap) -> Result<PresheafMap> {
    let a: Arc<dyn FunctorialFactorization> = rule.clone();
    let r: &dyn FactorizationRule = rule.as_ref();
    let fac = r.factor(f)?;
    let id_x = PresheafMap::identity(f.source());
    let id_y = PresheafMap::identity(f.target());
    let odot = odot_product(a.clone(), a.clone());
    let tensor = tensor_product(a.clone(), a.clone());

    let rho_b = odot.factor(f)?.rho;
    let step1 = r.on_square(&fac.rho, &rho_b, sigma, &id_y)?;
    let step2 = r.sigma(&rho_b)?;
    let step3 = interchange(a.as_ref(), a.as_ref(), a.as_ref(), a.as_ref(), f)?;
    let lam_p = tensor.factor(f)?.lambda;
    let step4 = tensor.on_square(&lam_p, &fac.lambda, &id_x, pi)?;
    let step5 = r.pi(&fac.lambda)?;
    step5.compose(&step4)?.compose(&step3)?.compose(&step2)?.compose(&step1)
}

/// Checks every law for every rule at every arrow of `sample`.
pub fn check_laws(rules: &[Arc<dyn FactorizationRule>], sample: &[PresheafMap]) -> Result<LawReport> {
    let mut tally = Tally { verdicts: Vec::new() };
    for rule in rules {
        for f in sample {
            check_rule(rule, f, &mut tally)?;
        }
    }
    Ok(LawReport {
        rules: rules.iter().map(|r| r.name()).collect(),
        arrows: sample.len(),
        verdicts: tally.verdicts,
    })
}

/// Every function `X → Y` of finite sets with `|X| + |Y| ≤ max_total`.
pub fn exhaustive_sample(max_total: usize) -> Vec<PresheafMap> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        for a in 0..=total {
            let b = total - a;
            let (x, y) = (catalog::finite_set(a), catalog::finite_set(b));
            out.extend(enumerate_maps(&x, &y).expect("same base"));
        }
    }
    out
}

/// `count` random functions with `1 ≤ |X|, |Y| ≤ max_side`.
pub fn random_sample(seed: u64, count: usize, max_side: usize) -> Vec<PresheafMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.gen_range(1..=max_side);
            let b = rng.gen_range(1..=max_side);
            let values: Vec<usize> = (0..a).map(|_| rng.gen_range(0..b)).collect();
            catalog::function(a, b, &values).expect("in range")
        })
        .collect()
}

/// The exhaustive core plus a seeded random extension.
pub fn default_sample(seed: u64) -> Vec<PresheafMap> {
    let mut s = exhaustive_sample(4);
    s.extend(random_sample(seed, 12, 3));
    s
}

#[cfg(test)]
mod tests;
