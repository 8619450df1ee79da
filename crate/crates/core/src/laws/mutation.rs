//! Rules with one deliberately wrong entry, used to show that the law checks
//! can fail.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rule_by_name, Factorization, FactorizationRule, FunctorialFactorization};
use crate::error::Result;
use crate::presheaf::PresheafMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Sigma,
    Pi,
}

/// `base` with the `component` at `arrow` changed to `value` at one element.
pub struct Mutated {
    pub base: Arc<dyn FactorizationRule>,
    pub component: Component,
    pub arrow: PresheafMap,
    pub object: usize,
    pub element: usize,
    pub value: usize,
}

impl Mutated {
    fn patch(&self, which: Component, f: &PresheafMap, m: PresheafMap) -> PresheafMap {
        if which != self.component || *f != self.arrow {
            return m;
        }
        let mut comps = m.components().to_vec();
        comps[self.object][self.element] = self.value;
        PresheafMap::from_parts_unchecked(m.source().clone(), m.target().clone(), comps)
    }
}

impl FunctorialFactorization for Mutated {
    fn name(&self) -> String {
        let c = match self.component {
            Component::Sigma => "σ",
            Component::Pi => "π",
        };
        format!("{}[{c} mutated]", self.base.name())
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        self.base.factor(f)
    }

    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        self.base.on_square(f, g, h, k)
    }
}

impl FactorizationRule for Mutated {
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Ok(self.patch(Component::Sigma, f, self.base.sigma(f)?))
    }

    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Ok(self.patch(Component::Pi, f, self.base.pi(f)?))
    }
}

/// A single-entry corruption of the graph or cograph rule at some arrow of
/// `sample`, chosen by `seed`. Only entries with an alternative value are
/// eligible.
pub fn seeded_mutation(seed: u64, sample: &[PresheafMap]) -> Result<Mutated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = Vec::new();
    for name in ["graph", "cograph"] {
        let rule = rule_by_name(name)?;
        for f in sample {
            for component in [Component::Sigma, Component::Pi] {
                let m = match component {
                    Component::Sigma => rule.sigma(f)?,
                    Component::Pi => rule.pi(f)?,
                };
                for (obj, c) in m.components().iter().enumerate() {
                    if m.target().size(obj) >= 2 {
                        for (e, &old) in c.iter().enumerate() {
                            candidates.push((rule.clone(), component, f.clone(), obj, e, m.target().size(obj), old));
                        }
                    }
                }
            }
        }
    }
    let (base, component, arrow, object, element, n, old) = candidates
        .choose(&mut rng)
        .cloned()
        .ok_or_else(|| crate::Error::Precondition("no mutable entry in the sample".into()))?;
    let value = (old + rng.gen_range(1..n)) % n;
    Ok(Mutated {
        base,
        component,
        arrow,
        object,
        element,
        value,
    })
}
