//! The built-in factorisation rules.

use std::sync::Arc;

use super::{Factorization, FactorizationRule, FunctorialFactorization};
use crate::colimit::coproduct;
use crate::error::{Error, Result};
use crate::presheaf::{Presheaf, PresheafMap};

/// `X × Y`, with `(x, y)` at index `x·|Y(a)| + y` over each object `a`.
pub fn product(x: &Presheaf, y: &Presheaf) -> Result<Presheaf> {
    if !x.shares_base(y) {
        return Err(Error::Incompatible("product: different base categories".into()));
    }
    let sizes = x.sizes().iter().zip(y.sizes()).map(|(a, b)| a * b).collect();
    Ok(Presheaf::build(x.base(), sizes, |m, e| {
        let mor = x.base().morphism(m);
        let (ny_cod, ny_dom) = (y.size(mor.cod), y.size(mor.dom));
        let (a, b) = (e / ny_cod, e % ny_cod);
        x.act(m, a) * ny_dom + y.act(m, b)
    }))
}

/// `(a, b) ↦ (u a, v b)` between products.
fn product_map(u: &PresheafMap, v: &PresheafMap, src: &Presheaf, tgt: &Presheaf) -> PresheafMap {
    let comps = (0..src.sizes().len())
        .map(|obj| {
            let (nys, nyt) = (v.source().size(obj), v.target().size(obj));
            (0..src.size(obj))
                .map(|e| u.apply(obj, e / nys) * nyt + v.apply(obj, e % nys))
                .collect()
        })
        .collect();
    PresheafMap::from_parts_unchecked(src.clone(), tgt.clone(), comps)
}

fn pair_index(y: &Presheaf, obj: usize, a: usize, b: usize) -> usize {
    a * y.size(obj) + b
}

/// Factors `f: X → Y` through the graph `X × Y`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Graph;

impl FunctorialFactorization for Graph {
    fn name(&self) -> String {
        "graph".into()
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        let (x, y) = (f.source(), f.target());
        let k = product(x, y)?;
        let lambda = (0..x.sizes().len())
            .map(|o| (0..x.size(o)).map(|a| pair_index(y, o, a, f.apply(o, a))).collect())
            .collect();
        let rho = (0..k.sizes().len())
            .map(|o| (0..k.size(o)).map(|e| e % y.size(o)).collect())
            .collect();
        Ok(Factorization {
            lambda: PresheafMap::from_parts_unchecked(x.clone(), k.clone(), lambda),
            rho: PresheafMap::from_parts_unchecked(k.clone(), y.clone(), rho),
            middle: k,
        })
    }

    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        let (kf, kg) = (product(f.source(), f.target())?, product(g.source(), g.target())?);
        Ok(product_map(h, k, &kf, &kg))
    }
}

impl FactorizationRule for Graph {
    /// `(x, y) ↦ (x, (x, y))`.
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let fac = self.factor(f)?;
        let kl = product(f.source(), &fac.middle)?;
        let comps = (0..fac.middle.sizes().len())
            .map(|o| {
                (0..fac.middle.size(o))
                    .map(|e| pair_index(&fac.middle, o, e / f.target().size(o), e))
                    .collect()
            })
            .collect();
        Ok(PresheafMap::from_parts_unchecked(fac.middle, kl, comps))
    }

    /// `((x, y'), y) ↦ (x, y)`.
    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let fac = self.factor(f)?;
        let y = f.target();
        let kr = product(&fac.middle, y)?;
        let comps = (0..kr.sizes().len())
            .map(|o| {
                (0..kr.size(o))
                    .map(|e| {
                        let (xy, yy) = (e / y.size(o), e % y.size(o));
                        pair_index(y, o, xy / y.size(o), yy)
                    })
                    .collect()
            })
            .collect();
        Ok(PresheafMap::from_parts_unchecked(kr, fac.middle, comps))
    }
}

/// Factors `f: X → Y` through the cograph `X ⊔ Y`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cograph;

fn sum(x: &Presheaf, y: &Presheaf) -> Result<Presheaf> {
    Ok(coproduct(x.base(), &[x.clone(), y.clone()])?.apex().clone())
}

/// `u ⊔ v` between binary coproducts.
fn sum_map(u: &PresheafMap, v: &PresheafMap, src: &Presheaf, tgt: &Presheaf) -> PresheafMap {
    let comps = (0..src.sizes().len())
        .map(|o| {
            let (nxs, nxt) = (u.source().size(o), u.target().size(o));
            (0..src.size(o))
                .map(|e| if e < nxs { u.apply(o, e) } else { nxt + v.apply(o, e - nxs) })
                .collect()
        })
        .collect();
    PresheafMap::from_parts_unchecked(src.clone(), tgt.clone(), comps)
}

impl FunctorialFactorization for Cograph {
    fn name(&self) -> String {
        "cograph".into()
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        let (x, y) = (f.source(), f.target());
        let k = sum(x, y)?;
        let lambda = x.sizes().iter().map(|&n| (0..n).collect()).collect();
        let rho = (0..k.sizes().len())
            .map(|o| {
                (0..k.size(o))
                    .map(|e| if e < x.size(o) { f.apply(o, e) } else { e - x.size(o) })
                    .collect()
            })
            .collect();
        Ok(Factorization {
            lambda: PresheafMap::from_parts_unchecked(x.clone(), k.clone(), lambda),
            rho: PresheafMap::from_parts_unchecked(k.clone(), y.clone(), rho),
            middle: k,
        })
    }

    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        let (kf, kg) = (sum(f.source(), f.target())?, sum(g.source(), g.target())?);
        Ok(sum_map(h, k, &kf, &kg))
    }
}

impl FactorizationRule for Cograph {
    /// `inl x ↦ inl x`, `inr y ↦ inr (inr y)`.
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let x = f.source();
        let kf = sum(x, f.target())?;
        let kl = sum(x, &kf)?;
        let comps = (0..kf.sizes().len())
            .map(|o| {
                (0..kf.size(o))
                    .map(|e| if e < x.size(o) { e } else { x.size(o) + e })
                    .collect()
            })
            .collect();
        Ok(PresheafMap::from_parts_unchecked(kf, kl, comps))
    }

    /// `inl e ↦ e`, `inr y ↦ inr y`.
    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let x = f.source();
        let y = f.target();
        let kf = sum(x, y)?;
        let kr = sum(&kf, y)?;
        let comps = (0..kr.sizes().len())
            .map(|o| {
                let n = kf.size(o);
                (0..kr.size(o)).map(|e| if e < n { e } else { x.size(o) + (e - n) }).collect()
            })
            .collect();
        Ok(PresheafMap::from_parts_unchecked(kr, kf, comps))
    }
}

/// `(id_X, X, f)`: the unit for `⊗`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialLeft;

impl FunctorialFactorization for TrivialLeft {
    fn name(&self) -> String {
        "trivial-left".into()
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        Ok(Factorization {
            lambda: PresheafMap::identity(f.source()),
            middle: f.source().clone(),
            rho: f.clone(),
        })
    }

    fn on_square(&self, _f: &PresheafMap, _g: &PresheafMap, h: &PresheafMap, _k: &PresheafMap) -> Result<PresheafMap> {
        Ok(h.clone())
    }
}

impl FactorizationRule for TrivialLeft {
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Ok(PresheafMap::identity(f.source()))
    }

    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Ok(PresheafMap::identity(f.source()))
    }
}

/// `(f, Y, id_Y)`: the unit for `⊙`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialRight;

impl FunctorialFactorization for TrivialRight {
    fn name(&self) -> String {
        "trivial-right".into()
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        Ok(Factorization {
            lambda: f.clone(),
            middle: f.target().clone(),
            rho: PresheafMap::identity(f.target()),
        })
    }

    fn on_square(&self, _f: &PresheafMap, _g: &PresheafMap, _h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        Ok(k.clone())
    }
}

impl FactorizationRule for TrivialRight {
    fn sigma(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Ok(PresheafMap::identity(f.target()))
    }

    fn pi(&self, f: &PresheafMap) -> Result<PresheafMap> {
        Ok(PresheafMap::identity(f.target()))
    }
}

pub const RULE_NAMES: &[&str] = &["graph", "cograph", "trivial-left", "trivial-right"];

pub fn rule_by_name(name: &str) -> Result<Arc<dyn FactorizationRule>> {
    match name {
        "graph" => Ok(Arc::new(Graph)),
        "cograph" => Ok(Arc::new(Cograph)),
        "trivial-left" => Ok(Arc::new(TrivialLeft)),
        "trivial-right" => Ok(Arc::new(TrivialRight)),
        _ => Err(Error::NotFound {
            key: name.to_string(),
            known: RULE_NAMES.iter().map(|s| s.to_string()).collect(),
        }),
    }
}
