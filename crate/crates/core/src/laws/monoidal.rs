//! The two tensor products of functorial factorisations and the interchange
//! map relating them.

use std::sync::Arc;

use super::{Factorization, FunctorialFactorization};
use crate::error::Result;
use crate::presheaf::PresheafMap;

/// `outer ⊗ inner`: factor with `inner`, then factor its right part with
/// `outer`. The middle object at `f` is `K_outer(ρ_inner f)`.
pub struct Tensor {
    pub outer: Arc<dyn FunctorialFactorization>,
    pub inner: Arc<dyn FunctorialFactorization>,
}

/// `outer ⊙ inner`: factor with `inner`, then factor its left part with
/// `outer`. The middle object at `f` is `K_outer(λ_inner f)`.
pub struct Odot {
    pub outer: Arc<dyn FunctorialFactorization>,
    pub inner: Arc<dyn FunctorialFactorization>,
}

pub fn tensor_product(outer: Arc<dyn FunctorialFactorization>, inner: Arc<dyn FunctorialFactorization>) -> Tensor {
    Tensor { outer, inner }
}

pub fn odot_product(outer: Arc<dyn FunctorialFactorization>, inner: Arc<dyn FunctorialFactorization>) -> Odot {
    Odot { outer, inner }
}

impl FunctorialFactorization for Tensor {
    fn name(&self) -> String {
        format!("({})⊗({})", self.outer.name(), self.inner.name())
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        let i = self.inner.factor(f)?;
        let o = self.outer.factor(&i.rho)?;
        Ok(Factorization {
            lambda: o.lambda.compose(&i.lambda)?,
            middle: o.middle,
            rho: o.rho,
        })
    }

    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        let (fi, gi) = (self.inner.factor(f)?, self.inner.factor(g)?);
        let kh = self.inner.on_square(f, g, h, k)?;
        self.outer.on_square(&fi.rho, &gi.rho, &kh, k)
    }
}

impl FunctorialFactorization for Odot {
    fn name(&self) -> String {
        format!("({})⊙({})", self.outer.name(), self.inner.name())
    }

    fn factor(&self, f: &PresheafMap) -> Result<Factorization> {
        let i = self.inner.factor(f)?;
        let o = self.outer.factor(&i.lambda)?;
        Ok(Factorization {
            lambda: o.lambda,
            middle: o.middle,
            rho: i.rho.compose(&o.rho)?,
        })
    }

    fn on_square(&self, f: &PresheafMap, g: &PresheafMap, h: &PresheafMap, k: &PresheafMap) -> Result<PresheafMap> {
        let (fi, gi) = (self.inner.factor(f)?, self.inner.factor(g)?);
        let kh = self.inner.on_square(f, g, h, k)?;
        self.outer.on_square(&fi.lambda, &gi.lambda, h, &kh)
    }
}

/// The middle component at `f` of `z: (A⊙B)⊗(C⊙D) → (A⊗C)⊙(B⊗D)`, a map
/// `K^A(λ^B(ρ^{C⊙D} f)) → K^A(ρ^C(λ^{B⊗D} f))`.
///
/// Both sides are `K^A` applied to an arrow; the square between those arrows
/// has top `K^C(id, λ^B(ρ^D f))` and bottom `K^B(ρ^C(λ^D f), id)`.
pub fn interchange(
    a: &dyn FunctorialFactorization,
    b: &dyn FunctorialFactorization,
    c: &dyn FunctorialFactorization,
    d: &dyn FunctorialFactorization,
    f: &PresheafMap,
) -> Result<PresheafMap> {
    let fd = d.factor(f)?;
    let c_on_ld = c.factor(&fd.lambda)?;
    let rho_cd = fd.rho.compose(&c_on_ld.rho)?;
    let b_on_rcd = b.factor(&rho_cd)?;
    let b_on_rd = b.factor(&fd.rho)?;
    let lambda_bd = b_on_rd.lambda.compose(&fd.lambda)?;
    let c_on_lbd = c.factor(&lambda_bd)?;

    let id_x = PresheafMap::identity(f.source());
    let id_y = PresheafMap::identity(f.target());
    let top = c.on_square(&fd.lambda, &lambda_bd, &id_x, &b_on_rd.lambda)?;
    let bottom = b.on_square(&rho_cd, &fd.rho, &c_on_ld.rho, &id_y)?;
    a.on_square(&b_on_rcd.lambda, &c_on_lbd.rho, &top, &bottom)
}
