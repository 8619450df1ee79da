//! Lifts from coalgebra and algebra structures, and composition of coalgebras.

use super::FactorizationRule;
use crate::algebra::constrained_maps;
use crate::error::{Error, Result};
use crate::presheaf::PresheafMap;

/// Sections `s: Y → Kf` with `s∘f = λ_f` and `ρ_f∘s = id`.
pub fn coalgebra_structures(rule: &dyn FactorizationRule, f: &PresheafMap) -> Result<Vec<PresheafMap>> {
    let fac = rule.factor(f)?;
    constrained_maps(f, &fac.lambda, &fac.rho, &PresheafMap::identity(f.target()))
}

/// Retractions `p: Kg → C` with `p∘λ_g = id` and `g∘p = ρ_g`.
pub fn algebra_structures(rule: &dyn FactorizationRule, g: &PresheafMap) -> Result<Vec<PresheafMap>> {
    let fac = rule.factor(g)?;
    constrained_maps(&fac.lambda, &PresheafMap::identity(g.source()), g, &fac.rho)
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what.to_string()))
    }
}

/// `p ∘ K(h, k) ∘ s: Y → C` for a square `(h, k): f → g`, a coalgebra `s`
/// on `f` and an algebra `p` on `g`.
pub fn canonical_lift(
    rule: &dyn FactorizationRule,
    f: &PresheafMap,
    s: &PresheafMap,
    g: &PresheafMap,
    p: &PresheafMap,
    h: &PresheafMap,
    k: &PresheafMap,
) -> Result<PresheafMap> {
    let ff = rule.factor(f)?;
    let fg = rule.factor(g)?;
    require(g.compose(h)? == k.compose(f)?, "the square (h, k) does not commute")?;
    require(s.compose(f)? == ff.lambda, "s∘f differs from λ_f")?;
    require(ff.rho.compose(s)? == PresheafMap::identity(f.target()), "s is not a section of ρ_f")?;
    require(p.compose(&fg.lambda)? == PresheafMap::identity(g.source()), "p is not a retraction of λ_g")?;
    require(g.compose(p)? == fg.rho, "g∘p differs from ρ_g")?;

    let lift = p.compose(&rule.on_square(f, g, h, k)?)?.compose(s)?;
    if lift.compose(f)? != *h || g.compose(&lift)? != *k {
        return Err(Error::Internal("canonical lift fails a triangle".into()));
    }
    Ok(lift)
}

/// The coalgebra on `g∘f` built from `s` on `f: X → Y` and `t` on `g: Y → Z`:
/// `π_{gf} ∘ K(K(1, g), 1) ∘ K(s, 1) ∘ t`.
pub fn compose_coalgebras(
    rule: &dyn FactorizationRule,
    f: &PresheafMap,
    s: &PresheafMap,
    g: &PresheafMap,
    t: &PresheafMap,
) -> Result<PresheafMap> {
    let gf = g.compose(f)?;
    let ff = rule.factor(f)?;
    let fgf = rule.factor(&gf)?;
    let id_x = PresheafMap::identity(f.source());
    let id_z = PresheafMap::identity(g.target());
    let g_rho = g.compose(&ff.rho)?;

    let k_s = rule.on_square(g, &g_rho, s, &id_z)?;
    let k_1g = rule.on_square(f, &gf, &id_x, g)?;
    let k_k = rule.on_square(&g_rho, &fgf.rho, &k_1g, &id_z)?;
    let pi = rule.pi(&gf)?;
    let u = pi.compose(&k_k)?.compose(&k_s)?.compose(t)?;
    if u.compose(&gf)? != fgf.lambda || fgf.rho.compose(&u)? != id_z {
        return Err(Error::Internal("composite coalgebra is not a section".into()));
    }
    Ok(u)
}
