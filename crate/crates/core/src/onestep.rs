//! The one-step factorisation of a map `g: C → D` against a generating set.
//!
//! Every square `x = (h, k)` from a generator `j_x: A_x → B_x` to `g` is a
//! lifting problem. Gluing a formal solution `B_x` onto `C` along `h` for all
//! of them at once is the pushout
//!
//! ```text
//!   Σ A_x ──[h_x]──▶ C
//!     │              │ λ'
//!   Σ j_x            ▼
//!     ▼              K'g
//!   Σ B_x ────ξ────▶
//! ```
//!
//! and `ρ': K'g → D` is induced by `g` and `[k_x]`.

use std::collections::HashMap;

use crate::arrow::{enumerate_squares, ArrowObj, GeneratingSet, Square};
use crate::colimit::{coproduct, pushout, Cocone};
use crate::error::{Error, Result};
use crate::presheaf::{Presheaf, PresheafMap};

/// Position of a square in the enumeration: which generator it starts at,
/// and its rank among the squares from that generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareIndex {
    pub generator: usize,
    pub order: usize,
}

type SquareKey = (usize, Vec<Vec<usize>>, Vec<Vec<usize>>);

fn key(generator: usize, s: &Square) -> SquareKey {
    (generator, s.top().components().to_vec(), s.bottom().components().to_vec())
}

#[derive(Clone, Debug)]
pub struct OneStep {
    gens: GeneratingSet,
    input: ArrowObj,
    squares: Vec<(SquareIndex, Square)>,
    lookup: HashMap<SquareKey, usize>,
    sum_domains: Cocone,
    sum_codomains: Cocone,
    sum_map: PresheafMap,
    counit_top: PresheafMap,
    counit_bottom: PresheafMap,
    glued: Cocone,
    rho_prime: PresheafMap,
}

/// The map out of a coproduct given by one map per summand; `target` is
/// needed when there are no summands.
fn copair(sum: &Cocone, maps: &[PresheafMap], target: &Presheaf) -> Result<PresheafMap> {
    if maps.is_empty() {
        sum.factor_initial(target)
    } else {
        sum.factor(maps)
    }
}

impl OneStep {
    pub fn build(gens: &GeneratingSet, g: &ArrowObj) -> Result<Self> {
        let base = gens.base();
        if !g.domain().shares_base(&Presheaf::empty(base)) {
            return Err(Error::Incompatible("one-step: map and generators live over different categories".into()));
        }
        let mut squares = Vec::new();
        for (gi, j) in gens.members().iter().enumerate() {
            for (order, s) in enumerate_squares(j, g)?.into_iter().enumerate() {
                squares.push((SquareIndex { generator: gi, order }, s));
            }
        }
        let lookup = squares
            .iter()
            .enumerate()
            .map(|(i, (idx, s))| (key(idx.generator, s), i))
            .collect();
        let domains: Vec<Presheaf> = squares.iter().map(|(_, s)| s.source().domain().clone()).collect();
        let codomains: Vec<Presheaf> = squares.iter().map(|(_, s)| s.source().codomain().clone()).collect();
        let sum_domains = coproduct(base, &domains)?;
        let sum_codomains = coproduct(base, &codomains)?;
        let cells: Vec<PresheafMap> = squares
            .iter()
            .enumerate()
            .map(|(i, (_, s))| sum_codomains.leg(i).compose(s.source().map()))
            .collect::<Result<_>>()?;
        let sum_map = copair(&sum_domains, &cells, sum_codomains.apex())?;
        let tops: Vec<PresheafMap> = squares.iter().map(|(_, s)| s.top().clone()).collect();
        let bottoms: Vec<PresheafMap> = squares.iter().map(|(_, s)| s.bottom().clone()).collect();
        let counit_top = copair(&sum_domains, &tops, g.domain())?;
        let counit_bottom = copair(&sum_codomains, &bottoms, g.codomain())?;
        let glued = pushout(&counit_top, &sum_map)?;
        let rho_prime = glued.factor(&[g.map().clone(), counit_bottom.clone()])?;
        Ok(OneStep {
            gens: gens.clone(),
            input: g.clone(),
            squares,
            lookup,
            sum_domains,
            sum_codomains,
            sum_map,
            counit_top,
            counit_bottom,
            glued,
            rho_prime,
        })
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn input(&self) -> &ArrowObj {
        &self.input
    }

    pub fn squares(&self) -> &[(SquareIndex, Square)] {
        &self.squares
    }

    /// Position of the square `(h, k)` from generator `generator`, if it is
    /// one of ours.
    pub fn find_square(&self, generator: usize, top: &PresheafMap, bottom: &PresheafMap) -> Option<usize> {
        self.lookup
            .get(&(generator, top.components().to_vec(), bottom.components().to_vec()))
            .copied()
    }

    pub fn sum_domains(&self) -> &Cocone {
        &self.sum_domains
    }

    pub fn sum_codomains(&self) -> &Cocone {
        &self.sum_codomains
    }

    /// `Σ j_x: Σ A_x → Σ B_x`.
    pub fn sum_map(&self) -> &PresheafMap {
        &self.sum_map
    }

    /// `[h_x]: Σ A_x → C`.
    pub fn counit_top(&self) -> &PresheafMap {
        &self.counit_top
    }

    /// `[k_x]: Σ B_x → D`.
    pub fn counit_bottom(&self) -> &PresheafMap {
        &self.counit_bottom
    }

    pub fn pushout(&self) -> &Cocone {
        &self.glued
    }

    pub fn k_prime(&self) -> &Presheaf {
        self.glued.apex()
    }

    pub fn lambda_prime(&self) -> &PresheafMap {
        self.glued.leg(0)
    }

    pub fn xi(&self) -> &PresheafMap {
        self.glued.leg(1)
    }

    pub fn rho_prime(&self) -> &PresheafMap {
        &self.rho_prime
    }

    /// Injection of the cell `B_x` of square `x` into `Σ B_x`.
    pub fn injection(&self, x: usize) -> &PresheafMap {
        self.sum_codomains.leg(x)
    }

    /// `ξ ∘ inj_x: B_x → K'g`, the formal solution of square `x`.
    pub fn cell(&self, x: usize) -> PresheafMap {
        self.xi().compose(self.injection(x)).expect("cell composes")
    }

    pub fn lambda_arrow(&self) -> ArrowObj {
        ArrowObj::from(self.lambda_prime().clone())
    }

    pub fn rho_arrow(&self) -> ArrowObj {
        ArrowObj::from(self.rho_prime.clone())
    }

    /// The unit square `(λ'_g, id_D): g → ρ'_g`.
    pub fn unit_square(&self) -> Square {
        Square::trusted(
            self.input.clone(),
            self.rho_arrow(),
            self.lambda_prime().clone(),
            PresheafMap::identity(self.input.codomain()),
        )
    }

    /// Checks the three defining equations; used by tests and certificate
    /// validation.
    pub fn check(&self) -> Result<()> {
        let g = self.input.map();
        if &self.rho_prime.compose(self.lambda_prime())? != g {
            return Err(Error::Internal("one-step: ρ'∘λ' ≠ g".into()));
        }
        if self.rho_prime.compose(self.xi())? != self.counit_bottom {
            return Err(Error::Internal("one-step: ρ'∘ξ ≠ [k_x]".into()));
        }
        if !self.glued.check_commutes() {
            return Err(Error::Internal("one-step: pushout square does not commute".into()));
        }
        Ok(())
    }
}

pub fn build_onestep(gens: &GeneratingSet, g: &ArrowObj) -> Result<OneStep> {
    OneStep::build(gens, g)
}

/// The action `K'(s): K'g → K'g2` of a square `s: g → g2`. The `C`-part
/// moves along `s.top`; the cell of `x = (h, k)` moves to the cell of
/// `(s.top ∘ h, s.bottom ∘ k)`.
pub fn onestep_on_square(from: &OneStep, to: &OneStep, s: &Square) -> Result<PresheafMap> {
    if s.source() != from.input() || s.target() != to.input() {
        return Err(Error::Incompatible("onestep_on_square: square does not run between the inputs".into()));
    }
    if from.gens != to.gens {
        return Err(Error::Incompatible("onestep_on_square: different generating sets".into()));
    }
    let mut reindex = Vec::with_capacity(from.squares.len());
    for (idx, x) in &from.squares {
        let top = s.top().compose(x.top())?;
        let bottom = s.bottom().compose(x.bottom())?;
        let y = to.find_square(idx.generator, &top, &bottom).ok_or_else(|| {
            Error::Internal(format!(
                "onestep_on_square: image of square {}/{} is missing from the target enumeration",
                idx.generator, idx.order
            ))
        })?;
        reindex.push(to.injection(y).clone());
    }
    let cells = copair(&from.sum_codomains, &reindex, to.sum_codomains.apex())?;
    from.glued.factor(&[
        to.lambda_prime().compose(s.top())?,
        to.xi().compose(&cells)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrow::compose_squares;
    use crate::catalog;
    use proptest::prelude::*;

    fn func(s: usize, t: usize, v: &[usize]) -> ArrowObj {
        ArrowObj::from(catalog::function(s, t, v).unwrap())
    }

    #[test]
    fn empty_generating_set_gives_identity_step() {
        let g = func(2, 3, &[0, 2]);
        let os = build_onestep(&GeneratingSet::empty(catalog::terminal()), &g).unwrap();
        assert_eq!(os.k_prime(), g.domain());
        assert!(os.lambda_prime().is_iso());
        assert_eq!(os.lambda_prime(), &PresheafMap::identity(g.domain()));
        assert_eq!(os.rho_prime(), g.map());
    }

    #[test]
    fn point_generator_adjoins_the_codomain() {
        let g = func(2, 2, &[1, 1]);
        let os = build_onestep(&catalog::point(), &g).unwrap();
        os.check().unwrap();
        assert_eq!(os.k_prime().sizes(), &[4]);
        assert_eq!(os.lambda_prime().component(0), &[0, 1]);
        // C then one adjoined point per element of D, in square order
        assert_eq!(os.rho_prime().component(0), &[1, 1, 0, 1]);
    }

    #[test]
    fn codiagonal_on_injection_is_trivial() {
        let g = func(2, 3, &[0, 2]);
        let os = build_onestep(&catalog::codiagonal(), &g).unwrap();
        assert_eq!(os.squares().len(), 2);
        assert!(os.lambda_prime().is_iso());
    }

    #[test]
    fn codiagonal_quotients_the_kernel() {
        let g = func(3, 2, &[0, 0, 1]);
        let os = build_onestep(&catalog::codiagonal(), &g).unwrap();
        os.check().unwrap();
        assert_eq!(os.k_prime().sizes(), &[2]);
        assert!(os.rho_prime().is_injective());
    }

    #[test]
    fn identity_square_acts_as_identity() {
        let g = func(2, 3, &[0, 0]);
        for gens in [catalog::point(), catalog::codiagonal()] {
            let os = build_onestep(&gens, &g).unwrap();
            let k = onestep_on_square(&os, &os, &Square::identity(&g)).unwrap();
            assert_eq!(k, PresheafMap::identity(os.k_prime()));
        }
    }

    #[test]
    fn unit_square_reindexes_formal_points() {
        // g: ∅ → 1; K'g = {d0}, K'ρ' = {d0, d1} with the old point first
        let g = func(0, 1, &[]);
        let gens = catalog::point();
        let os = build_onestep(&gens, &g).unwrap();
        assert_eq!(os.k_prime().sizes(), &[1]);
        let next = build_onestep(&gens, &os.rho_arrow()).unwrap();
        assert_eq!(next.k_prime().sizes(), &[2]);
        let p2 = onestep_on_square(&os, &next, &os.unit_square()).unwrap();
        assert_eq!(p2.component(0), &[1]);
        assert_eq!(next.lambda_prime().component(0), &[0]);
    }

    #[test]
    fn horn_step_validates() {
        let cat = catalog::delta_le1();
        let x = catalog::reflexive_graph(2, &[(0, 1)]).unwrap();
        let g = catalog::to_terminal(&x);
        let os = build_onestep(&catalog::horns(&cat, 1), &g).unwrap();
        os.check().unwrap();
        assert!(os.k_prime().validate().is_ok());
        assert!(os.lambda_prime().is_injective());
        // each vertex is the horn of two squares; each adds one vertex
        assert_eq!(os.k_prime().size(0), 2 + 2 * 2);
    }

    fn arrow() -> impl Strategy<Value = ArrowObj> {
        (0usize..=3, 1usize..=3).prop_flat_map(|(c, d)| {
            prop::collection::vec(0..d, c).prop_map(move |v| func(c, d, &v))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn factorisation_and_functoriality(f in arrow(), g in arrow(), e in arrow(), pick in 0usize..10_000, point in any::<bool>()) {
            let gens = if point { catalog::point() } else { catalog::codiagonal() };
            let s1s = enumerate_squares(&f, &g).unwrap();
            let s2s = enumerate_squares(&g, &e).unwrap();
            prop_assume!(!s1s.is_empty() && !s2s.is_empty());
            let s1 = &s1s[pick % s1s.len()];
            let s2 = &s2s[pick % s2s.len()];
            let (of, og, oe) = (
                build_onestep(&gens, &f).unwrap(),
                build_onestep(&gens, &g).unwrap(),
                build_onestep(&gens, &e).unwrap(),
            );
            for os in [&of, &og, &oe] {
                os.check().unwrap();
                prop_assert!(os.lambda_prime().is_injective() || !point);
            }
            let k1 = onestep_on_square(&of, &og, s1).unwrap();
            let k2 = onestep_on_square(&og, &oe, s2).unwrap();
            let k21 = onestep_on_square(&of, &oe, &compose_squares(s2, s1).unwrap()).unwrap();
            prop_assert_eq!(&k2.compose(&k1).unwrap(), &k21);
            // K'(s) is a map of factorisations
            prop_assert_eq!(k1.compose(of.lambda_prime()).unwrap(), og.lambda_prime().compose(s1.top()).unwrap());
            prop_assert_eq!(og.rho_prime().compose(&k1).unwrap(), s1.bottom().compose(of.rho_prime()).unwrap());
            // naturality of the unit λ'
            let via_unit = compose_squares(&og.unit_square(), s1).unwrap();
            let ks = Square::new(of.rho_arrow(), og.rho_arrow(), k1.clone(), s1.bottom().clone()).unwrap();
            let via_k = compose_squares(&ks, &of.unit_square()).unwrap();
            prop_assert_eq!(via_unit, via_k);
        }
    }
}
