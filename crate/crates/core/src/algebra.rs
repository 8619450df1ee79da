//! Algebras for the one-step pointed endofunctor and lifting tables, and the
//! bijection between them.

use std::collections::HashMap;

use crate::arrow::{enumerate_squares, ArrowObj, GeneratingSet, Square};
use crate::error::{Error, Result};
use crate::onestep::{build_onestep, OneStep, SquareIndex};
use crate::presheaf::{enumerate_maps_where, PresheafMap};
use crate::sequence::SequenceState;

/// `p: K'g → C` with `p∘λ'_g = id_C` and `g∘p = ρ'_g`.
#[derive(Clone, Debug)]
pub struct AlgebraStructure {
    onestep: OneStep,
    p: PresheafMap,
}

impl AlgebraStructure {
    pub fn new(onestep: OneStep, p: PresheafMap) -> Result<Self> {
        let a = AlgebraStructure { onestep, p };
        a.check()?;
        Ok(a)
    }

    pub fn target(&self) -> &ArrowObj {
        self.onestep.input()
    }

    pub fn onestep(&self) -> &OneStep {
        &self.onestep
    }

    pub fn p(&self) -> &PresheafMap {
        &self.p
    }

    pub fn check(&self) -> Result<()> {
        let os = &self.onestep;
        if self.p.source() != os.k_prime() || self.p.target() != os.input().domain() {
            return Err(Error::Precondition("algebra map must run K'g → C".into()));
        }
        if self.p.compose(os.lambda_prime())? != PresheafMap::identity(os.input().domain()) {
            return Err(Error::Precondition("algebra: p∘λ' ≠ id".into()));
        }
        if &os.input().map().compose(&self.p)? != os.rho_prime() {
            return Err(Error::Precondition("algebra: g∘p ≠ ρ'".into()));
        }
        Ok(())
    }
}

/// Generator index with the top and bottom tables of a square.
type SquareKey = (usize, Vec<Vec<usize>>, Vec<Vec<usize>>);

/// A chosen filler for every square from every generator into `g`.
#[derive(Clone, Debug)]
pub struct LiftingTable {
    target: ArrowObj,
    gens: GeneratingSet,
    squares: Vec<(SquareIndex, Square)>,
    fillers: Vec<PresheafMap>,
    lookup: HashMap<SquareKey, usize>,
}

impl PartialEq for LiftingTable {
    fn eq(&self, other: &Self) -> bool {
        self.target == other.target && self.squares == other.squares && self.fillers == other.fillers
    }
}

impl LiftingTable {
    pub fn new(gens: &GeneratingSet, target: &ArrowObj, squares: Vec<(SquareIndex, Square)>, fillers: Vec<PresheafMap>) -> Result<Self> {
        if squares.len() != fillers.len() {
            return Err(Error::Incompatible("lifting table: one filler per square".into()));
        }
        let lookup = squares
            .iter()
            .enumerate()
            .map(|(i, (idx, s))| ((idx.generator, s.top().components().to_vec(), s.bottom().components().to_vec()), i))
            .collect();
        let t = LiftingTable {
            target: target.clone(),
            gens: gens.clone(),
            squares,
            fillers,
            lookup,
        };
        t.check()?;
        Ok(t)
    }

    pub fn target(&self) -> &ArrowObj {
        &self.target
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn squares(&self) -> &[(SquareIndex, Square)] {
        &self.squares
    }

    pub fn fillers(&self) -> &[PresheafMap] {
        &self.fillers
    }

    pub fn len(&self) -> usize {
        self.fillers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fillers.is_empty()
    }

    /// The filler of the square `(h, k)` from generator `generator`.
    pub fn filler(&self, generator: usize, top: &PresheafMap, bottom: &PresheafMap) -> Option<&PresheafMap> {
        self.lookup
            .get(&(generator, top.components().to_vec(), bottom.components().to_vec()))
            .map(|&i| &self.fillers[i])
    }

    /// Both triangles for every entry.
    pub fn check(&self) -> Result<()> {
        for ((idx, s), d) in self.squares.iter().zip(&self.fillers) {
            check_filler(s, d).map_err(|e| Error::Precondition(format!("square {}/{}: {e}", idx.generator, idx.order)))?;
        }
        Ok(())
    }
}

/// `d∘j = h` and `g∘d = k`.
pub fn check_filler(s: &Square, d: &PresheafMap) -> Result<()> {
    if &d.compose(s.source().map())? != s.top() {
        return Err(Error::Precondition("upper triangle fails: d∘j ≠ h".into()));
    }
    if &s.target().map().compose(d)? != s.bottom() {
        return Err(Error::Precondition("lower triangle fails: g∘d ≠ k".into()));
    }
    Ok(())
}

/// `p = K_{γ,γ+1}⁻¹ ∘ σ_γ` on the converged right factor `ρ_γ`.
pub fn extract_algebra(state: &SequenceState) -> Result<AlgebraStructure> {
    let gamma = state.converged_at().ok_or(Error::AbsentAlgebra)?;
    if gamma + 1 >= state.len() {
        return Err(Error::AbsentAlgebra);
    }
    let stage = state.stage(gamma);
    let os = stage.onestep().ok_or(Error::AbsentAlgebra)?.clone();
    let sigma = stage.sigma().ok_or(Error::AbsentAlgebra)?;
    let inv = state
        .connect(gamma, gamma + 1)?
        .inverse()
        .ok_or_else(|| Error::Internal("converged connecting map is not invertible".into()))?;
    let p = inv.compose(sigma)?;
    AlgebraStructure::new(os, p).map_err(|e| Error::Internal(format!("extracted algebra: {e}")))
}

/// Filler of square `x` is `p ∘ ξ ∘ inj_x`.
pub fn fillers_from_algebra(a: &AlgebraStructure) -> Result<LiftingTable> {
    let os = &a.onestep;
    let fillers = (0..os.squares().len())
        .map(|x| a.p.compose(&os.cell(x)))
        .collect::<Result<Vec<_>>>()?;
    LiftingTable::new(os.generators(), os.input(), os.squares().to_vec(), fillers)
        .map_err(|e| Error::Internal(format!("fillers from algebra: {e}")))
}

/// For each element of `src` hit by `via`, the value the constrained map
/// must take there; `Err(())` when two preimages demand different values.
fn forced_values(via: &PresheafMap, demanded: &PresheafMap) -> std::result::Result<Vec<Vec<Option<usize>>>, ()> {
    let mut forced: Vec<Vec<Option<usize>>> = via.target().sizes().iter().map(|&n| vec![None; n]).collect();
    for (obj, c) in via.components().iter().enumerate() {
        for (a, &b) in c.iter().enumerate() {
            let want = demanded.apply(obj, a);
            match forced[obj][b] {
                Some(v) if v != want => return Err(()),
                _ => forced[obj][b] = Some(want),
            }
        }
    }
    Ok(forced)
}

/// All maps `d: B → C` with `d∘via = top` and `g∘d = bottom`.
pub(crate) fn constrained_maps(via: &PresheafMap, top: &PresheafMap, g: &PresheafMap, bottom: &PresheafMap) -> Result<Vec<PresheafMap>> {
    let Ok(forced) = forced_values(via, top) else {
        return Ok(Vec::new());
    };
    enumerate_maps_where(via.target(), g.source(), |obj, e, t| {
        forced[obj][e].is_none_or(|v| v == t) && g.apply(obj, t) == bottom.apply(obj, e)
    })
}

pub fn enumerate_algebra_structures(gens: &GeneratingSet, g: &ArrowObj) -> Result<Vec<AlgebraStructure>> {
    let os = build_onestep(gens, g)?;
    let id = PresheafMap::identity(g.domain());
    let ps = constrained_maps(os.lambda_prime(), &id, g.map(), os.rho_prime())?;
    Ok(ps
        .into_iter()
        .map(|p| AlgebraStructure {
            onestep: os.clone(),
            p,
        })
        .collect())
}

/// Fillers of one square, in enumeration order.
pub fn filler_set(s: &Square) -> Result<Vec<PresheafMap>> {
    constrained_maps(s.source().map(), s.top(), s.target().map(), s.bottom())
}

fn squares_into(gens: &GeneratingSet, g: &ArrowObj) -> Result<Vec<(SquareIndex, Square)>> {
    let mut squares = Vec::new();
    for (gi, j) in gens.members().iter().enumerate() {
        for (order, s) in enumerate_squares(j, g)?.into_iter().enumerate() {
            squares.push((SquareIndex { generator: gi, order }, s));
        }
    }
    Ok(squares)
}

/// `∏_x |fillers(x)|`, saturating.
pub fn count_lifting_tables(gens: &GeneratingSet, g: &ArrowObj) -> Result<usize> {
    let mut n: usize = 1;
    for (_, s) in squares_into(gens, g)? {
        n = n.saturating_mul(filler_set(&s)?.len());
    }
    Ok(n)
}

/// Every lifting table, as the cartesian product of the per-square filler
/// sets (the first square varies slowest).
pub fn enumerate_lifting_tables(gens: &GeneratingSet, g: &ArrowObj) -> Result<Vec<LiftingTable>> {
    let squares = squares_into(gens, g)?;
    let choices = squares.iter().map(|(_, s)| filler_set(s)).collect::<Result<Vec<_>>>()?;
    let mut tables = Vec::new();
    if choices.iter().any(Vec::is_empty) {
        return Ok(tables);
    }
    let mut pick = vec![0usize; choices.len()];
    loop {
        let fillers = pick.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        tables.push(LiftingTable::new(gens, g, squares.clone(), fillers)?);
        let mut pos = choices.len();
        loop {
            if pos == 0 {
                return Ok(tables);
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < choices[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bijection {
    pub algebras: usize,
    pub tables: usize,
    /// `mapping[i]` is the table that algebra `i` induces.
    pub mapping: Vec<usize>,
    pub holds: bool,
}

/// Checks that `p ↦ fillers_from_algebra(p)` is a bijection from algebra
/// structures on `g` to lifting tables on `g`.
pub fn check_bijection(gens: &GeneratingSet, g: &ArrowObj) -> Result<Bijection> {
    let algebras = enumerate_algebra_structures(gens, g)?;
    let tables = enumerate_lifting_tables(gens, g)?;
    let position: HashMap<Vec<Vec<Vec<usize>>>, usize> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| (t.fillers.iter().map(|f| f.components().to_vec()).collect(), i))
        .collect();
    let mut mapping = Vec::with_capacity(algebras.len());
    let mut hit = vec![false; tables.len()];
    let mut holds = algebras.len() == tables.len();
    for a in &algebras {
        let t = fillers_from_algebra(a)?;
        let key: Vec<Vec<Vec<usize>>> = t.fillers.iter().map(|f| f.components().to_vec()).collect();
        match position.get(&key) {
            Some(&i) => {
                holds &= !std::mem::replace(&mut hit[i], true);
                mapping.push(i);
            }
            None => {
                holds = false;
                mapping.push(usize::MAX);
            }
        }
    }
    Ok(Bijection {
        algebras: algebras.len(),
        tables: tables.len(),
        mapping,
        holds: holds && hit.iter().all(|&h| h),
    })
}

/// The table on `g∘f` whose filler of `(h, k)` is `tf(h, tg(f∘h, k))`.
pub fn compose_lifting_tables(tf: &LiftingTable, tg: &LiftingTable) -> Result<LiftingTable> {
    let f = tf.target.map();
    let g = tg.target.map();
    if f.target() != g.source() {
        return Err(Error::Incompatible("compose_lifting_tables: maps are not composable".into()));
    }
    if tf.gens != tg.gens {
        return Err(Error::Incompatible("compose_lifting_tables: different generating sets".into()));
    }
    let gf = ArrowObj::from(g.compose(f)?);
    let squares = squares_into(&tf.gens, &gf)?;
    let mut fillers = Vec::with_capacity(squares.len());
    for (idx, s) in &squares {
        let fh = f.compose(s.top())?;
        let j = tg
            .filler(idx.generator, &fh, s.bottom())
            .ok_or_else(|| Error::Internal("compose_lifting_tables: square missing from the table on g".into()))?;
        let d = tf
            .filler(idx.generator, s.top(), j)
            .ok_or_else(|| Error::Internal("compose_lifting_tables: square missing from the table on f".into()))?;
        fillers.push(d.clone());
    }
    LiftingTable::new(&tf.gens, &gf, squares, fillers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::sequence::{run_garner, OrdinalBudget};

    fn func(s: usize, t: usize, v: &[usize]) -> ArrowObj {
        ArrowObj::from(catalog::function(s, t, v).unwrap())
    }

    /// `∏_d |g⁻¹(d)|`, the number of sections of a map of finite sets.
    fn sections(g: &ArrowObj) -> usize {
        let c = g.map().component(0);
        (0..g.codomain().size(0)).map(|d| c.iter().filter(|&&x| x == d).count()).product()
    }

    #[test]
    fn empty_generating_set() {
        let g = func(2, 2, &[0, 0]);
        let gens = GeneratingSet::empty(catalog::terminal());
        let s = run_garner(&gens, &g, OrdinalBudget::default()).unwrap();
        let a = extract_algebra(&s).unwrap();
        assert_eq!(a.p(), &PresheafMap::identity(g.domain()));
        assert!(fillers_from_algebra(&a).unwrap().is_empty());
    }

    #[test]
    fn algebra_on_the_empty_map() {
        let s = run_garner(&catalog::point(), &func(0, 1, &[]), OrdinalBudget::default()).unwrap();
        let a = extract_algebra(&s).unwrap();
        assert_eq!(a.p().component(0), &[0, 0]);
    }

    #[test]
    fn cograph_algebra_merges_the_two_copies() {
        let g = func(2, 3, &[0, 0]);
        let s = run_garner(&catalog::point(), &g, OrdinalBudget::default()).unwrap();
        let a = extract_algebra(&s).unwrap();
        // K'(C⊔D) = (C⊔D)⊔D; both copies of d land on the adjoined d
        assert_eq!(a.p().component(0), &[0, 1, 2, 3, 4, 2, 3, 4]);
        let t = fillers_from_algebra(&a).unwrap();
        let chosen: Vec<usize> = t.fillers().iter().map(|f| f.apply(0, 0)).collect();
        assert_eq!(chosen, vec![2, 3, 4]);
    }

    #[test]
    fn not_converged_has_no_algebra() {
        let x = catalog::reflexive_graph(1, &[]).unwrap();
        let g = catalog::to_terminal(&x);
        let gens = catalog::horns(&catalog::delta_le1(), 1);
        let s = run_garner(&gens, &g, OrdinalBudget::new(1, 0).unwrap()).unwrap();
        assert!(s.is_exhausted());
        assert!(matches!(extract_algebra(&s), Err(Error::AbsentAlgebra)));
    }

    #[test]
    fn sections_of_a_constant_map() {
        let g = func(2, 1, &[0, 0]);
        let b = check_bijection(&catalog::point(), &g).unwrap();
        assert_eq!((b.algebras, b.tables), (2, 2));
        assert!(b.holds);
        assert_eq!(b.tables, sections(&g));
    }

    #[test]
    fn non_surjection_has_nothing() {
        let g = func(1, 2, &[0]);
        let b = check_bijection(&catalog::point(), &g).unwrap();
        assert_eq!((b.algebras, b.tables), (0, 0));
        assert!(b.holds);
    }

    #[test]
    fn codiagonal_on_a_mono_is_forced() {
        let g = func(2, 3, &[2, 0]);
        let b = check_bijection(&catalog::codiagonal(), &g).unwrap();
        assert_eq!((b.algebras, b.tables), (1, 1));
        let a = &enumerate_algebra_structures(&catalog::codiagonal(), &g).unwrap()[0];
        let t = fillers_from_algebra(a).unwrap();
        for ((_, s), d) in t.squares().iter().zip(t.fillers()) {
            assert_eq!(d.apply(0, 0), s.top().apply(0, 0));
        }
    }

    #[test]
    fn bijection_on_all_small_sets() {
        for c in 0..=3 {
            for d in 0usize..=3 {
                let n = d.pow(c as u32);
                for code in 0..n {
                    let v: Vec<usize> = (0..c).map(|i| code / d.pow(i as u32) % d).collect();
                    let g = func(c, d, &v);
                    for gens in [catalog::point(), catalog::codiagonal()] {
                        let b = check_bijection(&gens, &g).unwrap();
                        assert!(b.holds, "{v:?}");
                        assert_eq!(b.tables, count_lifting_tables(&gens, &g).unwrap());
                    }
                    assert_eq!(check_bijection(&catalog::point(), &g).unwrap().tables, sections(&g));
                }
            }
        }
    }

    #[test]
    fn composition_with_identity_table() {
        let f = func(3, 2, &[0, 1, 1]);
        let id = func(2, 2, &[0, 1]);
        let gens = catalog::point();
        let tid = &enumerate_lifting_tables(&gens, &id).unwrap()[0];
        for tf in enumerate_lifting_tables(&gens, &f).unwrap() {
            let c = compose_lifting_tables(&tf, tid).unwrap();
            assert_eq!(c.fillers(), tf.fillers());
        }
    }

    #[test]
    fn point_tables_compose_sections() {
        // tables for {0→1} are sections; the composite picks s_f(s_g(e))
        let f = func(3, 2, &[0, 1, 1]);
        let g = func(2, 1, &[0, 0]);
        let gens = catalog::point();
        for tf in enumerate_lifting_tables(&gens, &f).unwrap() {
            for tg in enumerate_lifting_tables(&gens, &g).unwrap() {
                let c = compose_lifting_tables(&tf, &tg).unwrap();
                let sg = tg.fillers()[0].apply(0, 0);
                let sf = tf.fillers()[sg].apply(0, 0);
                assert_eq!(c.fillers()[0].apply(0, 0), sf);
            }
        }
    }
}
