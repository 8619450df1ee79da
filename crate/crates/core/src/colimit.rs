//! Finite colimits of presheaves.
//!
//! Everything reduces to coproducts and coequalizers. Output element ids are
//! canonical: coproduct blocks appear in part order, and quotient classes
//! are numbered by their smallest member.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{same_base, FinCategory, Presheaf, PresheafMap};

/// Which colimit a cocone came from, with the diagram it is over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Coproduct,
    Coequalizer { f: PresheafMap, g: PresheafMap },
    Pushout { f: PresheafMap, g: PresheafMap },
    Chain { maps: Vec<PresheafMap> },
}

impl Provenance {
    pub fn kind(&self) -> &'static str {
        match self {
            Provenance::Coproduct => "coproduct",
            Provenance::Coequalizer { .. } => "coequalizer",
            Provenance::Pushout { .. } => "pushout",
            Provenance::Chain { .. } => "chain",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cocone {
    apex: Presheaf,
    legs: Vec<PresheafMap>,
    provenance: Provenance,
    /// For each object and apex element, one `(leg, element)` hitting it:
    /// the smallest such pair in canonical order.
    representatives: Vec<Vec<(usize, usize)>>,
}

impl Cocone {
    pub fn apex(&self) -> &Presheaf {
        &self.apex
    }

    pub fn legs(&self) -> &[PresheafMap] {
        &self.legs
    }

    pub fn leg(&self, i: usize) -> &PresheafMap {
        &self.legs[i]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn representative(&self, obj: usize, elt: usize) -> (usize, usize) {
        self.representatives[obj][elt]
    }

    /// The map out of the apex induced by a compatible family `maps`, one per
    /// leg. Fails unless the family really factors through the apex.
    pub fn factor(&self, maps: &[PresheafMap]) -> Result<PresheafMap> {
        if maps.len() != self.legs.len() {
            return Err(Error::Incompatible(format!(
                "factor: {} maps for {} legs",
                maps.len(),
                self.legs.len()
            )));
        }
        let target = match maps.first() {
            Some(m) => m.target().clone(),
            None => {
                // empty cocone over nothing: the apex is initial
                return Err(Error::Incompatible("factor: empty family has no target".into()));
            }
        };
        for (i, (m, leg)) in maps.iter().zip(&self.legs).enumerate() {
            if m.source() != leg.source() || m.target() != &target {
                return Err(Error::Incompatible(format!("factor: map {i} does not match leg {i}")));
            }
        }
        let components = self
            .representatives
            .iter()
            .enumerate()
            .map(|(obj, reps)| reps.iter().map(|&(l, e)| maps[l].apply(obj, e)).collect())
            .collect();
        let u = PresheafMap::from_parts_unchecked(self.apex.clone(), target, components);
        for (i, (m, leg)) in maps.iter().zip(&self.legs).enumerate() {
            if let Some((obj, x, got, want)) = u.compose(leg)?.first_difference(m) {
                return Err(Error::Invalid(format!(
                    "factor: family is not a cocone (leg {i}, object {obj}, element {x}: {got} vs {want})"
                )));
            }
        }
        debug_assert!(u.validate().is_ok());
        Ok(u)
    }

    /// The map out of the apex of an empty coproduct.
    pub fn factor_initial(&self, target: &Presheaf) -> Result<PresheafMap> {
        if !self.legs.is_empty() {
            return Err(Error::Incompatible("factor_initial: cocone has legs".into()));
        }
        Ok(PresheafMap::from_empty(&self.apex, target))
    }

    /// Re-checks that the legs commute with the recorded diagram.
    pub fn check_commutes(&self) -> bool {
        let eq = |a: Result<PresheafMap>, b: Result<PresheafMap>| matches!((a, b), (Ok(a), Ok(b)) if a == b);
        match &self.provenance {
            Provenance::Coproduct => true,
            Provenance::Coequalizer { f, g } => eq(self.legs[0].compose(f), self.legs[0].compose(g)),
            Provenance::Pushout { f, g } => eq(self.legs[0].compose(f), self.legs[1].compose(g)),
            Provenance::Chain { maps } => maps
                .iter()
                .enumerate()
                .all(|(i, m)| eq(self.legs[i + 1].compose(m), Ok(self.legs[i].clone()))),
        }
    }
}

/// The disjoint union of `parts`, with its injections.
pub fn coproduct(base: &Arc<FinCategory>, parts: &[Presheaf]) -> Result<Cocone> {
    for (i, p) in parts.iter().enumerate() {
        if !same_base(p.base(), base) {
            return Err(Error::Incompatible(format!("coproduct: part {i} lives over a different category")));
        }
    }
    let n_obj = base.object_count();
    let mut offsets = vec![vec![0; n_obj]; parts.len()];
    let mut sizes = vec![0; n_obj];
    for (i, p) in parts.iter().enumerate() {
        for (obj, size) in sizes.iter_mut().enumerate() {
            offsets[i][obj] = *size;
            *size += p.size(obj);
        }
    }
    let mut representatives: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_obj];
    for (i, p) in parts.iter().enumerate() {
        for (obj, reps) in representatives.iter_mut().enumerate() {
            reps.extend((0..p.size(obj)).map(|e| (i, e)));
        }
    }
    let apex = Presheaf::build(base, sizes, |m, y| {
        let cod = base.morphism(m).cod;
        let dom = base.morphism(m).dom;
        let (i, e) = representatives[cod][y];
        offsets[i][dom] + parts[i].act(m, e)
    });
    let legs = parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let components = (0..n_obj).map(|obj| (0..p.size(obj)).map(|e| offsets[i][obj] + e).collect()).collect();
            PresheafMap::trusted(p.clone(), apex.clone(), components)
        })
        .collect();
    Ok(Cocone {
        apex,
        legs,
        provenance: Provenance::Coproduct,
        representatives,
    })
}

/// The initial presheaf.
pub fn initial(base: &Arc<FinCategory>) -> Presheaf {
    Presheaf::empty(base)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`, keeping the smaller root.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Quotients `y` by the smallest presheaf congruence containing `pairs`
/// (given per object). Returns the quotient and the class of each element.
fn quotient(y: &Presheaf, pairs: &[Vec<(usize, usize)>]) -> (Presheaf, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let cat = y.base();
    let mut uf: Vec<UnionFind> = y.sizes().iter().map(|&n| UnionFind::new(n)).collect();
    for (obj, ps) in pairs.iter().enumerate() {
        for &(a, b) in ps {
            uf[obj].union(a, b);
        }
    }
    // Identified elements must have identified restrictions. Each element is
    // compared with its root; repeat until nothing merges.
    loop {
        let mut merged = false;
        for (m, mor) in cat.morphisms().iter().enumerate() {
            if cat.is_identity(m) {
                continue;
            }
            for e in 0..y.size(mor.cod) {
                let r = uf[mor.cod].find(e);
                if r != e {
                    let (a, b) = (y.act(m, e), y.act(m, r));
                    merged |= uf[mor.dom].union(a, b);
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut class_of = Vec::with_capacity(cat.object_count());
    let mut reps = Vec::with_capacity(cat.object_count());
    for (obj, u) in uf.iter_mut().enumerate() {
        let mut ids = vec![usize::MAX; y.size(obj)];
        let mut r = Vec::new();
        let mut classes = Vec::with_capacity(y.size(obj));
        for e in 0..y.size(obj) {
            let root = u.find(e);
            if ids[root] == usize::MAX {
                ids[root] = r.len();
                r.push(e);
            }
            classes.push(ids[root]);
        }
        class_of.push(classes);
        reps.push(r);
    }
    let sizes = reps.iter().map(Vec::len).collect();
    let apex = Presheaf::build(cat, sizes, |m, c| {
        let mor = cat.morphism(m);
        class_of[mor.dom][y.act(m, reps[mor.cod][c])]
    });
    debug_assert!(apex.validate().is_ok(), "{}", apex.validate());
    (apex, class_of, reps)
}

/// The coequalizer of a parallel pair, with its quotient map as sole leg.
pub fn coequalizer(f: &PresheafMap, g: &PresheafMap) -> Result<Cocone> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::Incompatible("coequalizer: maps are not parallel".into()));
    }
    let pairs: Vec<Vec<(usize, usize)>> = f
        .components()
        .iter()
        .zip(g.components())
        .map(|(a, b)| a.iter().copied().zip(b.iter().copied()).collect())
        .collect();
    let (apex, class_of, reps) = quotient(f.target(), &pairs);
    let q = PresheafMap::trusted(f.target().clone(), apex.clone(), class_of);
    Ok(Cocone {
        apex,
        legs: vec![q],
        provenance: Provenance::Coequalizer {
            f: f.clone(),
            g: g.clone(),
        },
        representatives: reps.into_iter().map(|r| r.into_iter().map(|e| (0, e)).collect()).collect(),
    })
}

/// Quotient of a coproduct by a list of identifications between its parts,
/// each given as a pair of maps `(src → parts[i], src → parts[j])`.
fn glue(
    base: &Arc<FinCategory>,
    parts: &[Presheaf],
    relations: &[(usize, &PresheafMap, usize, &PresheafMap)],
    provenance: Provenance,
) -> Result<Cocone> {
    let sum = coproduct(base, parts)?;
    let n_obj = base.object_count();
    let mut pairs = vec![Vec::new(); n_obj];
    for &(i, a, j, b) in relations {
        for (obj, ps) in pairs.iter_mut().enumerate() {
            for x in 0..a.source().size(obj) {
                ps.push((sum.leg(i).apply(obj, a.apply(obj, x)), sum.leg(j).apply(obj, b.apply(obj, x))));
            }
        }
    }
    let (apex, class_of, reps) = quotient(sum.apex(), &pairs);
    let legs = sum
        .legs()
        .iter()
        .map(|inj| {
            let components = (0..n_obj)
                .map(|obj| inj.component(obj).iter().map(|&e| class_of[obj][e]).collect())
                .collect();
            PresheafMap::trusted(inj.source().clone(), apex.clone(), components)
        })
        .collect();
    let representatives = reps
        .iter()
        .enumerate()
        .map(|(obj, r)| r.iter().map(|&e| sum.representative(obj, e)).collect())
        .collect();
    Ok(Cocone {
        apex,
        legs,
        provenance,
        representatives,
    })
}

/// The pushout of `B ← A → C`; leg 0 leaves `B`, leg 1 leaves `C`.
pub fn pushout(f: &PresheafMap, g: &PresheafMap) -> Result<Cocone> {
    if f.source() != g.source() {
        return Err(Error::Incompatible("pushout: maps have different sources".into()));
    }
    let base = f.source().base().clone();
    let parts = [f.target().clone(), g.target().clone()];
    glue(
        &base,
        &parts,
        &[(0, f, 1, g)],
        Provenance::Pushout {
            f: f.clone(),
            g: g.clone(),
        },
    )
}

/// The colimit of `start = K_0 → K_1 → … → K_n`. Leg `i` leaves `K_i`.
pub fn chain_colimit(start: &Presheaf, maps: &[PresheafMap]) -> Result<Cocone> {
    let mut stages = vec![start.clone()];
    for (i, m) in maps.iter().enumerate() {
        if m.source() != &stages[i] {
            return Err(Error::Incompatible(format!("chain_colimit: map {i} does not start at stage {i}")));
        }
        stages.push(m.target().clone());
    }
    let ids: Vec<PresheafMap> = stages[..maps.len()].iter().map(PresheafMap::identity).collect();
    let relations: Vec<_> = (0..maps.len()).map(|i| (i, &ids[i], i + 1, &maps[i])).collect();
    glue(
        start.base(),
        &stages,
        &relations,
        Provenance::Chain { maps: maps.to_vec() },
    )
}
