//! The arrow category: maps as objects, commuting squares as morphisms, and
//! the lifting problems a set of generating maps poses against a map.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{enumerate_maps, enumerate_maps_where, same_base, FinCategory, Presheaf, PresheafMap};

/// A map of presheaves viewed as an object of the arrow category.
#[derive(Clone)]
pub struct ArrowObj {
    map: PresheafMap,
    label: Option<String>,
}

impl PartialEq for ArrowObj {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

impl Eq for ArrowObj {}

impl fmt::Debug for ArrowObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l}: {:?}", self.map),
            None => write!(f, "{:?}", self.map),
        }
    }
}

impl ArrowObj {
    pub fn new(map: PresheafMap) -> Result<Self> {
        let report = map.validate();
        if !report.is_ok() {
            return Err(Error::Invalid(format!("arrow: {report}")));
        }
        Ok(ArrowObj { map, label: None })
    }

    pub(crate) fn trusted(map: PresheafMap) -> Self {
        ArrowObj { map, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn map(&self) -> &PresheafMap {
        &self.map
    }

    pub fn domain(&self) -> &Presheaf {
        self.map.source()
    }

    pub fn codomain(&self) -> &Presheaf {
        self.map.target()
    }
}

impl From<PresheafMap> for ArrowObj {
    fn from(map: PresheafMap) -> Self {
        ArrowObj::trusted(map)
    }
}

/// A commuting square `(top, bottom): source → target`, i.e.
/// `target ∘ top = bottom ∘ source`.
#[derive(Clone, PartialEq, Eq)]
pub struct Square {
    source: ArrowObj,
    target: ArrowObj,
    top: PresheafMap,
    bottom: PresheafMap,
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Square")
            .field("top", &self.top.components())
            .field("bottom", &self.bottom.components())
            .finish()
    }
}

impl Square {
    pub fn new(source: ArrowObj, target: ArrowObj, top: PresheafMap, bottom: PresheafMap) -> Result<Self> {
        if top.source() != source.domain() || top.target() != target.domain() {
            return Err(Error::Incompatible("square: top edge does not run between the domains".into()));
        }
        if bottom.source() != source.codomain() || bottom.target() != target.codomain() {
            return Err(Error::Incompatible("square: bottom edge does not run between the codomains".into()));
        }
        let sq = Square {
            source,
            target,
            top,
            bottom,
        };
        if let Some((obj, x, l, r)) = sq.commutation_failure() {
            return Err(Error::Invalid(format!(
                "square does not commute at object {obj}, element {x}: g∘h = {l}, k∘f = {r}"
            )));
        }
        Ok(sq)
    }

    pub(crate) fn trusted(source: ArrowObj, target: ArrowObj, top: PresheafMap, bottom: PresheafMap) -> Self {
        let sq = Square {
            source,
            target,
            top,
            bottom,
        };
        debug_assert!(sq.commutation_failure().is_none());
        sq
    }

    pub fn identity(arrow: &ArrowObj) -> Self {
        Square {
            source: arrow.clone(),
            target: arrow.clone(),
            top: PresheafMap::identity(arrow.domain()),
            bottom: PresheafMap::identity(arrow.codomain()),
        }
    }

    pub fn source(&self) -> &ArrowObj {
        &self.source
    }

    pub fn target(&self) -> &ArrowObj {
        &self.target
    }

    pub fn top(&self) -> &PresheafMap {
        &self.top
    }

    pub fn bottom(&self) -> &PresheafMap {
        &self.bottom
    }

    /// First element at which `g∘h ≠ k∘f`, if any.
    pub fn commutation_failure(&self) -> Option<(usize, usize, usize, usize)> {
        let f = self.source.map();
        let g = self.target.map();
        for (obj, n) in f.source().sizes().iter().enumerate() {
            for x in 0..*n {
                let l = g.apply(obj, self.top.apply(obj, x));
                let r = self.bottom.apply(obj, f.apply(obj, x));
                if l != r {
                    return Some((obj, x, l, r));
                }
            }
        }
        None
    }

    pub fn commutes(&self) -> bool {
        self.commutation_failure().is_none()
    }
}

/// Pastes `s1: f → g` and `s2: g → e` into `f → e`.
pub fn compose_squares(s2: &Square, s1: &Square) -> Result<Square> {
    if s1.target != s2.source {
        return Err(Error::Incompatible("compose_squares: middle arrows differ".into()));
    }
    let top = s2.top.compose(&s1.top)?;
    let bottom = s2.bottom.compose(&s1.bottom)?;
    Ok(Square::trusted(s1.source.clone(), s2.target.clone(), top, bottom))
}

/// A set of generating maps, viewed as a discrete subcategory of the arrow
/// category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    base: Arc<FinCategory>,
    members: Vec<ArrowObj>,
}

impl GeneratingSet {
    pub fn new(base: Arc<FinCategory>, members: Vec<ArrowObj>) -> Result<Self> {
        for (i, m) in members.iter().enumerate() {
            if !same_base(m.domain().base(), &base) {
                return Err(Error::Incompatible(format!("generator {i} lives over a different category")));
            }
            let report = m.map().validate();
            if !report.is_ok() {
                return Err(Error::Invalid(format!("generator {i}: {report}")));
            }
        }
        Ok(GeneratingSet { base, members })
    }

    pub fn empty(base: Arc<FinCategory>) -> Self {
        GeneratingSet {
            base,
            members: Vec::new(),
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn members(&self) -> &[ArrowObj] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All commuting squares from `j` to `g`, ordered by the enumeration order of
/// the top edge, then of the bottom edge.
pub fn enumerate_squares(j: &ArrowObj, g: &ArrowObj) -> Result<Vec<Square>> {
    if !j.domain().shares_base(g.domain()) {
        return Err(Error::Incompatible("enumerate_squares: arrows over different categories".into()));
    }
    let f = j.map();
    let gm = g.map();
    let mut squares = Vec::new();
    for k in enumerate_maps(j.codomain(), g.codomain())? {
        let tops = enumerate_maps_where(j.domain(), g.domain(), |obj, x, t| {
            gm.apply(obj, t) == k.apply(obj, f.apply(obj, x))
        })?;
        for h in tops {
            squares.push(Square::trusted(j.clone(), g.clone(), h, k.clone()));
        }
    }
    squares.sort_by(|a, b| {
        (a.top.components(), a.bottom.components()).cmp(&(b.top.components(), b.bottom.components()))
    });
    Ok(squares)
}
