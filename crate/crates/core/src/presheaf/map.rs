use std::fmt;

use super::object::Presheaf;
use super::validate::{ValidationReport, Violation};
use crate::error::{Error, Result};

/// A natural transformation between two finite presheaves on the same base.
#[derive(Clone, PartialEq, Eq)]
pub struct PresheafMap {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl fmt::Debug for PresheafMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?} {:?}", self.source, self.target, self.components)
    }
}

impl PresheafMap {
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        if !source.shares_base(&target) {
            return Err(Error::Incompatible("map source and target live over different categories".into()));
        }
        let map = Self::from_parts_unchecked(source, target, components);
        let report = map.validate();
        if report.is_ok() {
            Ok(map)
        } else {
            Err(Error::Invalid(format!("map: {report}")))
        }
    }

    pub fn from_parts_unchecked(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Self {
        PresheafMap {
            source,
            target,
            components,
        }
    }

    /// Constructs a map the caller has already proven natural. Checked in
    /// debug builds.
    pub(crate) fn trusted(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Self {
        let map = Self::from_parts_unchecked(source, target, components);
        debug_assert!(map.validate().is_ok(), "{}", map.validate());
        map
    }

    pub fn identity(x: &Presheaf) -> Self {
        let components = x.sizes().iter().map(|&n| (0..n).collect()).collect();
        Self::from_parts_unchecked(x.clone(), x.clone(), components)
    }

    /// The unique map out of an empty presheaf.
    pub fn from_empty(empty: &Presheaf, target: &Presheaf) -> Self {
        Self::trusted(empty.clone(), target.clone(), vec![Vec::new(); empty.sizes().len()])
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(source: &Presheaf, terminal: &Presheaf) -> Self {
        let components = source.sizes().iter().map(|&n| vec![0; n]).collect();
        Self::trusted(source.clone(), terminal.clone(), components)
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, obj: usize) -> &[usize] {
        &self.components[obj]
    }

    pub fn apply(&self, obj: usize, elt: usize) -> usize {
        self.components[obj][elt]
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &PresheafMap) -> Result<PresheafMap> {
        if f.target != self.source {
            return Err(Error::Incompatible(format!(
                "cannot compose: codomain {:?} differs from domain {:?}",
                f.target, self.source
            )));
        }
        let components = f
            .components
            .iter()
            .zip(&self.components)
            .map(|(fc, gc)| fc.iter().map(|&x| gc[x]).collect())
            .collect();
        Ok(Self::from_parts_unchecked(f.source.clone(), self.target.clone(), components))
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().enumerate().all(|(obj, c)| {
            let mut seen = vec![false; self.target.size(obj)];
            c.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.components.iter().enumerate().all(|(obj, c)| {
            let mut seen = vec![false; self.target.size(obj)];
            c.iter().for_each(|&y| seen[y] = true);
            seen.into_iter().all(|s| s)
        })
    }

    /// Componentwise bijective.
    pub fn is_iso(&self) -> bool {
        self.source.sizes() == self.target.sizes() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<PresheafMap> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut inv = vec![0; c.len()];
                for (x, &y) in c.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(Self::from_parts_unchecked(self.target.clone(), self.source.clone(), components))
    }

    /// First element where two parallel maps disagree, as
    /// `(object, element, self value, other value)`.
    pub fn first_difference(&self, other: &PresheafMap) -> Option<(usize, usize, usize, usize)> {
        for (obj, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            for (x, (&u, &v)) in a.iter().zip(b).enumerate() {
                if u != v {
                    return Some((obj, x, u, v));
                }
            }
        }
        None
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.source.validate();
        report.extend(self.target.validate());
        if !report.is_ok() {
            return report;
        }
        if !self.source.shares_base(&self.target) {
            report.push(Violation::new("base", "source and target have different base categories"));
            return report;
        }
        let cat = self.source.base();
        if self.components.len() != cat.object_count() {
            report.push(Violation::new(
                "component-table",
                format!("{} components for {} objects", self.components.len(), cat.object_count()),
            ));
            return report;
        }
        let mut shape_ok = true;
        for (obj, c) in self.components.iter().enumerate() {
            if c.len() != self.source.size(obj) {
                report.push(Violation::new(
                    "component-table",
                    format!("component at {} has {} entries, carrier has {}", cat.objects()[obj], c.len(), self.source.size(obj)),
                ));
                shape_ok = false;
                continue;
            }
            for (x, &y) in c.iter().enumerate() {
                if y >= self.target.size(obj) {
                    report.push(Violation::new(
                        "component-reference",
                        format!("{x} at {} maps to {y}, outside the target carrier", cat.objects()[obj]),
                    ));
                    shape_ok = false;
                }
            }
        }
        if !shape_ok {
            return report;
        }
        for (m, mor) in cat.morphisms().iter().enumerate() {
            for y in 0..self.source.size(mor.cod) {
                let lhs = self.apply(mor.dom, self.source.act(m, y));
                let rhs = self.target.act(m, self.apply(mor.cod, y));
                if lhs != rhs {
                    report.push(Violation::new(
                        "naturality",
                        format!("at {} element {y}: restrict-then-map = {lhs}, map-then-restrict = {rhs}", mor.name),
                    ));
                }
            }
        }
        report
    }
}
