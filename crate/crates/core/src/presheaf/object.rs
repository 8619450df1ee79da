use std::fmt;
use std::sync::Arc;

use super::category::FinCategory;
use super::validate::{ValidationReport, Violation};
use crate::error::{Error, Result};

#[derive(PartialEq, Eq)]
struct PresheafData {
    base: Arc<FinCategory>,
    sizes: Vec<usize>,
    /// `actions[m][y]` is the restriction of `y ∈ X(cod m)` along `m`, an
    /// element of `X(dom m)`.
    actions: Vec<Vec<usize>>,
}

/// A finite presheaf: a contravariant functor from a [`FinCategory`] to
/// finite sets whose elements are the dense ids `0..size(obj)`.
///
/// Cloning is cheap. Equality is structural (same base, same carriers,
/// same action tables).
#[derive(Clone)]
pub struct Presheaf(Arc<PresheafData>);

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        same_base(&self.0.base, &other.0.base)
            && self.0.sizes == other.0.sizes
            && self.0.actions == other.0.actions
    }
}

impl Eq for Presheaf {}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presheaf{:?}", self.0.sizes)
    }
}

pub(crate) fn same_base(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Presheaf {
    pub fn new(base: Arc<FinCategory>, sizes: Vec<usize>, actions: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::from_parts_unchecked(base, sizes, actions);
        let report = p.validate();
        if report.is_ok() {
            Ok(p)
        } else {
            Err(Error::Invalid(format!("presheaf: {report}")))
        }
    }

    pub fn from_parts_unchecked(base: Arc<FinCategory>, sizes: Vec<usize>, actions: Vec<Vec<usize>>) -> Self {
        Presheaf(Arc::new(PresheafData { base, sizes, actions }))
    }

    /// Builds a presheaf from a closure giving each action.
    pub(crate) fn build(
        base: &Arc<FinCategory>,
        sizes: Vec<usize>,
        mut act: impl FnMut(usize, usize) -> usize,
    ) -> Self {
        let actions = base
            .morphisms()
            .iter()
            .enumerate()
            .map(|(m, mor)| (0..sizes[mor.cod]).map(|y| act(m, y)).collect())
            .collect();
        Self::from_parts_unchecked(base.clone(), sizes, actions)
    }

    /// The presheaf with every carrier empty.
    pub fn empty(base: &Arc<FinCategory>) -> Self {
        Self::build(base, vec![0; base.object_count()], |_, _| 0)
    }

    /// The terminal presheaf: one element over every object.
    pub fn terminal(base: &Arc<FinCategory>) -> Self {
        Self::build(base, vec![1; base.object_count()], |_, _| 0)
    }

    /// A presheaf with trivial (identity-only) action. Only valid when the
    /// base category is discrete, e.g. the terminal category.
    pub fn discrete(base: &Arc<FinCategory>, sizes: Vec<usize>) -> Self {
        Self::build(base, sizes, |_, y| y)
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.0.base
    }

    pub fn size(&self, obj: usize) -> usize {
        self.0.sizes[obj]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0.sizes
    }

    pub fn total_size(&self) -> usize {
        self.0.sizes.iter().sum()
    }

    pub fn actions(&self) -> &[Vec<usize>] {
        &self.0.actions
    }

    /// Restriction of `elt ∈ X(cod m)` along `m`.
    pub fn act(&self, m: usize, elt: usize) -> usize {
        self.0.actions[m][elt]
    }

    pub fn shares_base(&self, other: &Presheaf) -> bool {
        same_base(self.base(), other.base())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let cat = self.base();
        if self.0.sizes.len() != cat.object_count() {
            report.push(Violation::new(
                "carrier-table",
                format!("{} carriers for {} objects", self.0.sizes.len(), cat.object_count()),
            ));
            return report;
        }
        if self.0.actions.len() != cat.morphism_count() {
            report.push(Violation::new(
                "action-table",
                format!("{} actions for {} morphisms", self.0.actions.len(), cat.morphism_count()),
            ));
            return report;
        }
        let mut shape_ok = true;
        for (m, mor) in cat.morphisms().iter().enumerate() {
            let act = &self.0.actions[m];
            if mor.dom >= self.0.sizes.len() || mor.cod >= self.0.sizes.len() {
                shape_ok = false;
                continue;
            }
            if act.len() != self.0.sizes[mor.cod] {
                report.push(Violation::new(
                    "action-table",
                    format!("action of {} has {} entries, carrier has {}", mor.name, act.len(), self.0.sizes[mor.cod]),
                ));
                shape_ok = false;
                continue;
            }
            for (y, &x) in act.iter().enumerate() {
                if x >= self.0.sizes[mor.dom] {
                    report.push(Violation::new(
                        "action-reference",
                        format!("{}·{y} = {x} is outside the carrier of {}", mor.name, cat.objects()[mor.dom]),
                    ));
                    shape_ok = false;
                }
            }
        }
        if !shape_ok {
            return report;
        }
        for (obj, &id) in cat.identities().iter().enumerate() {
            if id >= self.0.actions.len() {
                continue;
            }
            for (y, &x) in self.0.actions[id].iter().enumerate() {
                if x != y {
                    report.push(Violation::new(
                        "identity-action",
                        format!("identity of {} sends {y} to {x}", cat.objects()[obj]),
                    ));
                }
            }
        }
        for (g, f, gf) in cat.composition_table() {
            if g >= cat.morphism_count() || f >= cat.morphism_count() || gf >= cat.morphism_count() {
                continue;
            }
            let c = cat.morphism(g).cod;
            if c >= self.0.sizes.len() || cat.morphism(f).cod != cat.morphism(g).dom {
                continue;
            }
            for y in 0..self.0.sizes[c] {
                let lhs = self.act(gf, y);
                let rhs = self.act(f, self.act(g, y));
                if lhs != rhs {
                    report.push(Violation::new(
                        "functoriality",
                        format!(
                            "({g}∘{f})·{y} = {lhs} but {f}·({g}·{y}) = {rhs}",
                            g = cat.morphism(g).name,
                            f = cat.morphism(f).name
                        ),
                    ));
                }
            }
        }
        report
    }
}
