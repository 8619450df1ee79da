use std::collections::BTreeMap;
use std::fmt;

use super::validate::{ValidationReport, Violation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
}

/// A finite category given by explicit tables.
///
/// Objects and morphisms are addressed by dense indices; the names are kept
/// for serialization and diagnostics. Composition is stored as a map
/// `(g, f) -> g∘f` and is expected to be total on composable pairs; use
/// [`FinCategory::validate`] to check that it is.
#[derive(Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    compose: BTreeMap<(usize, usize), usize>,
    /// Non-identity morphisms grouped by codomain.
    into: Vec<Vec<usize>>,
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.len())
            .finish()
    }
}

impl FinCategory {
    /// Builds the category and rejects it unless every law holds.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        compose: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let cat = Self::from_parts_unchecked(objects, morphisms, identities, compose);
        let report = cat.validate();
        if report.is_ok() {
            Ok(cat)
        } else {
            Err(Error::Invalid(format!("category: {report}")))
        }
    }

    /// Builds the tables without checking any law. Malformed references are
    /// kept as-is so that [`FinCategory::validate`] can report them.
    pub fn from_parts_unchecked(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        compose: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Self {
        let compose: BTreeMap<_, _> = compose.into_iter().map(|(g, f, gf)| ((g, f), gf)).collect();
        let mut into = vec![Vec::new(); objects.len()];
        for (m, mor) in morphisms.iter().enumerate() {
            let is_identity = identities.get(mor.cod).is_some_and(|&id| id == m);
            if mor.cod < objects.len() && !is_identity {
                into[mor.cod].push(m);
            }
        }
        FinCategory {
            objects,
            morphisms,
            identities,
            compose,
            into,
        }
    }

    /// The category with one object and only its identity.
    pub fn terminal() -> Self {
        Self::from_parts_unchecked(
            vec!["*".into()],
            vec![Morphism {
                name: "id".into(),
                dom: 0,
                cod: 0,
            }],
            vec![0],
            [(0, 0, 0)],
        )
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism(&self, m: usize) -> &Morphism {
        &self.morphisms[m]
    }

    pub fn identity(&self, obj: usize) -> usize {
        self.identities[obj]
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn is_identity(&self, m: usize) -> bool {
        let cod = self.morphisms[m].cod;
        self.identities.get(cod) == Some(&m)
    }

    /// `g∘f`, if the table has an entry for it.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    pub fn composition_table(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.compose.iter().map(|(&(g, f), &gf)| (g, f, gf))
    }

    /// Non-identity morphisms with codomain `obj`.
    pub fn morphisms_into(&self, obj: usize) -> &[usize] {
        &self.into[obj]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n_obj = self.objects.len();
        let n_mor = self.morphisms.len();
        let mut shape_ok = true;

        for (m, mor) in self.morphisms.iter().enumerate() {
            if mor.dom >= n_obj || mor.cod >= n_obj {
                report.push(Violation::new(
                    "morphism-endpoints",
                    format!("morphism {} ({m}) has dom {} / cod {} out of range", mor.name, mor.dom, mor.cod),
                ));
                shape_ok = false;
            }
        }
        if self.identities.len() != n_obj {
            report.push(Violation::new(
                "identity-table",
                format!("{} identities for {} objects", self.identities.len(), n_obj),
            ));
            shape_ok = false;
        }
        for (obj, &id) in self.identities.iter().enumerate() {
            match self.morphisms.get(id) {
                Some(mor) if mor.dom == obj && mor.cod == obj => {}
                _ => {
                    report.push(Violation::new(
                        "identity-table",
                        format!("identity of object {obj} is morphism {id}, which is not an endomorphism of it"),
                    ));
                    shape_ok = false;
                }
            }
        }
        for (&(g, f), &gf) in &self.compose {
            if g >= n_mor || f >= n_mor || gf >= n_mor {
                report.push(Violation::new(
                    "compose-reference",
                    format!("compose({g}, {f}) = {gf} references a missing morphism"),
                ));
                shape_ok = false;
                continue;
            }
            let (mg, mf, mgf) = (&self.morphisms[g], &self.morphisms[f], &self.morphisms[gf]);
            if mf.cod != mg.dom {
                report.push(Violation::new(
                    "compose-reference",
                    format!("compose({}, {}) given for a non-composable pair", mg.name, mf.name),
                ));
                shape_ok = false;
            } else if mgf.dom != mf.dom || mgf.cod != mg.cod {
                report.push(Violation::new(
                    "compose-endpoints",
                    format!(
                        "{}∘{} = {} but its endpoints do not match",
                        mg.name, mf.name, mgf.name
                    ),
                ));
            }
        }
        if !shape_ok {
            return report;
        }

        for g in 0..n_mor {
            for f in 0..n_mor {
                if self.morphisms[f].cod == self.morphisms[g].dom && self.compose(g, f).is_none() {
                    report.push(Violation::new(
                        "compose-total",
                        format!(
                            "no entry for {}∘{}",
                            self.morphisms[g].name, self.morphisms[f].name
                        ),
                    ));
                }
            }
        }
        for (f, mor) in self.morphisms.iter().enumerate() {
            let left = self.compose(self.identities[mor.cod], f);
            let right = self.compose(f, self.identities[mor.dom]);
            if left != Some(f) {
                report.push(Violation::new(
                    "left-unit",
                    format!("id∘{} = {:?}", mor.name, left.map(|m| &self.morphisms[m].name)),
                ));
            }
            if right != Some(f) {
                report.push(Violation::new(
                    "right-unit",
                    format!("{}∘id = {:?}", mor.name, right.map(|m| &self.morphisms[m].name)),
                ));
            }
        }
        for h in 0..n_mor {
            for g in 0..n_mor {
                if self.morphisms[g].cod != self.morphisms[h].dom {
                    continue;
                }
                for f in 0..n_mor {
                    if self.morphisms[f].cod != self.morphisms[g].dom {
                        continue;
                    }
                    let lhs = self.compose(h, g).and_then(|hg| self.compose(hg, f));
                    let rhs = self.compose(g, f).and_then(|gf| self.compose(h, gf));
                    if lhs != rhs {
                        report.push(Violation::new(
                            "associativity",
                            format!(
                                "({h}∘{g})∘{f} = {lhs:?} but {h}∘({g}∘{f}) = {rhs:?}",
                                h = self.morphisms[h].name,
                                g = self.morphisms[g].name,
                                f = self.morphisms[f].name
                            ),
                        ));
                    }
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_category_is_valid() {
        let cat = FinCategory::terminal();
        assert!(cat.validate().is_ok());
        assert_eq!(cat.object_count(), 1);
        assert_eq!(cat.morphism_count(), 1);
    }

    #[test]
    fn missing_composite_is_reported() {
        // arrow category 0 -> 1 with the composite a∘id0 left out
        let morphisms = vec![
            Morphism { name: "id0".into(), dom: 0, cod: 0 },
            Morphism { name: "id1".into(), dom: 1, cod: 1 },
            Morphism { name: "a".into(), dom: 0, cod: 1 },
        ];
        let cat = FinCategory::from_parts_unchecked(
            vec!["0".into(), "1".into()],
            morphisms,
            vec![0, 1],
            [(0, 0, 0), (1, 1, 1), (1, 2, 2)],
        );
        let report = cat.validate();
        assert!(!report.is_ok());
        assert!(report.violations().iter().any(|v| v.law == "compose-total"));
        assert!(report.violations().iter().any(|v| v.law == "right-unit"));
    }

    #[test]
    fn dangling_references_are_reported_not_panicked() {
        let cat = FinCategory::from_parts_unchecked(
            vec!["0".into()],
            vec![Morphism { name: "id".into(), dom: 0, cod: 3 }],
            vec![7],
            [(0, 0, 9)],
        );
        let report = cat.validate();
        assert!(report.violations().len() >= 3);
    }
}
