//! JSON documents for categories, presheaves, maps and generating sets.
//!
//! Wherever a document expects one of these, a string is read as a catalog
//! key instead. Errors carry a JSON pointer to the offending field.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arrow::{ArrowObj, GeneratingSet};
use crate::catalog::{self, CatalogEntry};
use crate::error::{Error, Result};
use crate::presheaf::{FinCategory, Morphism, Presheaf, PresheafMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDoc>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresheafDoc {
    category: Value,
    sets: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    actions: BTreeMap<String, BTreeMap<String, Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    source: Value,
    target: Value,
    components: BTreeMap<String, BTreeMap<String, Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GensDoc {
    arrows: Vec<Value>,
}

fn child(ptr: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{ptr}/{key}")
}

fn decode<T: DeserializeOwned>(v: &Value, ptr: &str) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let mut p = ptr.to_string();
        for seg in e.path().iter() {
            match seg {
                serde_path_to_error::Segment::Seq { index } => p = child(&p, index),
                serde_path_to_error::Segment::Map { key } => p = child(&p, key),
                serde_path_to_error::Segment::Enum { variant } => p = child(&p, variant),
                serde_path_to_error::Segment::Unknown => {}
            }
        }
        Error::input(p, e.into_inner().to_string())
    })
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::input("", format!("malformed JSON: {e}")))
}

fn lookup(key: &str, ptr: &str) -> Result<CatalogEntry> {
    catalog::get(key).map_err(|e| Error::input(ptr, e.to_string()))
}

/// Swaps a freshly parsed category for the built-in one it equals, so that
/// inputs read from separate documents share one base.
fn intern(cat: FinCategory) -> Arc<FinCategory> {
    for known in [catalog::terminal(), catalog::delta_le1(), catalog::delta_le2()] {
        if *known == cat {
            return known;
        }
    }
    Arc::new(cat)
}

pub fn category_from_value(v: &Value, ptr: &str) -> Result<Arc<FinCategory>> {
    if let Value::String(key) = v {
        return match lookup(key, ptr)? {
            CatalogEntry::Category(c) => Ok(c),
            _ => Err(Error::input(ptr, format!("catalog entry `{key}` is not a category"))),
        };
    }
    let doc: CategoryDoc = decode(v, ptr)?;
    let obj_index: HashMap<&str, usize> = doc.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    if obj_index.len() != doc.objects.len() {
        return Err(Error::input(child(ptr, "objects"), "duplicate object name"));
    }
    let find_obj = |name: &str, p: String| obj_index.get(name).copied().ok_or_else(|| Error::input(p, format!("unknown object `{name}`")));
    let mut morphisms = Vec::new();
    for (i, m) in doc.morphisms.iter().enumerate() {
        let p = child(&child(ptr, "morphisms"), i);
        morphisms.push(Morphism {
            name: m.id.clone(),
            dom: find_obj(&m.dom, child(&p, "dom"))?,
            cod: find_obj(&m.cod, child(&p, "cod"))?,
        });
    }
    let mor_index: HashMap<&str, usize> = doc.morphisms.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
    if mor_index.len() != doc.morphisms.len() {
        return Err(Error::input(child(ptr, "morphisms"), "duplicate morphism id"));
    }
    let find_mor = |name: &str, p: String| mor_index.get(name).copied().ok_or_else(|| Error::input(p, format!("unknown morphism `{name}`")));
    let ids_ptr = child(ptr, "identities");
    for key in doc.identities.keys() {
        find_obj(key, child(&ids_ptr, key))?;
    }
    let mut identities = Vec::new();
    for o in &doc.objects {
        let m = doc
            .identities
            .get(o)
            .ok_or_else(|| Error::input(ids_ptr.clone(), format!("no identity given for object `{o}`")))?;
        identities.push(find_mor(m, child(&ids_ptr, o))?);
    }
    let mut compose = Vec::new();
    for (i, [g, f, gf]) in doc.compose.iter().enumerate() {
        let p = child(&child(ptr, "compose"), i);
        compose.push((find_mor(g, child(&p, 0))?, find_mor(f, child(&p, 1))?, find_mor(gf, child(&p, 2))?));
    }
    let cat = FinCategory::from_parts_unchecked(doc.objects.clone(), morphisms, identities, compose);
    let report = cat.validate();
    if !report.is_ok() {
        return Err(Error::input(ptr, format!("not a category: {report}")));
    }
    Ok(intern(cat))
}

fn label(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub fn presheaf_from_value(v: &Value, ptr: &str) -> Result<Presheaf> {
    if let Value::String(key) = v {
        return match lookup(key, ptr)? {
            CatalogEntry::Presheaf(p) => Ok(p),
            _ => Err(Error::input(ptr, format!("catalog entry `{key}` is not a presheaf"))),
        };
    }
    let doc: PresheafDoc = decode(v, ptr)?;
    let cat = category_from_value(&doc.category, &child(ptr, "category"))?;
    let sets_ptr = child(ptr, "sets");
    for key in doc.sets.keys() {
        if cat.object_index(key).is_none() {
            return Err(Error::input(child(&sets_ptr, key), format!("unknown object `{key}`")));
        }
    }
    let mut labels: Vec<HashMap<String, usize>> = Vec::new();
    for o in cat.objects() {
        let elts = doc
            .sets
            .get(o)
            .ok_or_else(|| Error::input(sets_ptr.clone(), format!("no set given for object `{o}`")))?;
        let mut index = HashMap::new();
        for (i, e) in elts.iter().enumerate() {
            let p = child(&child(&sets_ptr, o), i);
            let l = label(e).ok_or_else(|| Error::input(p.clone(), "element ids are strings or integers"))?;
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::input(p, format!("duplicate element `{l}`")));
            }
        }
        labels.push(index);
    }
    let sizes: Vec<usize> = labels.iter().map(HashMap::len).collect();
    let acts_ptr = child(ptr, "actions");
    for key in doc.actions.keys() {
        if cat.morphism_index(key).is_none() {
            return Err(Error::input(child(&acts_ptr, key), format!("unknown morphism `{key}`")));
        }
    }
    let mut actions = Vec::new();
    for (m, mor) in cat.morphisms().iter().enumerate() {
        let mp = child(&acts_ptr, &mor.name);
        let Some(table) = doc.actions.get(&mor.name) else {
            if cat.is_identity(m) {
                actions.push((0..sizes[mor.cod]).collect());
                continue;
            }
            return Err(Error::input(acts_ptr.clone(), format!("no action given for morphism `{}`", mor.name)));
        };
        actions.push(read_table(table, &labels[mor.cod], &labels[mor.dom], &mp)?);
    }
    Presheaf::new(cat, sizes, actions).map_err(|e| Error::input(acts_ptr, e.to_string()))
}

/// Reads `{elt: elt}` as a total function between labelled sets.
fn read_table(
    table: &BTreeMap<String, Value>,
    from: &HashMap<String, usize>,
    to: &HashMap<String, usize>,
    ptr: &str,
) -> Result<Vec<usize>> {
    let mut out = vec![None; from.len()];
    for (k, v) in table {
        let p = child(ptr, k);
        let &i = from.get(k).ok_or_else(|| Error::input(p.clone(), format!("unknown element `{k}`")))?;
        let l = label(v).ok_or_else(|| Error::input(p.clone(), "element ids are strings or integers"))?;
        let &j = to.get(&l).ok_or_else(|| Error::input(p, format!("unknown target element `{l}`")))?;
        out[i] = Some(j);
    }
    let mut by_index: Vec<(&String, &usize)> = from.iter().collect();
    by_index.sort_by_key(|(_, &i)| i);
    for (l, &i) in by_index {
        if out[i].is_none() {
            return Err(Error::input(ptr, format!("no value given for element `{l}`")));
        }
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

/// Element labels of a presheaf read from a document: the position of each
/// element in its `sets` list. Catalog presheaves use their dense ids.
fn dense_labels(p: &Presheaf) -> Vec<HashMap<String, usize>> {
    p.sizes().iter().map(|&n| (0..n).map(|i| (i.to_string(), i)).collect()).collect()
}

fn labels_of(v: &Value, p: &Presheaf) -> Vec<HashMap<String, usize>> {
    let Some(sets) = v.get("sets").and_then(Value::as_object) else {
        return dense_labels(p);
    };
    p.base()
        .objects()
        .iter()
        .map(|o| {
            sets.get(o)
                .and_then(Value::as_array)
                .map(|elts| elts.iter().enumerate().filter_map(|(i, e)| Some((label(e)?, i))).collect())
                .unwrap_or_default()
        })
        .collect()
}

pub fn map_from_value(v: &Value, ptr: &str) -> Result<PresheafMap> {
    if let Value::String(key) = v {
        return match lookup(key, ptr)? {
            CatalogEntry::Arrow(a) => Ok(a.map().clone()),
            _ => Err(Error::input(ptr, format!("catalog entry `{key}` is not a map"))),
        };
    }
    let doc: MapDoc = decode(v, ptr)?;
    let source = presheaf_from_value(&doc.source, &child(ptr, "source"))?;
    let target = presheaf_from_value(&doc.target, &child(ptr, "target"))?;
    if !source.shares_base(&target) {
        return Err(Error::input(ptr, "source and target live over different categories"));
    }
    let (from, to) = (labels_of(&doc.source, &source), labels_of(&doc.target, &target));
    let cat = source.base();
    let comps_ptr = child(ptr, "components");
    for key in doc.components.keys() {
        if cat.object_index(key).is_none() {
            return Err(Error::input(child(&comps_ptr, key), format!("unknown object `{key}`")));
        }
    }
    let mut components = Vec::new();
    for (o, name) in cat.objects().iter().enumerate() {
        let empty = BTreeMap::new();
        let table = match doc.components.get(name) {
            Some(t) => t,
            None if source.size(o) == 0 => &empty,
            None => return Err(Error::input(comps_ptr.clone(), format!("no component given for object `{name}`"))),
        };
        components.push(read_table(table, &from[o], &to[o], &child(&comps_ptr, name))?);
    }
    PresheafMap::new(source, target, components).map_err(|e| Error::input(comps_ptr, e.to_string()))
}

pub fn generators_from_value(v: &Value, ptr: &str) -> Result<GeneratingSet> {
    if let Value::String(key) = v {
        return match lookup(key, ptr)? {
            CatalogEntry::Generators(g) => Ok(g),
            _ => Err(Error::input(ptr, format!("catalog entry `{key}` is not a generating set"))),
        };
    }
    let doc: GensDoc = decode(v, ptr)?;
    let arrows_ptr = child(ptr, "arrows");
    let mut members: Vec<ArrowObj> = Vec::new();
    for (i, a) in doc.arrows.iter().enumerate() {
        let p = child(&arrows_ptr, i);
        // a key may name a whole generating set, spliced in place
        if let Value::String(key) = a {
            if let CatalogEntry::Generators(g) = lookup(key, &p)? {
                members.extend(g.members().iter().cloned());
                continue;
            }
        }
        members.push(ArrowObj::new(map_from_value(a, &p)?).map_err(|e| Error::input(p, e.to_string()))?);
    }
    let Some(first) = members.first() else {
        return Err(Error::input(arrows_ptr, "a generating set needs at least one arrow"));
    };
    let base = first.domain().base().clone();
    GeneratingSet::new(base, members).map_err(|e| Error::input(arrows_ptr, e.to_string()))
}

pub fn parse_category(text: &str) -> Result<Arc<FinCategory>> {
    category_from_value(&parse_json(text)?, "")
}

pub fn parse_presheaf(text: &str) -> Result<Presheaf> {
    presheaf_from_value(&parse_json(text)?, "")
}

pub fn parse_map(text: &str) -> Result<PresheafMap> {
    map_from_value(&parse_json(text)?, "")
}

pub fn parse_generators(text: &str) -> Result<GeneratingSet> {
    generators_from_value(&parse_json(text)?, "")
}

pub fn category_doc(cat: &FinCategory) -> CategoryDoc {
    let objects = cat.objects().to_vec();
    let name = |m: usize| cat.morphism(m).name.clone();
    CategoryDoc {
        morphisms: cat
            .morphisms()
            .iter()
            .map(|m| MorphismDoc {
                id: m.name.clone(),
                dom: objects[m.dom].clone(),
                cod: objects[m.cod].clone(),
            })
            .collect(),
        identities: objects.iter().enumerate().map(|(o, n)| (n.clone(), name(cat.identity(o)))).collect(),
        compose: cat.composition_table().map(|(g, f, gf)| [name(g), name(f), name(gf)]).collect(),
        objects,
    }
}

/// A presheaf document with dense integer element ids; `category` is written
/// as given (a catalog key or an inline document).
pub fn presheaf_to_value(p: &Presheaf, category: Value) -> Value {
    let cat = p.base();
    let sets: serde_json::Map<String, Value> = cat
        .objects()
        .iter()
        .enumerate()
        .map(|(o, n)| (n.clone(), json!((0..p.size(o)).collect::<Vec<_>>())))
        .collect();
    let actions: serde_json::Map<String, Value> = cat
        .morphisms()
        .iter()
        .enumerate()
        .filter(|(m, _)| !cat.is_identity(*m))
        .map(|(m, mor)| {
            let table: serde_json::Map<String, Value> = (0..p.size(mor.cod)).map(|e| (e.to_string(), json!(p.act(m, e)))).collect();
            (mor.name.clone(), Value::Object(table))
        })
        .collect();
    json!({ "category": category, "sets": sets, "actions": actions })
}

pub fn map_to_value(f: &PresheafMap, category: Value) -> Value {
    let cat = f.source().base();
    let components: serde_json::Map<String, Value> = cat
        .objects()
        .iter()
        .enumerate()
        .map(|(o, n)| {
            let table: serde_json::Map<String, Value> =
                f.component(o).iter().enumerate().map(|(e, &t)| (e.to_string(), json!(t))).collect();
            (n.clone(), Value::Object(table))
        })
        .collect();
    json!({
        "source": presheaf_to_value(f.source(), category.clone()),
        "target": presheaf_to_value(f.target(), category),
        "components": components,
    })
}

/// The catalog key of a built-in category, or its inline document.
pub fn category_ref(cat: &Arc<FinCategory>) -> Value {
    for (key, known) in [("terminal", catalog::terminal()), ("delta≤1", catalog::delta_le1()), ("delta≤2", catalog::delta_le2())] {
        if **cat == *known {
            return json!(key);
        }
    }
    serde_json::to_value(category_doc(cat)).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointer(e: Error) -> String {
        match e {
            Error::Input { pointer, .. } => pointer,
            other => panic!("expected an input error, got {other:?}"),
        }
    }

    #[test]
    fn catalog_category_documents_round_trip() {
        for cat in [catalog::terminal(), catalog::delta_le1(), catalog::delta_le2()] {
            let doc = serde_json::to_value(category_doc(&cat)).unwrap();
            let back = category_from_value(&doc, "").unwrap();
            assert_eq!(*back, *cat);
            assert!(Arc::ptr_eq(&back, &cat));
        }
    }

    #[test]
    fn map_round_trip_over_delta() {
        let g = catalog::reflexive_graph(2, &[(0, 1)]).unwrap();
        let t = catalog::to_terminal(&g).map().clone();
        let v = map_to_value(&t, json!("delta<=1"));
        assert_eq!(map_from_value(&v, "").unwrap(), t);
    }

    #[test]
    fn string_labels_are_accepted() {
        let text = r#"{
            "source": {"category": "terminal", "sets": {"*": ["a", "b"]}},
            "target": {"category": "terminal", "sets": {"*": ["x", "y", "z"]}},
            "components": {"*": {"a": "z", "b": "x"}}
        }"#;
        let f = parse_map(text).unwrap();
        assert_eq!(f.component(0), &[2, 0]);
    }

    #[test]
    fn pointers_name_the_offending_field() {
        let bad_value = r#"{"source": {"category": "terminal", "sets": {"*": [0]}},
            "target": {"category": "terminal", "sets": {"*": [0]}},
            "components": {"*": {"0": 5}}}"#;
        assert_eq!(pointer(parse_map(bad_value).unwrap_err()), "/components/*/0");

        let bad_key = r#"{"source": {"category": "terminus", "sets": {}},
            "target": "Delta[1]", "components": {}}"#;
        assert_eq!(pointer(parse_map(bad_key).unwrap_err()), "/source/category");

        let bad_type = r#"{"objects": ["a"], "morphisms": [{"id": "i", "dom": "a", "cod": 3}],
            "identities": {"a": "i"}, "compose": [["i", "i", "i"]]}"#;
        assert_eq!(pointer(parse_category(bad_type).unwrap_err()), "/morphisms/0/cod");

        let unknown_field = r#"{"arrows": [], "extra": 1}"#;
        assert!(matches!(parse_generators(unknown_field), Err(Error::Input { .. })));

        assert_eq!(pointer(parse_json("{").unwrap_err()), "");
    }

    #[test]
    fn non_functorial_presheaf_is_an_input_error() {
        let text = r#"{"category": "delta<=1", "sets": {"[0]": [0, 1], "[1]": [0]},
            "actions": {"d0": {"0": 0}, "d1": {"0": 1}, "s0": {"0": 0, "1": 0}}}"#;
        assert_eq!(pointer(parse_presheaf(text).unwrap_err()), "/actions");
    }

    #[test]
    fn generator_keys_splice() {
        let g = parse_generators(r#"{"arrows": ["point", "codiagonal"]}"#).unwrap();
        assert_eq!(g.len(), 2);
    }
}
