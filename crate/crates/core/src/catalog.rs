//! Built-in index categories, generating sets and example presheaves.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

use crate::arrow::{ArrowObj, GeneratingSet};
use crate::colimit::coproduct;
use crate::error::{Error, Result};
use crate::presheaf::{FinCategory, Morphism, Presheaf, PresheafMap};

#[derive(Clone, Debug)]
pub enum CatalogEntry {
    Category(Arc<FinCategory>),
    Generators(GeneratingSet),
    Presheaf(Presheaf),
    Arrow(ArrowObj),
}

pub const KEYS: &[&str] = &[
    "terminal",
    "delta≤1",
    "delta≤2",
    "point",
    "codiagonal",
    "horns≤1",
    "horns≤2",
    "Delta[1]",
    "Delta[2]",
];

fn canonical_key(key: &str) -> &str {
    match key {
        "delta<=1" => "delta≤1",
        "delta<=2" => "delta≤2",
        "horns<=1" => "horns≤1",
        "horns<=2" => "horns≤2",
        other => other,
    }
}

pub fn get(key: &str) -> Result<CatalogEntry> {
    let entry = match canonical_key(key) {
        "terminal" => CatalogEntry::Category(terminal()),
        "delta≤1" => CatalogEntry::Category(delta_le1()),
        "delta≤2" => CatalogEntry::Category(delta_le2()),
        "point" => CatalogEntry::Generators(point()),
        "codiagonal" => CatalogEntry::Generators(codiagonal()),
        "horns≤1" => CatalogEntry::Generators(horns(&delta_le1(), 1)),
        "horns≤2" => CatalogEntry::Generators(horns(&delta_le2(), 2)),
        "Delta[1]" => CatalogEntry::Presheaf(representable(&delta_le1(), 1)),
        "Delta[2]" => CatalogEntry::Presheaf(representable(&delta_le2(), 2)),
        _ => {
            return Err(Error::NotFound {
                key: key.to_string(),
                known: KEYS.iter().map(|k| k.to_string()).collect(),
            })
        }
    };
    Ok(entry)
}

static TERMINAL: LazyLock<Arc<FinCategory>> = LazyLock::new(|| Arc::new(FinCategory::terminal()));
static DELTA_LE1: LazyLock<Arc<FinCategory>> = LazyLock::new(|| Arc::new(truncated_simplex_category(1)));
static DELTA_LE2: LazyLock<Arc<FinCategory>> = LazyLock::new(|| Arc::new(truncated_simplex_category(2)));

/// The one-object category; presheaves on it are finite sets.
pub fn terminal() -> Arc<FinCategory> {
    TERMINAL.clone()
}

/// Δ truncated at dimension 1. Presheaves on it are reflexive graphs.
pub fn delta_le1() -> Arc<FinCategory> {
    DELTA_LE1.clone()
}

/// Δ truncated at dimension 2.
pub fn delta_le2() -> Arc<FinCategory> {
    DELTA_LE2.clone()
}

/// A finite set as a presheaf on the terminal category.
pub fn finite_set(n: usize) -> Presheaf {
    Presheaf::discrete(&terminal(), vec![n])
}

/// A function between finite sets as a map of presheaves on the terminal
/// category.
pub fn function(src: usize, tgt: usize, values: &[usize]) -> Result<PresheafMap> {
    PresheafMap::new(finite_set(src), finite_set(tgt), vec![values.to_vec()])
}

/// `{ ∅ → 1 }` on finite sets.
pub fn point() -> GeneratingSet {
    let f = function(0, 1, &[]).expect("empty function");
    GeneratingSet::new(terminal(), vec![ArrowObj::trusted(f).with_label("0→1")]).expect("valid")
}

/// `{ 1 ⊔ 1 → 1 }` on finite sets.
pub fn codiagonal() -> GeneratingSet {
    let f = function(2, 1, &[0, 0]).expect("codiagonal");
    GeneratingSet::new(terminal(), vec![ArrowObj::trusted(f).with_label("1⊔1→1")]).expect("valid")
}

/// Monotone maps `[m] → [n]`, as image tuples in lexicographic order.
fn monotone_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(pos: usize, lo: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos > m {
            out.push(cur.clone());
            return;
        }
        for v in lo..=n {
            cur.push(v);
            go(pos + 1, v, m, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, m, n, &mut Vec::new(), &mut out);
    out
}

fn morphism_name(m: usize, n: usize, images: &[usize], short: bool) -> String {
    let suffix = |s: String| if short { s } else { format!("{s}_{n}") };
    if m == n && images.iter().enumerate().all(|(i, &v)| i == v) {
        return if short { format!("id{n}") } else { format!("id_{n}") };
    }
    let injective = images.windows(2).all(|w| w[0] < w[1]);
    let surjective = (0..=n).all(|v| images.contains(&v));
    if m + 1 == n && injective {
        if let Some(i) = (0..=n).find(|&i| !images.contains(&i)) {
            return suffix(format!("d{i}"));
        }
    }
    if m == n + 1 && surjective {
        if let Some(i) = (0..n + 1).find(|&i| images.get(i) == images.get(i + 1)) {
            return suffix(format!("s{i}"));
        }
    }
    let img: String = images.iter().map(|v| v.to_string()).collect();
    format!("[{m}]->[{n}]:{img}")
}

/// The full subcategory of Δ on `[0], …, [max_dim]`, with every monotone map
/// and composition tabulated.
pub fn truncated_simplex_category(max_dim: usize) -> FinCategory {
    let short = max_dim <= 1;
    let objects: Vec<String> = (0..=max_dim).map(|n| format!("[{n}]")).collect();
    let mut morphisms = Vec::new();
    let mut images_of = Vec::new();
    let mut index = HashMap::new();
    // identities first so that they get the low ids
    for n in 0..=max_dim {
        let id: Vec<usize> = (0..=n).collect();
        index.insert((n, n, id.clone()), morphisms.len());
        morphisms.push(Morphism {
            name: morphism_name(n, n, &id, short),
            dom: n,
            cod: n,
        });
        images_of.push(id);
    }
    for m in 0..=max_dim {
        for n in 0..=max_dim {
            for img in monotone_maps(m, n) {
                if index.contains_key(&(m, n, img.clone())) {
                    continue;
                }
                index.insert((m, n, img.clone()), morphisms.len());
                morphisms.push(Morphism {
                    name: morphism_name(m, n, &img, short),
                    dom: m,
                    cod: n,
                });
                images_of.push(img);
            }
        }
    }
    let identities: Vec<usize> = (0..=max_dim).collect();
    let mut compose = Vec::new();
    for (g, mg) in morphisms.iter().enumerate() {
        for (f, mf) in morphisms.iter().enumerate() {
            if mf.cod != mg.dom {
                continue;
            }
            let img: Vec<usize> = images_of[f].iter().map(|&i| images_of[g][i]).collect();
            compose.push((g, f, index[&(mf.dom, mg.cod, img)]));
        }
    }
    FinCategory::new(objects, morphisms, identities, compose).expect("Δ truncation is a category")
}

/// Monotone image tuples of a morphism of a truncated simplex category.
fn images(cat: &FinCategory, m: usize) -> Vec<usize> {
    let mor = cat.morphism(m);
    // dom [a], cod [b]; recover the tuple by matching against the enumeration
    let (a, b) = (mor.dom, mor.cod);
    for img in monotone_maps(a, b) {
        if morphism_name(a, b, &img, cat.object_count() <= 2) == mor.name {
            return img;
        }
    }
    unreachable!("morphism {} is not a monotone map", mor.name)
}

/// The representable presheaf `Δ[n]` on a truncated simplex category: its
/// `m`-simplices are the monotone maps `[m] → [n]`.
pub fn representable(cat: &Arc<FinCategory>, n: usize) -> Presheaf {
    let simplices: Vec<Vec<Vec<usize>>> = (0..cat.object_count()).map(|m| monotone_maps(m, n)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> = simplices
        .iter()
        .map(|s| s.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect())
        .collect();
    let theta: Vec<Vec<usize>> = (0..cat.morphism_count()).map(|m| images(cat, m)).collect();
    let sizes = simplices.iter().map(Vec::len).collect();
    let actions = (0..cat.morphism_count())
        .map(|m| {
            let mor = cat.morphism(m);
            simplices[mor.cod]
                .iter()
                .map(|sigma| {
                    let restricted: Vec<usize> = theta[m].iter().map(|&i| sigma[i]).collect();
                    index[mor.dom][&restricted]
                })
                .collect()
        })
        .collect();
    Presheaf::new(cat.clone(), sizes, actions).expect("representables are presheaves")
}

/// The sub-presheaf of `x` on the elements satisfying `keep`, with its
/// inclusion. `keep` must be closed under restriction.
pub fn subpresheaf(x: &Presheaf, keep: impl Fn(usize, usize) -> bool) -> Result<PresheafMap> {
    let cat = x.base();
    let kept: Vec<Vec<usize>> = (0..cat.object_count())
        .map(|o| (0..x.size(o)).filter(|&e| keep(o, e)).collect())
        .collect();
    let position: Vec<HashMap<usize, usize>> = kept
        .iter()
        .map(|k| k.iter().enumerate().map(|(i, &e)| (e, i)).collect())
        .collect();
    let mut actions = Vec::with_capacity(cat.morphism_count());
    for (m, mor) in cat.morphisms().iter().enumerate() {
        let mut act = Vec::with_capacity(kept[mor.cod].len());
        for &e in &kept[mor.cod] {
            let r = x.act(m, e);
            match position[mor.dom].get(&r) {
                Some(&i) => act.push(i),
                None => return Err(Error::Invalid("subpresheaf: kept elements are not closed under restriction".into())),
            }
        }
        actions.push(act);
    }
    let sub = Presheaf::new(cat.clone(), kept.iter().map(Vec::len).collect(), actions)?;
    PresheafMap::new(sub, x.clone(), kept)
}

/// The horn inclusion `Λ^k[n] → Δ[n]`: the simplices of `Δ[n]` whose image,
/// together with `k`, misses some vertex.
pub fn horn_inclusion(cat: &Arc<FinCategory>, n: usize, k: usize) -> ArrowObj {
    let simplex = representable(cat, n);
    let simplices: Vec<Vec<Vec<usize>>> = (0..cat.object_count()).map(|m| monotone_maps(m, n)).collect();
    let inc = subpresheaf(&simplex, |m, e| {
        let sigma = &simplices[m][e];
        (0..=n).any(|v| v != k && !sigma.contains(&v))
    })
    .expect("horns are sub-presheaves");
    ArrowObj::trusted(inc).with_label(format!("Λ^{k}[{n}]→Δ[{n}]"))
}

/// All horn inclusions `Λ^k[n] → Δ[n]` with `1 ≤ n ≤ max_dim`.
pub fn horns(cat: &Arc<FinCategory>, max_dim: usize) -> GeneratingSet {
    let members = (1..=max_dim)
        .flat_map(|n| (0..=n).map(move |k| (n, k)))
        .map(|(n, k)| horn_inclusion(cat, n, k))
        .collect();
    GeneratingSet::new(cat.clone(), members).expect("horns share a base")
}

/// A reflexive graph with the given vertices and non-degenerate edges
/// `(source, target)`, as a presheaf on Δ≤1.
pub fn reflexive_graph(vertices: usize, edges: &[(usize, usize)]) -> Result<Presheaf> {
    let cat = delta_le1();
    let n_edges = vertices + edges.len();
    // edge ids: degenerate loops first, then the listed edges
    let src = |e: usize| if e < vertices { e } else { edges[e - vertices].0 };
    let tgt = |e: usize| if e < vertices { e } else { edges[e - vertices].1 };
    let mut actions = Vec::new();
    for m in 0..cat.morphism_count() {
        let mor = cat.morphism(m);
        let img = images(&cat, m);
        let act: Vec<usize> = match (mor.dom, mor.cod) {
            (0, 0) => (0..vertices).collect(),
            (1, 1) if img == [0, 1] => (0..n_edges).collect(),
            // [1]→[1] constant at i: degenerate loop on endpoint i
            (1, 1) => (0..n_edges).map(|e| if img[0] == 0 { src(e) } else { tgt(e) }).collect(),
            // d_i: [0]→[1] hits vertex img[0]; restriction picks that endpoint
            (0, 1) => (0..n_edges).map(|e| if img[0] == 0 { src(e) } else { tgt(e) }).collect(),
            (1, 0) => (0..vertices).collect(),
            _ => unreachable!(),
        };
        actions.push(act);
    }
    Presheaf::new(cat, vec![vertices, n_edges], actions)
}

/// `X → 1` for a presheaf `X`.
pub fn to_terminal(x: &Presheaf) -> ArrowObj {
    let one = Presheaf::terminal(x.base());
    ArrowObj::trusted(PresheafMap::to_terminal(x, &one))
}

/// `n` copies of the terminal presheaf, i.e. `1 ⊔ … ⊔ 1`.
pub fn copies_of_terminal(base: &Arc<FinCategory>, n: usize) -> Presheaf {
    let parts = vec![Presheaf::terminal(base); n];
    coproduct(base, &parts).expect("same base").apex().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_le1_is_the_reflexive_graph_index() {
        let cat = delta_le1();
        assert!(cat.validate().is_ok());
        assert_eq!(cat.object_count(), 2);
        // id0, id1, d0, d1, s0 and the two composites d_i∘s0: [1]→[1]
        assert_eq!(cat.morphism_count(), 7);
        for name in ["id0", "id1", "d0", "d1", "s0"] {
            assert!(cat.morphism_index(name).is_some(), "{name}");
        }
        let s0 = cat.morphism_index("s0").unwrap();
        for d in ["d0", "d1"] {
            let d = cat.morphism_index(d).unwrap();
            assert_eq!(cat.compose(s0, d), Some(cat.identity(0)));
        }
    }

    #[test]
    fn delta_le2_satisfies_simplicial_identities() {
        let cat = delta_le2();
        assert!(cat.validate().is_ok());
        // monotone maps [m]→[n] for m,n ≤ 2: C(n+m+1, m+1) summed
        let expected: usize = (0..=2)
            .flat_map(|m| (0..=2).map(move |n| monotone_maps(m, n).len()))
            .sum();
        assert_eq!(cat.morphism_count(), expected);
        let id = |n: usize| cat.identity(n);
        let m = |s: &str| cat.morphism_index(s).unwrap();
        // d_j d_i = d_i d_{j-1} for i < j, here into [2]
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let lhs = cat.compose(m(&format!("d{j}_2")), m(&format!("d{i}_1"))).unwrap();
            let rhs = cat.compose(m(&format!("d{i}_2")), m(&format!("d{}_1", j - 1))).unwrap();
            assert_eq!(lhs, rhs);
        }
        // s_j d_i = id for i = j, j+1
        for j in 0..2 {
            for i in [j, j + 1] {
                assert_eq!(cat.compose(m(&format!("s{j}_1")), m(&format!("d{i}_2"))), Some(id(1)));
            }
        }
    }

    #[test]
    fn horns_at_dimension_one() {
        let gens = horns(&delta_le1(), 1);
        assert_eq!(gens.len(), 2);
        for j in gens.members() {
            assert!(j.map().is_injective());
            assert_eq!(j.domain().sizes(), &[1, 1]);
            assert_eq!(j.codomain().sizes(), &[2, 3]);
        }
    }

    #[test]
    fn horns_at_dimension_two_are_injective() {
        let gens = horns(&delta_le2(), 2);
        assert_eq!(gens.len(), 5);
        for j in gens.members() {
            assert!(j.map().validate().is_ok());
            assert!(j.map().is_injective());
        }
        // Λ^1[2] has 3 vertices and the two edges 01, 12 (plus degeneracies)
        let l12 = &gens.members()[3];
        assert_eq!(l12.domain().size(0), 3);
        assert_eq!(l12.domain().size(1), 2 + 3);
    }

    #[test]
    fn every_catalog_entry_validates() {
        for key in KEYS {
            match get(key).unwrap() {
                CatalogEntry::Category(c) => assert!(c.validate().is_ok()),
                CatalogEntry::Generators(g) => {
                    for m in g.members() {
                        assert!(m.map().validate().is_ok())
                    }
                }
                CatalogEntry::Presheaf(p) => assert!(p.validate().is_ok()),
                CatalogEntry::Arrow(a) => assert!(a.map().validate().is_ok()),
            }
        }
    }

    #[test]
    fn point_is_empty_to_one() {
        let CatalogEntry::Generators(g) = get("point").unwrap() else { panic!() };
        assert_eq!(g.len(), 1);
        assert_eq!(g.members()[0].domain().sizes(), &[0]);
        assert_eq!(g.members()[0].codomain().sizes(), &[1]);
    }

    #[test]
    fn unknown_key_lists_known_keys() {
        let err = get("nope").unwrap_err();
        match err {
            Error::NotFound { known, .. } => assert!(known.contains(&"point".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reflexive_graph_builder_validates() {
        let g = reflexive_graph(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        assert_eq!(g.sizes(), &[3, 6]);
    }
}
