//! Serialized records of a factorisation run that can be re-checked offline.
//!
//! A certificate stores the inputs, every stage with its structure maps, and
//! (after convergence) the algebra and its lifting table. [`validate`]
//! re-derives every equation from the stored tables alone and then reruns
//! the sequence to confirm the record is the one the inputs produce.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::algebra::{check_filler, extract_algebra, fillers_from_algebra};
use crate::arrow::{ArrowObj, GeneratingSet, Square};
use crate::colimit::coequalizer;
use crate::error::{Error, Result};
use crate::io;
use crate::onestep::build_onestep;
use crate::presheaf::{FinCategory, Presheaf, PresheafMap};
use crate::sequence::{run_sequence, Mode, OrdinalBudget, SequenceState, StageKind};

pub const SCHEMA: &str = "algsoa-certificate/1";

type Table = Vec<Vec<usize>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactPresheaf {
    pub sizes: Vec<usize>,
    pub actions: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactMap {
    pub source: CompactPresheaf,
    pub target: CompactPresheaf,
    pub components: Table,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Digests {
    pub category: String,
    pub generators: String,
    pub input: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetRecord {
    pub successors_per_block: usize,
    pub omega_blocks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageRecord {
    pub label: String,
    /// `initial`, `successor` or `limit`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit_start: Option<usize>,
    pub object: CompactPresheaf,
    pub lambda: Table,
    pub rho: Table,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub incoming: Option<Table>,
    /// `σ: K'(ρ) → K_next`; its source is recomputable from `rho`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<Table>,
    /// The coequalized pair that produced the next stage, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<PairRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub source: CompactPresheaf,
    pub maps: [Table; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillerRecord {
    pub generator: usize,
    pub order: usize,
    pub top: Table,
    pub bottom: Table,
    pub filler: Table,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraRecord {
    pub stage: usize,
    pub p: Table,
    pub lifting_table: Vec<FillerRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub schema: String,
    pub mode: String,
    pub digests: Digests,
    pub category: Value,
    pub generators: Vec<CompactMap>,
    pub input: CompactMap,
    pub budget: BudgetRecord,
    pub converged_at: Option<usize>,
    pub exhausted: bool,
    pub stages: Vec<StageRecord>,
    /// Per stage, per object of the index category.
    pub cardinalities: Vec<Vec<usize>>,
    pub algebra: Option<AlgebraRecord>,
}

fn compact(p: &Presheaf) -> CompactPresheaf {
    CompactPresheaf {
        sizes: p.sizes().to_vec(),
        actions: p.actions().to_vec(),
    }
}

fn compact_map(f: &PresheafMap) -> CompactMap {
    CompactMap {
        source: compact(f.source()),
        target: compact(f.target()),
        components: f.components().to_vec(),
    }
}

fn sha256_of(v: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(v).expect("plain data");
    hex::encode(Sha256::digest(&bytes))
}

fn digests(category: &Value, generators: &[CompactMap], input: &CompactMap) -> Digests {
    Digests {
        category: sha256_of(category),
        generators: sha256_of(&generators),
        input: sha256_of(input),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Garner => "garner",
        Mode::Quillen => "quillen",
    }
}

pub fn emit(state: &SequenceState) -> Result<Certificate> {
    let category = io::category_ref(state.generators().base());
    let generators: Vec<CompactMap> = state.generators().members().iter().map(|a| compact_map(a.map())).collect();
    let input = compact_map(state.input().map());
    let mut stages = state
        .stages()
        .iter()
        .map(|s| {
            let (kind, limit_start) = match s.kind() {
                StageKind::Initial => ("initial", None),
                StageKind::Successor => ("successor", None),
                StageKind::Limit { start } => ("limit", Some(start)),
            };
            StageRecord {
                label: s.label(),
                kind: kind.to_string(),
                limit_start,
                object: compact(s.object()),
                lambda: s.lambda().components().to_vec(),
                rho: s.rho().components().to_vec(),
                incoming: s.incoming().map(|m| m.components().to_vec()),
                sigma: s.sigma().map(|m| m.components().to_vec()),
                pair: None,
            }
        })
        .collect::<Vec<_>>();
    // the pair is recorded on the stage whose σ coequalizes it
    for (i, s) in state.stages().iter().enumerate().skip(1) {
        if let Some((p1, p2)) = s.coequalized_pair() {
            stages[i - 1].pair = Some(PairRecord {
                source: compact(p1.source()),
                maps: [p1.components().to_vec(), p2.components().to_vec()],
            });
        }
    }
    let algebra = match extract_algebra(state) {
        Ok(a) => {
            let table = fillers_from_algebra(&a)?;
            Some(AlgebraRecord {
                stage: state.converged_at().expect("algebra implies convergence"),
                p: a.p().components().to_vec(),
                lifting_table: table
                    .squares()
                    .iter()
                    .zip(table.fillers())
                    .map(|((idx, s), d)| FillerRecord {
                        generator: idx.generator,
                        order: idx.order,
                        top: s.top().components().to_vec(),
                        bottom: s.bottom().components().to_vec(),
                        filler: d.components().to_vec(),
                    })
                    .collect(),
            })
        }
        Err(Error::AbsentAlgebra) => None,
        Err(e) => return Err(e),
    };
    let budget = state.budget();
    Ok(Certificate {
        schema: SCHEMA.to_string(),
        mode: mode_name(state.mode()).to_string(),
        digests: digests(&category, &generators, &input),
        category,
        generators,
        input,
        budget: BudgetRecord {
            successors_per_block: budget.successors_per_block,
            omega_blocks: budget.omega_blocks,
        },
        converged_at: state.converged_at(),
        exhausted: state.is_exhausted(),
        stages,
        cardinalities: state.cardinalities(),
        algebra,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json(cert: &Certificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("plain data");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationSummary {
    pub mode: String,
    pub stages: usize,
    pub converged_at: Option<usize>,
    pub exhausted: bool,
    pub fillers_checked: usize,
}

fn bad(what: impl Into<String>) -> Error {
    Error::Invalid(format!("certificate: {}", what.into()))
}

fn presheaf(base: &Arc<FinCategory>, c: &CompactPresheaf, what: &str) -> Result<Presheaf> {
    Presheaf::new(base.clone(), c.sizes.clone(), c.actions.clone()).map_err(|e| bad(format!("{what}: {e}")))
}

fn map(src: &Presheaf, tgt: &Presheaf, t: &Table, what: &str) -> Result<PresheafMap> {
    PresheafMap::new(src.clone(), tgt.clone(), t.clone()).map_err(|e| bad(format!("{what}: {e}")))
}

fn full_map(base: &Arc<FinCategory>, c: &CompactMap, what: &str) -> Result<PresheafMap> {
    let s = presheaf(base, &c.source, what)?;
    let t = presheaf(base, &c.target, what)?;
    map(&s, &t, &c.components, what)
}

/// Reads a certificate and checks it. Errors in the document itself are
/// input errors; a well-formed certificate whose content is wrong yields
/// [`Error::Invalid`].
pub fn validate_text(text: &str) -> Result<ValidationSummary> {
    let v = io::parse_json(text)?;
    let cert: Certificate = serde_path_to_error::deserialize(&v).map_err(|e| Error::Input {
        pointer: format!("/{}", e.path().to_string().replace('.', "/")),
        message: e.into_inner().to_string(),
    })?;
    validate(&cert)
}

pub fn validate(cert: &Certificate) -> Result<ValidationSummary> {
    if cert.schema != SCHEMA {
        return Err(bad(format!("unknown schema `{}`", cert.schema)));
    }
    let mode = match cert.mode.as_str() {
        "garner" => Mode::Garner,
        "quillen" => Mode::Quillen,
        other => return Err(bad(format!("unknown mode `{other}`"))),
    };
    if digests(&cert.category, &cert.generators, &cert.input) != cert.digests {
        return Err(bad("input digests do not match the stored inputs"));
    }
    let base = io::category_from_value(&cert.category, "/category")?;
    let members = cert
        .generators
        .iter()
        .enumerate()
        .map(|(i, c)| full_map(&base, c, &format!("generator {i}")).map(ArrowObj::from))
        .collect::<Result<Vec<_>>>()?;
    let gens = GeneratingSet::new(base.clone(), members)?;
    let g = full_map(&base, &cert.input, "input")?;
    let (x, y) = (g.source().clone(), g.target().clone());

    let n = cert.stages.len();
    if n == 0 {
        return Err(bad("no stages"));
    }
    let mut objects = Vec::with_capacity(n);
    let mut rhos: Vec<PresheafMap> = Vec::with_capacity(n);
    let mut incomings: Vec<Option<PresheafMap>> = Vec::with_capacity(n);
    for (i, s) in cert.stages.iter().enumerate() {
        let what = format!("stage {}", s.label);
        let k = presheaf(&base, &s.object, &what)?;
        let lambda = map(&x, &k, &s.lambda, &format!("{what} λ"))?;
        let rho = map(&k, &y, &s.rho, &format!("{what} ρ"))?;
        if rho.compose(&lambda)? != g {
            return Err(bad(format!("{what}: ρ∘λ ≠ g")));
        }
        let incoming = match (&s.incoming, i) {
            (None, 0) => None,
            (Some(t), i) if i > 0 => {
                let inc = map(&objects[i - 1], &k, t, &format!("{what} incoming"))?;
                let prev: &StageRecord = &cert.stages[i - 1];
                let prev_lambda = map(&x, &objects[i - 1], &prev.lambda, "λ")?;
                if inc.compose(&prev_lambda)? != lambda || rho.compose(&inc)? != rhos[i - 1] {
                    return Err(bad(format!("{what}: connecting map does not commute")));
                }
                Some(inc)
            }
            _ => return Err(bad(format!("{what}: incoming map present exactly on non-initial stages"))),
        };
        if cert.cardinalities.get(i).map(Vec::as_slice) != Some(k.sizes()) {
            return Err(bad(format!("{what}: cardinality row disagrees with the object")));
        }
        objects.push(k);
        rhos.push(rho);
        incomings.push(incoming);
    }
    if cert.cardinalities.len() != n {
        return Err(bad("cardinality table has the wrong number of rows"));
    }

    // σ and the quotient that defines each successor
    for (i, s) in cert.stages.iter().enumerate() {
        let what = format!("stage {}", s.label);
        let Some(sig) = &s.sigma else {
            if i + 1 < n && cert.stages[i + 1].kind == "successor" {
                return Err(bad(format!("{what}: σ missing before a successor")));
            }
            continue;
        };
        if i + 1 >= n {
            return Err(bad(format!("{what}: σ without a next stage")));
        }
        let os = build_onestep(&gens, &ArrowObj::from(rhos[i].clone()))?;
        let sigma = map(os.k_prime(), &objects[i + 1], sig, &format!("{what} σ"))?;
        if Some(sigma.compose(os.lambda_prime())?) != incomings[i + 1] {
            return Err(bad(format!("{what}: next connecting map is not σ∘λ'")));
        }
        match (mode, &s.pair) {
            (Mode::Quillen, None) => {
                if sigma != PresheafMap::identity(os.k_prime()) {
                    return Err(bad(format!("{what}: σ is not the identity in the classical sequence")));
                }
            }
            (Mode::Garner, pair) => {
                let (p1, p2) = match pair {
                    Some(pr) => {
                        let src = presheaf(&base, &pr.source, "pair source")?;
                        (map(&src, os.k_prime(), &pr.maps[0], "pair")?, map(&src, os.k_prime(), &pr.maps[1], "pair")?)
                    }
                    None if i == 0 => {
                        let id = PresheafMap::identity(os.k_prime());
                        (id.clone(), id)
                    }
                    None => return Err(bad(format!("{what}: coequalized pair missing"))),
                };
                let q = coequalizer(&p1, &p2)?;
                if q.apex() != &objects[i + 1] || q.leg(0) != &sigma {
                    return Err(bad(format!("{what}: σ is not the coequalizer of the recorded pair")));
                }
            }
            (Mode::Quillen, Some(_)) => return Err(bad(format!("{what}: the classical sequence has no pairs"))),
        }
    }

    match cert.converged_at {
        Some(gam) => {
            let inc = incomings
                .get(gam + 1)
                .and_then(Option::as_ref)
                .ok_or_else(|| bad("converged stage has no successor"))?;
            if !inc.is_iso() {
                return Err(bad("connecting map at the converged stage is not invertible"));
            }
        }
        None if !cert.exhausted => return Err(bad("neither converged nor exhausted")),
        None => {}
    }

    let mut fillers_checked = 0;
    match (&cert.algebra, cert.converged_at) {
        (Some(a), Some(gam)) if a.stage == gam => {
            let os_gam = build_onestep(&gens, &ArrowObj::from(rhos[gam].clone()))?;
            let p = map(os_gam.k_prime(), &objects[gam], &a.p, "algebra p")?;
            if p.compose(os_gam.lambda_prime())? != PresheafMap::identity(&objects[gam]) || rhos[gam].compose(&p)? != *os_gam.rho_prime() {
                return Err(bad("algebra equations fail"));
            }
            let target = ArrowObj::from(rhos[gam].clone());
            if a.lifting_table.len() != os_gam.squares().len() {
                return Err(bad("lifting table does not cover every square"));
            }
            for (r, (idx, s)) in a.lifting_table.iter().zip(os_gam.squares()) {
                let j = gens.members().get(r.generator).ok_or_else(|| bad("filler names an unknown generator"))?;
                let top = map(j.domain(), &objects[gam], &r.top, "filler top")?;
                let bottom = map(j.codomain(), &y, &r.bottom, "filler bottom")?;
                let d = map(j.codomain(), &objects[gam], &r.filler, "filler")?;
                if (r.generator, r.order) != (idx.generator, idx.order) || &top != s.top() || &bottom != s.bottom() {
                    return Err(bad("lifting table squares are out of order"));
                }
                let sq = Square::new(j.clone(), target.clone(), top, bottom)?;
                check_filler(&sq, &d).map_err(|e| bad(format!("filler {}/{}: {e}", r.generator, r.order)))?;
                fillers_checked += 1;
            }
        }
        (None, None) => {}
        (None, Some(_)) => return Err(bad("converged run without an algebra")),
        _ => return Err(bad("algebra recorded at the wrong stage")),
    }

    // finally, the record must be exactly what the inputs produce
    let budget = OrdinalBudget::new(cert.budget.successors_per_block, cert.budget.omega_blocks)?;
    let stopped = cert.converged_at.is_none_or(|gam| n == gam + 2);
    let rerun = run_sequence(mode, &gens, &ArrowObj::from(g), budget, stopped)?;
    if emit(&rerun)? != *cert {
        return Err(bad("stored stages differ from a fresh run on the stored inputs"));
    }

    Ok(ValidationSummary {
        mode: cert.mode.clone(),
        stages: n,
        converged_at: cert.converged_at,
        exhausted: cert.exhausted,
        fillers_checked,
    })
}
