//! The free-monad sequence of the one-step factorisation, run pointwise at a
//! single map `g: C → D`, and Quillen's classical iteration for comparison.
//!
//! Stages are stored in a flat list. Block 0 holds the initial stage and
//! `successors_per_block` successors; every later block starts with a limit
//! stage (the colimit of the previous block) followed by the same number of
//! successors.

use std::fmt;

use crate::arrow::{ArrowObj, GeneratingSet, Square};
use crate::colimit::{chain_colimit, coequalizer, Cocone};
use crate::error::{Error, Result};
use crate::onestep::{build_onestep, onestep_on_square, OneStep};
use crate::presheaf::{Presheaf, PresheafMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrdinalBudget {
    pub successors_per_block: usize,
    pub omega_blocks: usize,
}

impl Default for OrdinalBudget {
    fn default() -> Self {
        OrdinalBudget {
            successors_per_block: 32,
            omega_blocks: 1,
        }
    }
}

impl OrdinalBudget {
    pub fn new(successors_per_block: usize, omega_blocks: usize) -> Result<Self> {
        if successors_per_block == 0 {
            return Err(Error::Precondition("successors_per_block must be at least 1".into()));
        }
        Ok(OrdinalBudget {
            successors_per_block,
            omega_blocks,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Garner,
    Quillen,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Garner => "garner",
            Mode::Quillen => "quillen",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    Initial,
    Successor,
    /// Colimit of the stages from `start` up to the one before it.
    Limit { start: usize },
}

#[derive(Clone, Debug)]
pub struct Stage {
    kind: StageKind,
    block: usize,
    offset: usize,
    object: Presheaf,
    lambda: PresheafMap,
    rho: PresheafMap,
    /// `K_{α-1} → K_α` (for a limit stage, the colimit leg of the last
    /// stage of the block).
    incoming: Option<PresheafMap>,
    /// `σ_α: K'(ρ_α) → K_{α+1}`, once the next stage exists.
    sigma: Option<PresheafMap>,
    onestep: Option<OneStep>,
    /// The pair whose coequalizer produced this stage.
    pair: Option<(PresheafMap, PresheafMap)>,
    colimit: Option<Cocone>,
}

impl Stage {
    pub fn kind(&self) -> StageKind {
        self.kind
    }

    /// Ordinal label: `3`, `ω`, `ω+2`, `ω·2+1`, ...
    pub fn label(&self) -> String {
        let head = match self.block {
            0 => String::new(),
            1 => "ω".to_string(),
            b => format!("ω·{b}"),
        };
        match (head.is_empty(), self.offset) {
            (true, n) => n.to_string(),
            (false, 0) => head,
            (false, n) => format!("{head}+{n}"),
        }
    }

    pub fn object(&self) -> &Presheaf {
        &self.object
    }

    pub fn lambda(&self) -> &PresheafMap {
        &self.lambda
    }

    pub fn rho(&self) -> &PresheafMap {
        &self.rho
    }

    pub fn incoming(&self) -> Option<&PresheafMap> {
        self.incoming.as_ref()
    }

    pub fn sigma(&self) -> Option<&PresheafMap> {
        self.sigma.as_ref()
    }

    pub fn onestep(&self) -> Option<&OneStep> {
        self.onestep.as_ref()
    }

    pub fn coequalized_pair(&self) -> Option<&(PresheafMap, PresheafMap)> {
        self.pair.as_ref()
    }

    pub fn colimit(&self) -> Option<&Cocone> {
        self.colimit.as_ref()
    }
}

#[derive(Clone, Debug)]
pub struct SequenceState {
    mode: Mode,
    gens: GeneratingSet,
    input: ArrowObj,
    budget: OrdinalBudget,
    stages: Vec<Stage>,
    converged_at: Option<usize>,
    exhausted: bool,
}

fn unit_square(from: &ArrowObj, to: &ArrowObj, top: PresheafMap) -> Square {
    Square::trusted(from.clone(), to.clone(), top, PresheafMap::identity(from.codomain()))
}

impl SequenceState {
    fn start(mode: Mode, gens: &GeneratingSet, g: &ArrowObj, budget: OrdinalBudget) -> Result<Self> {
        if !g.domain().shares_base(&Presheaf::empty(gens.base())) {
            return Err(Error::Incompatible("sequence: map and generators live over different categories".into()));
        }
        let c = g.domain().clone();
        Ok(SequenceState {
            mode,
            gens: gens.clone(),
            input: g.clone(),
            budget,
            stages: vec![Stage {
                kind: StageKind::Initial,
                block: 0,
                offset: 0,
                lambda: PresheafMap::identity(&c),
                rho: g.map().clone(),
                object: c,
                incoming: None,
                sigma: None,
                onestep: None,
                pair: None,
                colimit: None,
            }],
            converged_at: None,
            exhausted: false,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn input(&self) -> &ArrowObj {
        &self.input
    }

    pub fn budget(&self) -> OrdinalBudget {
        self.budget
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, i: usize) -> &Stage {
        &self.stages[i]
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn converged_at(&self) -> Option<usize> {
        self.converged_at
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// `(λ, K, ρ)` at the convergence stage, or at the last stage otherwise.
    pub fn factorization(&self) -> (&PresheafMap, &Presheaf, &PresheafMap) {
        let s = &self.stages[self.converged_at.unwrap_or(self.stages.len() - 1)];
        (&s.lambda, &s.object, &s.rho)
    }

    /// Per-stage, per-object carrier sizes.
    pub fn cardinalities(&self) -> Vec<Vec<usize>> {
        self.stages.iter().map(|s| s.object.sizes().to_vec()).collect()
    }

    /// The connecting map `K_α → K_β`.
    pub fn connect(&self, alpha: usize, beta: usize) -> Result<PresheafMap> {
        if alpha > beta || beta >= self.stages.len() {
            return Err(Error::Precondition(format!("connect({alpha}, {beta}) outside the recorded stages")));
        }
        let mut m = PresheafMap::identity(&self.stages[alpha].object);
        for s in &self.stages[alpha + 1..=beta] {
            m = s.incoming.as_ref().expect("non-initial stage has an incoming map").compose(&m)?;
        }
        Ok(m)
    }

    fn onestep_at(&mut self, i: usize) -> Result<&OneStep> {
        if self.stages[i].onestep.is_none() {
            let os = build_onestep(&self.gens, &ArrowObj::from(self.stages[i].rho.clone()))?;
            self.stages[i].onestep = Some(os);
        }
        Ok(self.stages[i].onestep.as_ref().unwrap())
    }

    fn os(&self, i: usize) -> &OneStep {
        self.stages[i].onestep.as_ref().expect("one-step computed before use")
    }

    /// `σ_β` and `K_{β+1}` for the Garner sequence, as the coequalizer of the
    /// pair recorded in the result.
    fn garner_successor(&mut self, beta: usize) -> Result<(Cocone, Option<(PresheafMap, PresheafMap)>)> {
        let lam = self.os(beta).lambda_prime().clone();
        match self.stages[beta].kind {
            StageKind::Initial => {
                let id = PresheafMap::identity(self.os(beta).k_prime());
                Ok((coequalizer(&id, &id)?, None))
            }
            StageKind::Successor => {
                let alpha = beta - 1;
                let sigma = self.stages[alpha].sigma.clone().expect("σ of predecessor");
                let p1 = lam.compose(&sigma)?;
                let sq = unit_square(
                    self.os(alpha).input(),
                    self.os(beta).input(),
                    self.stages[beta].incoming.clone().unwrap(),
                );
                let p2 = onestep_on_square(self.os(alpha), self.os(beta), &sq)?;
                Ok((coequalizer(&p1, &p2)?, Some((p1, p2))))
            }
            StageKind::Limit { start } => {
                let last = beta - 1;
                let legs = self.stages[beta].colimit.clone().expect("limit colimit");
                for a in start..last {
                    self.onestep_at(a)?;
                }
                // the chain K'(ρ_start) → … → K'(ρ_{last-1})
                let mut links = Vec::new();
                for a in start..last - 1 {
                    let sq = unit_square(
                        self.os(a).input(),
                        self.os(a + 1).input(),
                        self.stages[a + 1].incoming.clone().unwrap(),
                    );
                    links.push(onestep_on_square(self.os(a), self.os(a + 1), &sq)?);
                }
                let w = chain_colimit(self.os(start).k_prime(), &links)?;
                let mut via_sigma = Vec::new();
                let mut via_k = Vec::new();
                for a in start..last {
                    let sigma = self.stages[a].sigma.as_ref().expect("σ inside the block");
                    via_sigma.push(legs.leg(a + 1 - start).compose(sigma)?);
                    let sq = unit_square(self.os(a).input(), self.os(beta).input(), legs.leg(a - start).clone());
                    via_k.push(onestep_on_square(self.os(a), self.os(beta), &sq)?);
                }
                let p1 = lam.compose(&w.factor(&via_sigma)?)?;
                let p2 = w.factor(&via_k)?;
                Ok((coequalizer(&p1, &p2)?, Some((p1, p2))))
            }
        }
    }

    /// Appends the successor of the last stage.
    pub fn advance(&mut self) -> Result<()> {
        let beta = self.stages.len() - 1;
        self.onestep_at(beta)?;
        let os = self.os(beta).clone();
        let (sigma, object, rho, pair) = match self.mode {
            Mode::Quillen => (
                PresheafMap::identity(os.k_prime()),
                os.k_prime().clone(),
                os.rho_prime().clone(),
                None,
            ),
            Mode::Garner => {
                let (coeq, pair) = self.garner_successor(beta)?;
                let rho = coeq.factor(&[os.rho_prime().clone()])?;
                (coeq.leg(0).clone(), coeq.apex().clone(), rho, pair)
            }
        };
        let incoming = sigma.compose(os.lambda_prime())?;
        let lambda = incoming.compose(&self.stages[beta].lambda)?;
        let prev = &self.stages[beta];
        let (block, offset) = (prev.block, prev.offset + 1);
        self.stages[beta].sigma = Some(sigma);
        let converged = incoming.is_iso();
        self.stages.push(Stage {
            kind: StageKind::Successor,
            block,
            offset,
            object,
            lambda,
            rho,
            incoming: Some(incoming),
            sigma: None,
            onestep: None,
            pair,
            colimit: None,
        });
        if converged && self.converged_at.is_none() {
            self.converged_at = Some(beta);
        }
        Ok(())
    }

    /// Appends the colimit of the stages from `start` to the last one.
    fn take_limit(&mut self, start: usize) -> Result<()> {
        let last = self.stages.len() - 1;
        let links: Vec<PresheafMap> = self.stages[start + 1..=last]
            .iter()
            .map(|s| s.incoming.clone().unwrap())
            .collect();
        let x = chain_colimit(&self.stages[start].object, &links)?;
        let lambda = x.leg(0).compose(&self.stages[start].lambda)?;
        let rhos: Vec<PresheafMap> = self.stages[start..=last].iter().map(|s| s.rho.clone()).collect();
        let rho = x.factor(&rhos)?;
        let block = self.stages[last].block + 1;
        self.stages.push(Stage {
            kind: StageKind::Limit { start },
            block,
            offset: 0,
            object: x.apex().clone(),
            lambda,
            rho,
            incoming: Some(x.leg(last - start).clone()),
            sigma: None,
            onestep: None,
            pair: None,
            colimit: Some(x),
        });
        Ok(())
    }

    fn run(&mut self, stop_on_convergence: bool) -> Result<()> {
        let n = self.budget.successors_per_block;
        let mut start = 0;
        for block in 0..=self.budget.omega_blocks {
            if block > 0 {
                self.take_limit(start)?;
                start = self.stages.len() - 1;
            }
            for _ in 0..n {
                self.advance()?;
                if stop_on_convergence && self.converged_at.is_some() {
                    return Ok(());
                }
            }
        }
        self.exhausted = self.converged_at.is_none();
        Ok(())
    }

    /// Re-checks every per-stage equation: `ρ∘λ = g`, compatibility of the
    /// connecting maps with `λ` and `ρ`, and `K_{α,α+1} = σ_α∘λ'_{ρ_α}` at
    /// successors.
    pub fn check_invariants(&self) -> Result<()> {
        let g = self.input.map();
        for (i, s) in self.stages.iter().enumerate() {
            let fail = |what: &str| Err(Error::Internal(format!("stage {}: {what}", s.label())));
            if &s.rho.compose(&s.lambda)? != g {
                return fail("ρ∘λ ≠ g");
            }
            let Some(inc) = &s.incoming else { continue };
            let prev = &self.stages[i - 1];
            if inc.compose(&prev.lambda)? != s.lambda {
                return fail("connecting map does not commute with λ");
            }
            if s.rho.compose(inc)? != prev.rho {
                return fail("connecting map does not commute with ρ");
            }
            if s.kind == StageKind::Successor {
                let (Some(sigma), Some(os)) = (&prev.sigma, &prev.onestep) else {
                    return fail("missing σ or one-step of the predecessor");
                };
                if &sigma.compose(os.lambda_prime())? != inc {
                    return fail("connecting map differs from σ∘λ'");
                }
            }
        }
        Ok(())
    }
}

pub fn run_sequence(
    mode: Mode,
    gens: &GeneratingSet,
    g: &ArrowObj,
    budget: OrdinalBudget,
    stop_on_convergence: bool,
) -> Result<SequenceState> {
    let mut state = SequenceState::start(mode, gens, g, budget)?;
    state.run(stop_on_convergence)?;
    Ok(state)
}

/// Runs until the first isomorphic connecting map, or until the budget is
/// spent (in which case the state is marked exhausted).
pub fn run_garner(gens: &GeneratingSet, g: &ArrowObj, budget: OrdinalBudget) -> Result<SequenceState> {
    run_sequence(Mode::Garner, gens, g, budget, true)
}

pub fn run_quillen(gens: &GeneratingSet, g: &ArrowObj, budget: OrdinalBudget) -> Result<SequenceState> {
    run_sequence(Mode::Quillen, gens, g, budget, true)
}

/// The comparison maps `q_α: K^Q_α → K^G_α`, one per stage both runs share.
pub fn build_comparison(garner: &SequenceState, quillen: &SequenceState) -> Result<Vec<PresheafMap>> {
    if garner.mode != Mode::Garner || quillen.mode != Mode::Quillen {
        return Err(Error::Incompatible("build_comparison: expects a Garner run and a Quillen run".into()));
    }
    if garner.input != quillen.input || garner.gens != quillen.gens {
        return Err(Error::Incompatible("build_comparison: runs are on different inputs".into()));
    }
    let len = garner.stages.len().min(quillen.stages.len());
    let mut qs: Vec<PresheafMap> = Vec::with_capacity(len);
    for i in 0..len {
        let (gs, qs_i) = (&garner.stages[i], &quillen.stages[i]);
        if gs.kind != qs_i.kind {
            return Err(Error::Incompatible(format!("build_comparison: stage {i} has different kinds")));
        }
        let q = match gs.kind {
            StageKind::Initial => PresheafMap::identity(&gs.object),
            StageKind::Successor => {
                let (gp, qp) = (&garner.stages[i - 1], &quillen.stages[i - 1]);
                let (Some(gos), Some(qos)) = (&gp.onestep, &qp.onestep) else {
                    return Err(Error::Internal("build_comparison: missing one-step".into()));
                };
                let sq = Square::new(qos.input().clone(), gos.input().clone(), qs[i - 1].clone(), PresheafMap::identity(garner.input.codomain()))?;
                let k = onestep_on_square(qos, gos, &sq)?;
                gp.sigma.as_ref().expect("σ before a successor").compose(&k)?
            }
            StageKind::Limit { start } => {
                let (gx, qx) = (gs.colimit.as_ref().unwrap(), qs_i.colimit.as_ref().unwrap());
                let family: Vec<PresheafMap> = (start..i)
                    .map(|a| gx.leg(a - start).compose(&qs[a]))
                    .collect::<Result<_>>()?;
                qx.factor(&family)?
            }
        };
        qs.push(q);
    }
    Ok(qs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn func(s: usize, t: usize, v: &[usize]) -> ArrowObj {
        ArrowObj::from(catalog::function(s, t, v).unwrap())
    }

    fn budget(n: usize, w: usize) -> OrdinalBudget {
        OrdinalBudget::new(n, w).unwrap()
    }

    #[test]
    fn empty_generating_set_converges_at_once() {
        let g = func(2, 3, &[0, 2]);
        let s = run_garner(&GeneratingSet::empty(catalog::terminal()), &g, OrdinalBudget::default()).unwrap();
        assert_eq!(s.converged_at(), Some(0));
        let (lambda, k, rho) = s.factorization();
        assert_eq!(k, g.domain());
        assert_eq!(lambda, &PresheafMap::identity(g.domain()));
        assert_eq!(rho, g.map());
        let q = run_quillen(&GeneratingSet::empty(catalog::terminal()), &g, OrdinalBudget::default()).unwrap();
        assert_eq!(q.converged_at(), Some(0));
    }

    #[test]
    fn point_on_the_empty_map() {
        let g = func(0, 1, &[]);
        let s = run_garner(&catalog::point(), &g, budget(6, 0)).unwrap();
        assert_eq!(s.converged_at(), Some(1));
        assert_eq!(s.stage(1).object().sizes(), &[1]);
        let (p1, p2) = s.stage(2).coequalized_pair().unwrap();
        assert_eq!(p1.component(0), &[0]);
        assert_eq!(p2.component(0), &[1]);
        assert_eq!(s.stage(2).object().sizes(), &[1]);
        s.check_invariants().unwrap();
    }

    #[test]
    fn quillen_grows_by_one_point_per_step() {
        let g = func(0, 1, &[]);
        let q = run_quillen(&catalog::point(), &g, budget(6, 0)).unwrap();
        assert!(q.is_exhausted());
        let sizes: Vec<usize> = q.cardinalities().iter().map(|c| c[0]).collect();
        assert_eq!(sizes, vec![0, 1, 2, 3, 4, 5, 6]);
        q.check_invariants().unwrap();
        let q = run_quillen(&catalog::point(), &func(1, 2, &[1]), budget(4, 0)).unwrap();
        let sizes: Vec<usize> = q.cardinalities().iter().map(|c| c[0]).collect();
        assert_eq!(sizes, vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn comparison_on_the_empty_map() {
        let g = func(0, 1, &[]);
        let gs = run_sequence(Mode::Garner, &catalog::point(), &g, budget(4, 1), false).unwrap();
        let qs = run_sequence(Mode::Quillen, &catalog::point(), &g, budget(4, 1), false).unwrap();
        gs.check_invariants().unwrap();
        qs.check_invariants().unwrap();
        let maps = build_comparison(&gs, &qs).unwrap();
        assert_eq!(maps.len(), gs.len());
        assert!(maps[1].is_iso());
        assert_eq!(maps[2].component(0), &[0, 0]);
        for (i, q) in maps.iter().enumerate() {
            assert!(q.is_surjective(), "stage {i}");
            assert_eq!(q.compose(qs.stage(i).lambda()).unwrap(), *gs.stage(i).lambda());
            assert_eq!(gs.stage(i).rho().compose(q).unwrap(), *qs.stage(i).rho());
        }
    }

    #[test]
    fn limit_stages_are_labelled_and_consistent() {
        let g = func(1, 2, &[0]);
        let s = run_sequence(Mode::Garner, &catalog::point(), &g, budget(2, 2), false).unwrap();
        let labels: Vec<String> = s.stages().iter().map(Stage::label).collect();
        assert_eq!(labels, ["0", "1", "2", "ω", "ω+1", "ω+2", "ω·2", "ω·2+1", "ω·2+2"]);
        s.check_invariants().unwrap();
        assert_eq!(s.converged_at(), Some(1));
        assert!(s.connect(1, 8).unwrap().is_iso());
    }

    #[test]
    fn codiagonal_gives_the_image() {
        let g = func(4, 3, &[2, 0, 2, 2]);
        let s = run_garner(&catalog::codiagonal(), &g, OrdinalBudget::default()).unwrap();
        let (lambda, k, rho) = s.factorization();
        assert_eq!(k.sizes(), &[2]);
        assert!(lambda.is_surjective());
        assert!(rho.is_injective());
    }

    #[test]
    fn horn_run_is_exhausted_but_sound() {
        let x = catalog::reflexive_graph(2, &[(0, 1)]).unwrap();
        let g = catalog::to_terminal(&x);
        let s = run_garner(&catalog::horns(&catalog::delta_le1(), 1), &g, budget(2, 0)).unwrap();
        assert!(s.is_exhausted());
        s.check_invariants().unwrap();
    }

    #[test]
    fn convergence_is_stable_under_one_more_step() {
        let g = func(2, 3, &[0, 0]);
        let mut s = run_garner(&catalog::point(), &g, OrdinalBudget::default()).unwrap();
        let gamma = s.converged_at().unwrap();
        let before = s.len();
        s.advance().unwrap();
        assert_eq!(s.len(), before + 1);
        assert!(s.connect(gamma, s.len() - 1).unwrap().is_iso());
    }
}
