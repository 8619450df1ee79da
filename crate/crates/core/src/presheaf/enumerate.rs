//! Exhaustive enumeration of natural transformations between finite presheaves.
//!
//! The search assigns one source element at a time and immediately pushes
//! the forced values down every restriction map, so an inconsistent partial
//! assignment is abandoned as soon as naturality fails. Results are sorted
//! lexicographically by (object id, element id, target element id).

use std::cmp::Reverse;

use super::map::PresheafMap;
use super::object::Presheaf;
use crate::error::{Error, Result};

pub fn enumerate_maps(x: &Presheaf, y: &Presheaf) -> Result<Vec<PresheafMap>> {
    enumerate_maps_where(x, y, |_, _, _| true)
}

/// Enumerates the natural transformations `x ⇒ y` whose components satisfy
/// `allowed(object, source element, target element)` at every element.
pub fn enumerate_maps_where<F>(x: &Presheaf, y: &Presheaf, allowed: F) -> Result<Vec<PresheafMap>>
where
    F: Fn(usize, usize, usize) -> bool,
{
    if !x.shares_base(y) {
        return Err(Error::Incompatible("enumerate_maps: presheaves over different categories".into()));
    }
    let mut search = Search::new(x, y, &allowed);
    search.run(0);
    let mut solutions = search.solutions;
    solutions.sort();
    Ok(solutions
        .into_iter()
        .map(|c| PresheafMap::trusted(x.clone(), y.clone(), c))
        .collect())
}

/// Counts maps without materialising them.
pub fn count_maps_where<F>(x: &Presheaf, y: &Presheaf, allowed: F) -> Result<usize>
where
    F: Fn(usize, usize, usize) -> bool,
{
    if !x.shares_base(y) {
        return Err(Error::Incompatible("count_maps: presheaves over different categories".into()));
    }
    let mut search = Search::new(x, y, &allowed);
    search.count_only = true;
    search.run(0);
    Ok(search.count)
}

struct Search<'a, F> {
    x: &'a Presheaf,
    y: &'a Presheaf,
    allowed: &'a F,
    vars: Vec<(usize, usize)>,
    assign: Vec<Vec<Option<usize>>>,
    trail: Vec<(usize, usize)>,
    solutions: Vec<Vec<Vec<usize>>>,
    count: usize,
    count_only: bool,
}

impl<'a, F: Fn(usize, usize, usize) -> bool> Search<'a, F> {
    fn new(x: &'a Presheaf, y: &'a Presheaf, allowed: &'a F) -> Self {
        let cat = x.base();
        // Objects with many restriction maps out of them first: one choice
        // there fixes the most other values.
        let mut objs: Vec<usize> = (0..cat.object_count()).collect();
        objs.sort_by_key(|&b| (Reverse(cat.morphisms_into(b).len()), b));
        let vars = objs
            .iter()
            .flat_map(|&b| (0..x.size(b)).map(move |e| (b, e)))
            .collect();
        let assign = x.sizes().iter().map(|&n| vec![None; n]).collect();
        Search {
            x,
            y,
            allowed,
            vars,
            assign,
            trail: Vec::new(),
            solutions: Vec::new(),
            count: 0,
            count_only: false,
        }
    }

    fn run(&mut self, mut idx: usize) {
        while idx < self.vars.len() {
            let (b, e) = self.vars[idx];
            if self.assign[b][e].is_none() {
                break;
            }
            idx += 1;
        }
        if idx == self.vars.len() {
            self.count += 1;
            if !self.count_only {
                let sol = self
                    .assign
                    .iter()
                    .map(|c| c.iter().map(|v| v.expect("complete assignment")).collect())
                    .collect();
                self.solutions.push(sol);
            }
            return;
        }
        let (b, e) = self.vars[idx];
        for t in 0..self.y.size(b) {
            let mark = self.trail.len();
            if self.propagate(b, e, t) {
                self.run(idx + 1);
            }
            while self.trail.len() > mark {
                let (ob, oe) = self.trail.pop().unwrap();
                self.assign[ob][oe] = None;
            }
        }
    }

    fn propagate(&mut self, b: usize, e: usize, t: usize) -> bool {
        let cat = self.x.base();
        let mut stack = vec![(b, e, t)];
        while let Some((b, e, t)) = stack.pop() {
            match self.assign[b][e] {
                Some(v) if v == t => continue,
                Some(_) => return false,
                None => {}
            }
            if !(self.allowed)(b, e, t) {
                return false;
            }
            self.assign[b][e] = Some(t);
            self.trail.push((b, e));
            for &m in cat.morphisms_into(b) {
                let a = cat.morphism(m).dom;
                stack.push((a, self.x.act(m, e), self.y.act(m, t)));
            }
        }
        true
    }
}
