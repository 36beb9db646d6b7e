use std::collections::HashMap;

use super::{PreRecord, Solver};
use crate::fieldarith::FieldElement;
use crate::transfer::proportional;

/// Two incompatible states forced on one qubit. `recorded` is `None` when the
/// qubit belongs to an entangled pair and accepts no single state.
#[derive(Clone, Debug)]
pub struct Conflict {
    pub qubit: usize,
    pub recorded: Option<[FieldElement; 2]>,
    pub incoming: [FieldElement; 2],
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum CrStatus {
    Running,
    Complete,
    Conflict(Conflict),
}

#[allow(clippy::large_enum_variant)]
pub enum ParallelOutcome {
    Winner(ChainReaction),
    AllConflict(Vec<Conflict>),
}

/// A depth-first propagation of a seed state. Writes stay private until
/// the solver commits the reaction.
#[derive(Clone, Debug)]
pub struct ChainReaction {
    seed: usize,
    visited: Vec<(usize, [FieldElement; 2])>,
    index: HashMap<usize, usize>,
    // (index into visited, next half-edge to examine)
    stack: Vec<(usize, Option<usize>)>,
    status: CrStatus,
    steps: u64,
}

impl ChainReaction {
    pub(crate) fn start(s: &Solver, seed: usize, v: [FieldElement; 2]) -> Self {
        let mut cr = ChainReaction {
            seed,
            visited: Vec::new(),
            index: HashMap::new(),
            stack: Vec::new(),
            status: CrStatus::Running,
            steps: 0,
        };
        if let Some(c) = clash(s, seed, &v) {
            cr.status = CrStatus::Conflict(c);
        } else {
            cr.record(s, seed, v);
        }
        cr
    }

    fn record(&mut self, s: &Solver, q: usize, v: [FieldElement; 2]) {
        let k = self.visited.len();
        self.index.insert(q, k);
        self.visited.push((q, v));
        self.stack.push((k, s.graph.first(q)));
    }

    /// Crosses one edge, or finishes when nothing is left to explore.
    pub(crate) fn step(&mut self, s: &mut Solver) {
        if !self.is_running() {
            return;
        }
        let (k, h) = loop {
            let Some(top) = self.stack.last_mut() else {
                self.status = CrStatus::Complete;
                return;
            };
            match top.1 {
                Some(h) => {
                    top.1 = s.graph.next_half(h);
                    break (top.0, h);
                }
                None => {
                    self.stack.pop();
                }
            }
        };
        self.steps += 1;
        let psi = self.visited[k].1.clone();
        let Some(w) = s.propagate(h, &psi) else {
            return;
        };
        let t = s.graph.to(h);
        if let Some(&j) = self.index.get(&t) {
            if !proportional(&w, &self.visited[j].1) {
                self.status = CrStatus::Conflict(Conflict {
                    qubit: t,
                    recorded: Some(self.visited[j].1.clone()),
                    incoming: w,
                });
            }
            return;
        }
        if let Some(c) = clash(s, t, &w) {
            self.status = CrStatus::Conflict(c);
            return;
        }
        self.record(s, t, w);
    }

    pub fn run(&mut self, s: &mut Solver) {
        while self.is_running() {
            self.step(s);
        }
    }

    pub fn seed(&self) -> usize {
        self.seed
    }

    pub fn status(&self) -> &CrStatus {
        &self.status
    }

    pub fn is_running(&self) -> bool {
        matches!(self.status, CrStatus::Running)
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.status, CrStatus::Complete)
    }

    /// Edge traversals performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn visited(&self) -> &[(usize, [FieldElement; 2])] {
        &self.visited
    }

    pub fn state_of(&self, q: usize) -> Option<&[FieldElement; 2]> {
        self.index.get(&q).map(|&k| &self.visited[k].1)
    }

    pub(crate) fn into_visited(self) -> Vec<(usize, [FieldElement; 2])> {
        self.visited
    }

    pub fn into_conflict(self) -> Option<Conflict> {
        match self.status {
            CrStatus::Conflict(c) => Some(c),
            _ => None,
        }
    }
}

/// Checks a forced state against what preprocessing already fixed.
fn clash(s: &Solver, q: usize, v: &[FieldElement; 2]) -> Option<Conflict> {
    match &s.pre[q] {
        PreRecord::Free => None,
        PreRecord::Single(r) if proportional(v, r) => None,
        PreRecord::Single(r) => Some(Conflict {
            qubit: q,
            recorded: Some(r.clone()),
            incoming: v.clone(),
        }),
        PreRecord::Entangled => Some(Conflict {
            qubit: q,
            recorded: None,
            incoming: v.clone(),
        }),
    }
}
