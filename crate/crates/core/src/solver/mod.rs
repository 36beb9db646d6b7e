//! Chain reactions, the two discretization steps and the top-level solve.

mod cr;
mod cycle;

use serde::Serialize;
use thiserror::Error;

use crate::fieldarith::{field_ops, normalize_vector_cached, FieldElement, FieldError, NormCache};
use crate::model::{Assignment, Instance, InteractionGraph};
use crate::preprocess;
use crate::transfer::{eigenvectors, perp, product_factors, transfer_of, Eigen, TransferMatrix};

pub use cr::{ChainReaction, Conflict, CrStatus, ParallelOutcome};
pub use cycle::CycleFound;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Assign the stored perpendicular vector when crossing a product
    /// constraint instead of the computed image.
    pub fastpath: bool,
    /// Scale every output vector to unit norm.
    pub normalize: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            fastpath: true,
            normalize: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveMetrics {
    pub edge_traversals: u64,
    pub field_ops: u64,
    pub max_coeff_bits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Preprocess,
    ProductDiscretize,
    CycleDiscretize,
}

#[derive(Clone, Debug)]
pub enum UnsatWitness {
    /// The constraints on this pair span the whole two-qubit space.
    FullRankPair { u: usize, v: usize },
    /// A qubit would belong to two rank-3 pairs, one of them entangled.
    Monogamy { qubit: usize },
    /// Two product kernels force different states on one qubit.
    PairClash { qubit: usize },
    /// A non-product constraint touches an entangled pair.
    EntangledNeighbor { constraint: usize },
    /// Every chain reaction tried ran into a conflict.
    Conflicts(Vec<Conflict>),
}

#[derive(Clone, Debug)]
pub struct Unsat {
    pub phase: Phase,
    pub witness: UnsatWitness,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Sat(Assignment),
    Unsat(Unsat),
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub metrics: SolveMetrics,
}

impl SolveReport {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat(_))
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match &self.outcome {
            Outcome::Sat(a) => Some(a),
            Outcome::Unsat(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A committed chain reaction, reported before its qubits leave the graph.
pub struct CommitEvent<'a> {
    pub phase: Phase,
    pub instance: &'a Instance,
    pub graph: &'a InteractionGraph,
    pub visited: &'a [(usize, [FieldElement; 2])],
}

type PhaseFn<'a> = fn(&mut Solver<'a>) -> Result<Option<Unsat>, SolveError>;

pub trait SolveObserver {
    fn on_commit(&mut self, _event: &CommitEvent<'_>) {}
}

#[derive(Clone, Debug)]
pub(crate) struct ProductInfo {
    pub a: [FieldElement; 2],
    pub b: [FieldElement; 2],
    pub a_perp: [FieldElement; 2],
    pub b_perp: [FieldElement; 2],
}

#[derive(Clone, Debug)]
pub(crate) enum PreRecord {
    Free,
    Single([FieldElement; 2]),
    Entangled,
}

/// Solve-local state: the live graph, the growing assignment and cached
/// per-constraint data.
pub struct Solver<'a> {
    pub(crate) inst: &'a Instance,
    pub(crate) graph: InteractionGraph,
    pub(crate) transfers: Vec<[TransferMatrix; 2]>,
    pub(crate) products: Vec<Option<ProductInfo>>,
    pub(crate) pre: Vec<PreRecord>,
    pub(crate) assignment: Assignment,
    pub(crate) opts: SolveOptions,
    pub(crate) traversals: u64,
    pub(crate) max_bits: u64,
    observer: Option<&'a mut dyn SolveObserver>,
}

impl<'a> Solver<'a> {
    pub fn new(inst: &'a Instance, opts: SolveOptions) -> Self {
        let transfers = inst
            .constraints()
            .iter()
            .map(|c| [transfer_of(c, true), transfer_of(c, false)])
            .collect();
        let products = inst
            .constraints()
            .iter()
            .map(|c| {
                product_factors(&c.eta).map(|f| ProductInfo {
                    a_perp: perp(&f.a),
                    b_perp: perp(&f.b),
                    a: f.a,
                    b: f.b,
                })
            })
            .collect();
        Solver {
            inst,
            graph: InteractionGraph::from_instance(inst),
            transfers,
            products,
            pre: vec![PreRecord::Free; inst.n()],
            assignment: Assignment::new(inst.n()),
            opts,
            traversals: 0,
            max_bits: 0,
            observer: None,
        }
    }

    pub fn with_observer(mut self, obs: &'a mut dyn SolveObserver) -> Self {
        self.observer = Some(obs);
        self
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    pub fn edge_traversals(&self) -> u64 {
        self.traversals
    }

    pub fn is_product(&self, c: usize) -> bool {
        self.products[c].is_some()
    }

    /// The live part of the instance, on the same qubit indices.
    pub fn residual_instance(&self) -> Instance {
        let mut out = Instance::new(self.inst.field().clone(), self.inst.n());
        for c in self.inst.constraints() {
            if self.graph.is_live_constraint(c.id) {
                out.add_constraint(c.u, c.v, c.eta.clone())
                    .expect("constraint copied from a valid instance");
            }
        }
        out
    }

    /// Image of `psi` across half-edge `h`, or `None` when it vanishes.
    pub(crate) fn propagate(
        &mut self,
        h: usize,
        psi: &[FieldElement; 2],
    ) -> Option<[FieldElement; 2]> {
        self.traversals += 1;
        let c = InteractionGraph::constraint(h);
        let fwd = InteractionGraph::forward(h);
        if self.opts.fastpath {
            if let Some(p) = &self.products[c] {
                let (near, far_perp) = if fwd {
                    (&p.a, &p.b_perp)
                } else {
                    (&p.b, &p.a_perp)
                };
                let d = &near[0] * &psi[0] + &near[1] * &psi[1];
                return (!d.is_zero()).then(|| far_perp.clone());
            }
        }
        let w = self.transfers[c][usize::from(!fwd)].apply(psi);
        if w[0].is_zero() && w[1].is_zero() {
            None
        } else {
            Some(w)
        }
    }

    /// Starts a chain reaction at `seed` without running it.
    pub fn start_cr(&self, seed: usize, v: [FieldElement; 2]) -> ChainReaction {
        ChainReaction::start(self, seed, v)
    }

    /// Runs a single chain reaction to completion or conflict.
    pub fn induce_cr(&mut self, seed: usize, v: [FieldElement; 2]) -> ChainReaction {
        let mut cr = self.start_cr(seed, v);
        cr.run(self);
        cr
    }

    /// Interleaves the chain reactions one edge traversal at a time, first
    /// seed first, and returns the first to complete.
    pub fn run_parallel_crs(&mut self, seeds: Vec<(usize, [FieldElement; 2])>) -> ParallelOutcome {
        let mut crs: Vec<ChainReaction> = seeds
            .into_iter()
            .map(|(q, v)| self.start_cr(q, v))
            .collect();
        loop {
            let mut running = false;
            for i in 0..crs.len() {
                if crs[i].is_running() {
                    crs[i].step(self);
                    running = true;
                }
                if crs[i].is_complete() {
                    return ParallelOutcome::Winner(crs.swap_remove(i));
                }
            }
            if !running {
                let conflicts = crs
                    .into_iter()
                    .filter_map(|cr| cr.into_conflict())
                    .collect();
                return ParallelOutcome::AllConflict(conflicts);
            }
        }
    }

    /// Records a completed chain reaction and removes its qubits.
    pub fn commit(&mut self, cr: ChainReaction, phase: Phase) -> Result<(), SolveError> {
        if !cr.is_complete() {
            return Err(SolveError::Internal(
                "committing an unfinished chain reaction".into(),
            ));
        }
        let visited = cr.into_visited();
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.on_commit(&CommitEvent {
                phase,
                instance: self.inst,
                graph: &self.graph,
                visited: &visited,
            });
        }
        for (q, v) in visited {
            self.max_bits = self.max_bits.max(v[0].coeff_bits()).max(v[1].coeff_bits());
            self.assignment.set_single(q, v)?;
            self.graph.remove_qubit(q);
        }
        Ok(())
    }

    /// Clears live product constraints by parallel chain reactions seeded
    /// with the two perpendicular states.
    pub fn step1_product_discretize(&mut self) -> Result<Option<Unsat>, SolveError> {
        for c in 0..self.inst.m() {
            if !self.graph.is_live_constraint(c) {
                continue;
            }
            let Some(p) = &self.products[c] else {
                continue;
            };
            let con = self.inst.constraint(c);
            let seeds = vec![(con.u, p.a_perp.clone()), (con.v, p.b_perp.clone())];
            match self.run_parallel_crs(seeds) {
                ParallelOutcome::Winner(cr) => self.commit(cr, Phase::ProductDiscretize)?,
                ParallelOutcome::AllConflict(cs) => {
                    return Ok(Some(Unsat {
                        phase: Phase::ProductDiscretize,
                        witness: UnsatWitness::Conflicts(cs),
                    }))
                }
            }
        }
        Ok(None)
    }

    /// Assigns every remaining component: from the eigenvectors of a
    /// discretizing cycle when there is one, else from `|0>`.
    pub fn step2_cycle_discretize(&mut self) -> Result<Option<Unsat>, SolveError> {
        for v in 0..self.inst.n() {
            if !self.graph.is_live_qubit(v) {
                continue;
            }
            match self.find_discretizing_cycle(v)? {
                Some(found) => {
                    let Eigen::Vectors { pairs, .. } = eigenvectors(&found.matrix)? else {
                        return Err(SolveError::Internal(
                            "discretizing cycle with scalar matrix".into(),
                        ));
                    };
                    let seeds = pairs.into_iter().map(|(w, _)| (found.base, w)).collect();
                    match self.run_parallel_crs(seeds) {
                        ParallelOutcome::Winner(cr) => self.commit(cr, Phase::CycleDiscretize)?,
                        ParallelOutcome::AllConflict(cs) => {
                            return Ok(Some(Unsat {
                                phase: Phase::CycleDiscretize,
                                witness: UnsatWitness::Conflicts(cs),
                            }))
                        }
                    }
                }
                None => {
                    let base = self.inst.base_level();
                    let zero = [FieldElement::one(base), FieldElement::zero(base)];
                    let cr = self.induce_cr(v, zero);
                    if !cr.is_complete() {
                        return Err(SolveError::Internal(format!(
                            "free choice at qubit {v} produced a conflict"
                        )));
                    }
                    self.commit(cr, Phase::CycleDiscretize)?;
                }
            }
        }
        Ok(None)
    }

    fn metrics(&self, ops0: u64) -> SolveMetrics {
        SolveMetrics {
            edge_traversals: self.traversals,
            field_ops: field_ops() - ops0,
            max_coeff_bits: self.max_bits,
        }
    }

    /// Runs all phases and consumes the solver.
    pub fn run(mut self) -> Result<SolveReport, SolveError> {
        let ops0 = field_ops();
        let phases: [PhaseFn<'a>; 3] = [
            preprocess::run,
            Self::step1_product_discretize,
            Self::step2_cycle_discretize,
        ];
        for phase in phases {
            if let Some(u) = phase(&mut self)? {
                return Ok(SolveReport {
                    outcome: Outcome::Unsat(u),
                    metrics: self.metrics(ops0),
                });
            }
        }
        if let Some(q) = self.assignment.uncovered().first() {
            return Err(SolveError::Internal(format!("qubit {q} left unassigned")));
        }
        if self.opts.normalize {
            normalize_assignment(&mut self.assignment)?;
        }
        let metrics = self.metrics(ops0);
        Ok(SolveReport {
            outcome: Outcome::Sat(self.assignment),
            metrics,
        })
    }
}

/// Scales every vector of `a` to unit norm.
pub fn normalize_assignment(a: &mut Assignment) -> Result<(), FieldError> {
    let mut cache = NormCache::default();
    a.map_singles(|_, v| {
        let (w, _) = normalize_vector_cached(v, &mut cache)?;
        Ok([w[0].clone(), w[1].clone()])
    })?;
    let pairs: Vec<_> = a.pairs().to_vec();
    let mut fresh = Assignment::new(a.n());
    for q in 0..a.n() {
        if let Some(v) = a.single(q) {
            fresh.set_single(q, v.clone())?;
        }
    }
    for p in pairs {
        let (w, _) = normalize_vector_cached(&p.vector, &mut cache)?;
        fresh.set_pair(p.i, p.j, w.try_into().expect("four amplitudes"))?;
    }
    *a = fresh;
    Ok(())
}

pub fn solve(inst: &Instance) -> Result<SolveReport, SolveError> {
    Solver::new(inst, SolveOptions::default()).run()
}

pub fn solve_with(
    inst: &Instance,
    opts: SolveOptions,
    observer: Option<&mut dyn SolveObserver>,
) -> Result<SolveReport, SolveError> {
    let s = Solver::new(inst, opts);
    match observer {
        Some(o) => s.with_observer(o).run(),
        None => s.run(),
    }
}
