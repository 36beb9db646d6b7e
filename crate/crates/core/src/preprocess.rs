//! Per-pair rank filtering and the handling of rank-3 pairs.
//!
//! Constraints on one pair are summed incrementally. Full rank means UNSAT,
//! rank 2 keeps two independent constraints and rank 3 pins the pair to the
//! one-dimensional kernel, which then forces its neighbours.

use std::collections::HashMap;

use crate::fieldarith::FieldElement;
use crate::model::{Assignment, Constraint, Instance, InteractionGraph};
use crate::solver::{Phase, PreRecord, SolveError, SolveOptions, Solver, Unsat, UnsatWitness};
use crate::transfer::{product_factors, proportional, ProductFactors};

#[derive(Clone, Debug)]
pub struct PairSummary {
    /// The pair with `u < v`; rows and kernels are indexed `(u, v)`.
    pub u: usize,
    pub v: usize,
    pub rank: usize,
    /// Constraints that raised the rank, in input order.
    pub kept: Vec<usize>,
    /// Spans the kernel of the sum when the rank is 3.
    pub kernel: Option<[FieldElement; 4]>,
    /// Factors of the kernel when it is a product state.
    pub kernel_factors: Option<ProductFactors>,
}

/// The constraint vector with its first index on qubit `u`.
pub fn oriented(c: &Constraint, u: usize) -> [FieldElement; 4] {
    let [e00, e01, e10, e11] = &c.eta;
    if c.u == u {
        c.eta.clone()
    } else {
        [e00.clone(), e10.clone(), e01.clone(), e11.clone()]
    }
}

fn det3(m: [[&FieldElement; 3]; 3]) -> FieldElement {
    let minor = |a: usize, b: usize| m[1][a] * m[2][b] - m[1][b] * m[2][a];
    m[0][0] * &minor(1, 2) - m[0][1] * &minor(0, 2) + m[0][2] * &minor(0, 1)
}

/// Kernel of three independent rows: signed maximal minors.
fn kernel3(rows: &[[FieldElement; 4]]) -> [FieldElement; 4] {
    let col = |skip: usize| -> FieldElement {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        let m = [0, 1, 2].map(|r| [0, 1, 2].map(|k| &rows[r][cols[k]]));
        let d = det3(m);
        if skip.is_multiple_of(2) {
            d
        } else {
            -d
        }
    };
    [col(0), col(1), col(2), col(3)]
}

/// Summarizes the constraints acting on one pair. All of `cs` must act on
/// `{u, v}`.
pub fn summarize_pair(u: usize, v: usize, cs: &[&Constraint]) -> PairSummary {
    let (u, v) = (u.min(v), u.max(v));
    let mut echelon: Vec<([FieldElement; 4], usize)> = Vec::new();
    let mut kept = Vec::new();
    let mut rows = Vec::new();
    for c in cs {
        if echelon.len() == 4 {
            break;
        }
        let row = oriented(c, u);
        let mut r = row.clone();
        for (e, p) in &echelon {
            if !r[*p].is_zero() {
                let (ep, rp) = (&e[*p], r[*p].clone());
                r = [0, 1, 2, 3].map(|i| ep * &r[i] - &rp * &e[i]);
            }
        }
        if let Some(p) = r.iter().position(|x| !x.is_zero()) {
            echelon.push((r, p));
            kept.push(c.id);
            rows.push(row);
        }
    }
    let rank = echelon.len();
    let kernel = (rank == 3).then(|| kernel3(&rows));
    let kernel_factors = kernel.as_ref().and_then(product_factors);
    PairSummary {
        u,
        v,
        rank,
        kept,
        kernel,
        kernel_factors,
    }
}

/// Result of running only the preprocessing phase.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// Live constraints after preprocessing, on the original qubit indices.
    pub residual: Instance,
    /// States fixed so far (rank-3 pairs and the reactions they forced).
    pub partial: Assignment,
    pub unsat: Option<Unsat>,
}

pub fn apply_preprocessing(inst: &Instance) -> Result<Preprocessed, SolveError> {
    let mut s = Solver::new(inst, SolveOptions::default());
    let unsat = run(&mut s)?;
    Ok(Preprocessed {
        residual: s.residual_instance(),
        partial: s.assignment().clone(),
        unsat,
    })
}

fn unsat(witness: UnsatWitness) -> Option<Unsat> {
    Some(Unsat {
        phase: Phase::Preprocess,
        witness,
    })
}

pub(crate) fn run(s: &mut Solver) -> Result<Option<Unsat>, SolveError> {
    let inst = s.inst;
    let mut groups: HashMap<(usize, usize), Vec<&Constraint>> = HashMap::new();
    for c in inst.constraints() {
        groups
            .entry((c.u.min(c.v), c.u.max(c.v)))
            .or_default()
            .push(c);
    }
    let mut keys: Vec<(usize, usize)> = groups
        .iter()
        .filter(|(_, cs)| cs.len() > 1)
        .map(|(k, _)| *k)
        .collect();
    keys.sort_unstable();

    let mut rank3 = Vec::new();
    for key in keys {
        let cs = &groups[&key];
        let sum = summarize_pair(key.0, key.1, cs);
        match sum.rank {
            4 => return Ok(unsat(UnsatWitness::FullRankPair { u: key.0, v: key.1 })),
            3 => {
                for c in cs {
                    s.graph.remove_constraint(c.id);
                }
                rank3.push(sum);
            }
            _ => {
                for c in cs {
                    if !sum.kept.contains(&c.id) {
                        s.graph.remove_constraint(c.id);
                    }
                }
            }
        }
    }
    if rank3.is_empty() {
        return Ok(None);
    }

    // record the kernels; a qubit in an entangled pair can be in no other
    let mut seen: HashMap<usize, bool> = HashMap::new();
    for p in &rank3 {
        let entangled = p.kernel_factors.is_none();
        for q in [p.u, p.v] {
            if let Some(&prev) = seen.get(&q) {
                if prev || entangled {
                    return Ok(unsat(UnsatWitness::Monogamy { qubit: q }));
                }
            }
            seen.insert(q, entangled);
        }
        match &p.kernel_factors {
            None => {
                s.pre[p.u] = PreRecord::Entangled;
                s.pre[p.v] = PreRecord::Entangled;
                let k = p.kernel.clone().expect("rank 3 has a kernel");
                s.assignment.set_pair(p.u, p.v, k)?;
            }
            Some(f) => {
                for (q, x) in [(p.u, &f.a), (p.v, &f.b)] {
                    if let PreRecord::Single(r) = &s.pre[q] {
                        if !proportional(r, x) {
                            return Ok(unsat(UnsatWitness::PairClash { qubit: q }));
                        }
                    }
                    s.pre[q] = PreRecord::Single(x.clone());
                }
            }
        }
    }

    // an entangled pair tolerates only product neighbours
    for p in rank3.iter().filter(|p| p.kernel_factors.is_none()) {
        for q in [p.u, p.v] {
            for h in s.graph.half_edges(q) {
                let c = InteractionGraph::constraint(h);
                if !s.is_product(c) {
                    return Ok(unsat(UnsatWitness::EntangledNeighbor { constraint: c }));
                }
            }
        }
    }

    for p in &rank3 {
        let seeds: Vec<(usize, [FieldElement; 2])> = match &p.kernel_factors {
            Some(f) => vec![(p.u, f.a.clone()), (p.v, f.b.clone())],
            None => {
                // the neighbour must kill its own factor of the constraint
                let mut seeds = Vec::new();
                for q in [p.u, p.v] {
                    for h in s.graph.half_edges(q) {
                        let c = InteractionGraph::constraint(h);
                        let info = s.products[c].as_ref().expect("checked above");
                        let far = if InteractionGraph::forward(h) {
                            &info.b_perp
                        } else {
                            &info.a_perp
                        };
                        seeds.push((s.graph.to(h), far.clone()));
                    }
                }
                seeds
            }
        };
        for (q, x) in seeds {
            if !s.graph.is_live_qubit(q) {
                continue;
            }
            let cr = s.induce_cr(q, x);
            if !cr.is_complete() {
                let c = cr.into_conflict().expect("finished without completing");
                return Ok(unsat(UnsatWitness::Conflicts(vec![c])));
            }
            s.commit(cr, Phase::Preprocess)?;
        }
        if p.kernel_factors.is_none() {
            s.graph.remove_qubit(p.u);
            s.graph.remove_qubit(p.v);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_instance(rows: &[[i64; 4]]) -> Instance {
        let mut inst = Instance::rational(2);
        for r in rows {
            inst.add_int_constraint(0, 1, *r).unwrap();
        }
        inst
    }

    #[test]
    fn singlet_from_three_projectors() {
        let inst = pair_instance(&[[1, 0, 0, 0], [0, 0, 0, 1], [1, 1, 1, 1]]);
        let cs: Vec<&Constraint> = inst.constraints().iter().collect();
        let s = summarize_pair(0, 1, &cs);
        assert_eq!(s.rank, 3);
        assert!(s.kernel_factors.is_none());
        let k = s.kernel.unwrap();
        let singlet = [0, 1, -1, 0].map(|x| inst.int(x));
        assert!(proportional(&k, &singlet));
    }

    #[test]
    fn duplicates_collapse() {
        let inst = pair_instance(&[[1, 2, 3, 4], [2, 4, 6, 8]]);
        let cs: Vec<&Constraint> = inst.constraints().iter().collect();
        let s = summarize_pair(0, 1, &cs);
        assert_eq!((s.rank, s.kept.clone()), (1, vec![0]));
    }

    #[test]
    fn reversed_orientation() {
        let mut inst = Instance::rational(2);
        inst.add_int_constraint(1, 0, [0, 1, 0, 0]).unwrap();
        // eta on (1, 0) is |0>_1 |1>_0, i.e. |1>_0 |0>_1
        let o = oriented(inst.constraint(0), 0);
        let ones: Vec<bool> = o.iter().map(|x| !x.is_zero()).collect();
        assert_eq!(ones, vec![false, false, true, false]);
    }

    #[test]
    fn product_kernel_becomes_singles() {
        // kernel |0>|1>
        let inst = pair_instance(&[[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let p = apply_preprocessing(&inst).unwrap();
        assert!(p.unsat.is_none());
        let a = p.partial.single(0).unwrap();
        let b = p.partial.single(1).unwrap();
        assert!(a[1].is_zero() && b[0].is_zero());
    }

    #[test]
    fn full_rank_is_unsat() {
        let inst = pair_instance(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let p = apply_preprocessing(&inst).unwrap();
        assert!(matches!(
            p.unsat,
            Some(Unsat {
                witness: UnsatWitness::FullRankPair { u: 0, v: 1 },
                ..
            })
        ));
    }

    #[test]
    fn entangled_pair_with_entangled_neighbour_is_unsat() {
        let mut inst = Instance::rational(3);
        for r in [[1, 0, 0, 0], [0, 0, 0, 1], [1, 1, 1, 1]] {
            inst.add_int_constraint(0, 1, r).unwrap();
        }
        inst.add_int_constraint(1, 2, [0, 1, -1, 0]).unwrap();
        let p = apply_preprocessing(&inst).unwrap();
        assert!(matches!(
            p.unsat.unwrap().witness,
            UnsatWitness::EntangledNeighbor { constraint: 3 }
        ));
    }
}
