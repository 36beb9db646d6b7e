//! Slow, independent checks used by the tests and the `verify` command.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::fieldarith::{inner_product, FieldElement, FieldError};
use crate::model::{Assignment, Cnf, Instance};

/// Largest component the dense kernel computation accepts.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("component with {0} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")]
    TooLarge(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    let (x, y) = FieldElement::unify(a, b)?;
    x.checked_mul(&y)
}

fn add(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    let (x, y) = FieldElement::unify(a, b)?;
    x.checked_add(&y)
}

/// Connected components of the interaction graph, each sorted.
fn components(inst: &Instance) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..inst.n()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for c in inst.constraints() {
        let (a, b) = (find(&mut parent, c.u), find(&mut parent, c.v));
        parent[a] = b;
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    for q in 0..inst.n() {
        let r = find(&mut parent, q);
        groups[r].push(q);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Rank of a set of rows by exact elimination; rows are sparse `(col, val)`.
struct Basis {
    // pivot column -> row normalized to 1 at the pivot
    rows: Vec<(usize, Vec<FieldElement>)>,
    pivot_of: Vec<Option<usize>>,
}

impl Basis {
    fn new(dim: usize) -> Self {
        Basis {
            rows: Vec::new(),
            pivot_of: vec![None; dim],
        }
    }

    fn insert(&mut self, mut r: Vec<FieldElement>) -> Result<(), FieldError> {
        for col in 0..r.len() {
            if r[col].is_zero() {
                continue;
            }
            match self.pivot_of[col] {
                Some(k) => {
                    let f = r[col].clone();
                    let row = &self.rows[k].1;
                    for j in col..r.len() {
                        if !row[j].is_zero() {
                            r[j] = &r[j] - &(&f * &row[j]);
                        }
                    }
                }
                None => {
                    let inv = r[col].inv()?;
                    for x in r.iter_mut().skip(col) {
                        *x = &*x * &inv;
                    }
                    self.pivot_of[col] = Some(self.rows.len());
                    self.rows.push((col, r));
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

fn component_kernel_dim(inst: &Instance, qubits: &[usize]) -> Result<u64, OracleError> {
    let k = qubits.len();
    if k > MAX_DENSE_QUBITS {
        return Err(OracleError::TooLarge(k));
    }
    let dim = 1usize << k;
    let local = |q: usize| {
        qubits
            .iter()
            .position(|&x| x == q)
            .expect("qubit in component")
    };
    let zero = FieldElement::zero(inst.base_level());
    let mut basis = Basis::new(dim);
    for c in inst.constraints() {
        if !qubits.contains(&c.u) {
            continue;
        }
        // bit (k - 1 - i) of a basis index is the value of local qubit i
        let (bu, bv) = (k - 1 - local(c.u), k - 1 - local(c.v));
        for rest in 0..dim {
            if rest & (1 << bu) != 0 || rest & (1 << bv) != 0 {
                continue;
            }
            let mut row = vec![zero.clone(); dim];
            for (idx, e) in c.eta.iter().enumerate() {
                let (a, b) = (idx >> 1, idx & 1);
                row[rest | (a << bu) | (b << bv)] = e.clone();
            }
            basis.insert(row)?;
        }
    }
    Ok((dim - basis.rows.len()) as u64)
}

/// Dimension of the common kernel of all constraints, as a product over
/// connected components. Each component is limited to
/// [`MAX_DENSE_QUBITS`] qubits.
pub fn brute_kernel_dim(inst: &Instance) -> Result<u128, OracleError> {
    let mut total: u128 = 1;
    for comp in components(inst) {
        let d = component_kernel_dim(inst, &comp)?;
        total = total.saturating_mul(d as u128);
        if total == 0 {
            return Ok(0);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("assignment has {found} qubits, instance has {expected}")]
    QubitCount { expected: usize, found: usize },
    #[error("qubit {0} is not assigned")]
    Uncovered(usize),
    #[error("constraint {0} is violated")]
    Violated(usize),
    #[error("state of qubit {0} is not normalized")]
    NotNormalized(usize),
    #[error("state of qubit {0} is zero")]
    ZeroState(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A factor of the product state: the qubits it covers and its amplitudes,
/// indexed with the first qubit as the high bit.
fn factor(a: &Assignment, q: usize) -> Option<(Vec<usize>, Vec<FieldElement>)> {
    if let Some(v) = a.single(q) {
        return Some((vec![q], v.to_vec()));
    }
    a.pair_of(q).map(|p| (vec![p.i, p.j], p.vector.to_vec()))
}

fn tensor(
    x: &(Vec<usize>, Vec<FieldElement>),
    y: &(Vec<usize>, Vec<FieldElement>),
) -> Result<(Vec<usize>, Vec<FieldElement>), FieldError> {
    let mut qs = x.0.clone();
    qs.extend(&y.0);
    let mut amps = Vec::with_capacity(x.1.len() * y.1.len());
    for a in &x.1 {
        for b in &y.1 {
            amps.push(mul(a, b)?);
        }
    }
    Ok((qs, amps))
}

fn check_constraint(inst: &Instance, a: &Assignment, cid: usize) -> Result<bool, VerifyError> {
    let c = inst.constraint(cid);
    let fu = factor(a, c.u).ok_or(VerifyError::Uncovered(c.u))?;
    let fv = factor(a, c.v).ok_or(VerifyError::Uncovered(c.v))?;
    let joint = if fu.0.contains(&c.v) {
        fu
    } else {
        tensor(&fu, &fv)?
    };
    let k = joint.0.len();
    let pos = |q: usize| {
        k - 1
            - joint
                .0
                .iter()
                .position(|&x| x == q)
                .expect("qubit in factor")
    };
    let (bu, bv) = (pos(c.u), pos(c.v));
    // contract eta on (u, v); every remaining index must give zero
    for rest in 0..(1usize << k) {
        if rest & (1 << bu) != 0 || rest & (1 << bv) != 0 {
            continue;
        }
        let mut acc: Option<FieldElement> = None;
        for (idx, e) in c.eta.iter().enumerate() {
            let t = mul(e, &joint.1[rest | ((idx >> 1) << bu) | ((idx & 1) << bv)])?;
            acc = Some(match acc {
                None => t,
                Some(s) => add(&s, &t)?,
            });
        }
        if !acc.expect("four terms").is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact check of every constraint against the product state; with
/// `check_norms` every factor must also have unit norm.
pub fn verify_assignment_with(
    inst: &Instance,
    a: &Assignment,
    check_norms: bool,
) -> Result<(), VerifyError> {
    if a.n() != inst.n() {
        return Err(VerifyError::QubitCount {
            expected: inst.n(),
            found: a.n(),
        });
    }
    if let Some(&q) = a.uncovered().first() {
        return Err(VerifyError::Uncovered(q));
    }
    for q in 0..a.n() {
        let (qs, amps) = factor(a, q).expect("covered");
        if qs[0] != q {
            continue;
        }
        if amps.iter().all(|x| x.is_zero()) {
            return Err(VerifyError::ZeroState(q));
        }
        if check_norms && !inner_product(&amps, &amps)?.is_one() {
            return Err(VerifyError::NotNormalized(q));
        }
    }
    for c in inst.constraints() {
        if !check_constraint(inst, a, c.id)? {
            return Err(VerifyError::Violated(c.id));
        }
    }
    Ok(())
}

pub fn verify_assignment(inst: &Instance, a: &Assignment) -> Result<(), VerifyError> {
    verify_assignment_with(inst, a, true)
}

/// Classical 2-SAT through strongly connected components of the
/// implication graph. Clauses may repeat a variable.
pub fn classical_2sat_reference(cnf: &Cnf) -> bool {
    let n = cnf.num_vars;
    let node = |l: i64| -> usize {
        let v = (l.unsigned_abs() - 1) as usize;
        2 * v + usize::from(l < 0)
    };
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(2 * n, 2 * cnf.clauses.len());
    let ids: Vec<_> = (0..2 * n).map(|_| g.add_node(())).collect();
    for &[a, b] in &cnf.clauses {
        // not a -> b, not b -> a
        g.add_edge(ids[node(-a)], ids[node(b)], ());
        g.add_edge(ids[node(-b)], ids[node(a)], ());
    }
    let mut comp = vec![0usize; 2 * n];
    for (k, scc) in tarjan_scc(&g).into_iter().enumerate() {
        for x in scc {
            comp[x.index()] = k;
        }
    }
    (0..n).all(|v| comp[2 * v] != comp[2 * v + 1])
}

/// Exhaustive truth-table check, for small formulas only.
pub fn exhaustive_2sat(cnf: &Cnf) -> bool {
    assert!(cnf.num_vars <= 24, "too many variables for enumeration");
    (0u64..1 << cnf.num_vars).any(|bits| {
        let x: Vec<bool> = (0..cnf.num_vars).map(|i| bits >> i & 1 == 1).collect();
        cnf.evaluate(&x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::embed_cnf;

    fn pair_instance(rows: &[[i64; 4]]) -> Instance {
        let mut inst = Instance::rational(2);
        for r in rows {
            inst.add_int_constraint(0, 1, *r).unwrap();
        }
        inst
    }

    #[test]
    fn kernel_dims() {
        assert_eq!(brute_kernel_dim(&Instance::rational(2)).unwrap(), 4);
        let full = pair_instance(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(brute_kernel_dim(&full).unwrap(), 0);
        let singlet = pair_instance(&[[1, 0, 0, 0], [0, 0, 0, 1], [1, 1, 1, 1]]);
        assert_eq!(brute_kernel_dim(&singlet).unwrap(), 1);
    }

    #[test]
    fn verify_examples() {
        let inst = pair_instance(&[[1, 0, 0, 0]]);
        let b = inst.base_level().clone();
        let e = |x: i64, y: i64| [FieldElement::from_int(&b, x), FieldElement::from_int(&b, y)];
        let mut a = Assignment::new(2);
        a.set_single(0, e(0, 1)).unwrap();
        a.set_single(1, e(1, 0)).unwrap();
        assert_eq!(verify_assignment(&inst, &a), Ok(()));
        let mut a = Assignment::new(2);
        a.set_single(0, e(1, 0)).unwrap();
        a.set_single(1, e(1, 0)).unwrap();
        assert_eq!(verify_assignment(&inst, &a), Err(VerifyError::Violated(0)));
        let singlet = pair_instance(&[[1, 0, 0, 0], [0, 0, 0, 1], [1, 1, 1, 1]]);
        let mut a = Assignment::new(2);
        let k = [0, 1, -1, 0].map(|x| FieldElement::from_int(&b, x));
        a.set_pair(0, 1, k).unwrap();
        assert_eq!(verify_assignment_with(&singlet, &a, false), Ok(()));
        assert_eq!(
            verify_assignment(&singlet, &a),
            Err(VerifyError::NotNormalized(0))
        );
    }

    #[test]
    fn classical_examples() {
        let mut f = Cnf::new(2);
        f.push(1, 2);
        assert!(classical_2sat_reference(&f));
        let mut g = Cnf::new(1);
        g.push(1, 1);
        g.push(-1, -1);
        assert!(!classical_2sat_reference(&g));
        assert!(!exhaustive_2sat(&g));
    }

    #[test]
    fn embedding_preserves_satisfiability() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=5);
            let mut f = Cnf::new(n);
            for _ in 0..rng.gen_range(0..=8) {
                let a = rng.gen_range(1..=n as i64);
                let mut b = rng.gen_range(1..=n as i64 - 1);
                if b >= a {
                    b += 1;
                }
                let sa = if rng.gen_bool(0.5) { 1 } else { -1 };
                let sb = if rng.gen_bool(0.5) { 1 } else { -1 };
                f.push(sa * a, sb * b);
            }
            let inst = embed_cnf(&f).unwrap();
            let sat = brute_kernel_dim(&inst).unwrap() > 0;
            assert_eq!(sat, classical_2sat_reference(&f));
            assert_eq!(sat, exhaustive_2sat(&f));
        }
    }
}
