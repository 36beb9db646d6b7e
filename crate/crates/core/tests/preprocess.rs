mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use q2sat::fieldarith::FieldElement;
use q2sat::model::{Constraint, Instance};
use q2sat::oracle::brute_kernel_dim;
use q2sat::preprocess::{apply_preprocessing, oriented, summarize_pair};

/// Few qubits, constraints piled onto two pairs so that ranks 3 and 4 show
/// up often.
fn crowded(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let mut inst = Instance::rational(n);
    for _ in 0..rng.gen_range(1..=7) {
        let (u, v) = match rng.gen_range(0..5) {
            0 | 1 => (0, 1),
            2 | 3 if n > 2 => (2, 1),
            _ => {
                let u = rng.gen_range(0..n);
                (u, (u + 1 + rng.gen_range(0..n - 1)) % n)
            }
        };
        let eta = if rng.gen_bool(0.4) {
            let a = [rng.gen_range(-1..=1i64), rng.gen_range(0..=1)];
            let b = [rng.gen_range(-1..=1i64), rng.gen_range(0..=1)];
            [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
        } else {
            [0; 4].map(|_| rng.gen_range(-1..=1i64))
        };
        if eta.iter().any(|&x| x != 0) {
            inst.add_int_constraint(u, v, eta).unwrap();
        }
    }
    inst
}

/// The residual plus constraints that pin every recorded state.
fn pinned(inst: &Instance) -> Option<Instance> {
    let p = apply_preprocessing(inst).unwrap();
    if p.unsat.is_some() {
        return None;
    }
    let mut out = p.residual.clone();
    let n = inst.n();
    let zero = || inst.int(0);
    let one = || inst.int(1);
    for q in 0..n {
        if let Some(v) = p.partial.single(q) {
            // (a . psi_q) = 0 for a = perp(v), whatever the partner holds
            let a = [-v[1].clone(), v[0].clone()];
            let r = (q + 1) % n;
            for b in [[one(), zero()], [zero(), one()]] {
                let eta = [&a[0] * &b[0], &a[0] * &b[1], &a[1] * &b[0], &a[1] * &b[1]];
                out.add_constraint(q, r, eta).unwrap();
            }
        }
    }
    for ps in p.partial.pairs() {
        let k = &ps.vector;
        let piv = k.iter().position(|x| !x.is_zero()).unwrap();
        for j in (0..4).filter(|&j| j != piv) {
            let mut eta: [FieldElement; 4] = [zero(), zero(), zero(), zero()];
            eta[j] = k[piv].clone();
            eta[piv] = -k[j].clone();
            out.add_constraint(ps.i, ps.j, eta).unwrap();
        }
    }
    Some(out)
}

fn check_preserves(inst: &Instance) {
    let before = brute_kernel_dim(inst).unwrap() > 0;
    let after = match pinned(inst) {
        Some(p) => brute_kernel_dim(&p).unwrap() > 0,
        None => false,
    };
    assert_eq!(
        before,
        after,
        "preprocessing changed satisfiability of\n{}",
        inst.to_text()
    );
}

fn pair_groups(inst: &Instance) -> HashMap<(usize, usize), Vec<&Constraint>> {
    let mut g: HashMap<(usize, usize), Vec<&Constraint>> = HashMap::new();
    for c in inst.constraints() {
        g.entry((c.u.min(c.v), c.u.max(c.v))).or_default().push(c);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn preserves_satisfiability_crowded(seed in any::<u64>()) {
        check_preserves(&crowded(seed));
    }

    #[test]
    fn preserves_satisfiability_mixed(seed in any::<u64>()) {
        check_preserves(&common::small_random(seed));
    }

    #[test]
    fn pair_rank_matches_dense_kernel(seed in any::<u64>()) {
        let inst = crowded(seed);
        for ((u, v), cs) in pair_groups(&inst) {
            let s = summarize_pair(u, v, &cs);
            let mut alone = Instance::rational(inst.n());
            let mut kept = Instance::rational(inst.n());
            for c in &cs {
                alone.add_constraint(c.u, c.v, c.eta.clone()).unwrap();
                if s.kept.contains(&c.id) {
                    kept.add_constraint(c.u, c.v, c.eta.clone()).unwrap();
                }
            }
            // the pair's component is {u, v}; every other qubit adds a factor 2
            let free = 1u128 << (inst.n() - 2);
            prop_assert_eq!(brute_kernel_dim(&alone).unwrap(), (4 - s.rank as u128) * free);
            prop_assert_eq!(brute_kernel_dim(&kept).unwrap(), brute_kernel_dim(&alone).unwrap());
            if let Some(k) = &s.kernel {
                for c in &cs {
                    let row = oriented(c, u);
                    let mut acc = inst.int(0);
                    for i in 0..4 {
                        acc = &acc + &(&row[i] * &k[i]);
                    }
                    prop_assert!(acc.is_zero());
                }
            }
        }
    }

    #[test]
    fn survivors_have_at_most_two_parallel_constraints(seed in any::<u64>()) {
        let inst = crowded(seed);
        let p = apply_preprocessing(&inst).unwrap();
        if p.unsat.is_none() {
            for cs in pair_groups(&p.residual).values() {
                prop_assert!(cs.len() <= 2);
            }
        }
    }
}

#[test]
fn entangled_kernel_on_isolated_pair() {
    let mut inst = Instance::rational(2);
    for r in [[1, 0, 0, 0], [0, 0, 0, 1], [1, 1, 1, 1]] {
        inst.add_int_constraint(0, 1, r).unwrap();
    }
    let p = apply_preprocessing(&inst).unwrap();
    assert!(p.unsat.is_none());
    assert_eq!(p.residual.m(), 0);
    let pair = &p.partial.pairs()[0];
    let v = &pair.vector;
    assert!(v[0].is_zero() && v[3].is_zero());
    assert!((&v[1] + &v[2]).is_zero());
}

#[test]
fn product_kernel_forces_neighbours() {
    // kernel |0>|1> on (0, 1); (1, 2) entangled with transfer I sends |1> on
    let mut inst = Instance::rational(3);
    for r in [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]] {
        inst.add_int_constraint(0, 1, r).unwrap();
    }
    inst.add_int_constraint(1, 2, [0, -1, 1, 0]).unwrap();
    let p = apply_preprocessing(&inst).unwrap();
    assert!(p.unsat.is_none());
    let s2 = p.partial.single(2).expect("qubit 2 forced");
    assert!(s2[0].is_zero());
    assert_eq!(p.residual.m(), 0);
}

#[test]
fn crowded_corpus_reaches_high_ranks() {
    let mut seen = [0usize; 5];
    for seed in 0..500 {
        let inst = crowded(seed);
        for ((u, v), cs) in pair_groups(&inst) {
            seen[summarize_pair(u, v, &cs).rank] += 1;
        }
    }
    assert!(seen[3] >= 20 && seen[4] >= 20, "rank histogram {seen:?}");
}
