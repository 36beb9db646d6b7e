mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use q2sat::model::{
    embed_cnf, gen_lowerbound_chain, gen_lowerbound_full, Assignment, Cnf, Instance,
};
use q2sat::oracle::verify_assignment;
use q2sat::solver::solve;
use q2sat::transfer::{compose, transfer_of, TransferMatrix};

fn walk(inst: &Instance, ids: std::ops::Range<usize>) -> TransferMatrix {
    let ts: Vec<TransferMatrix> = ids.map(|c| transfer_of(inst.constraint(c), true)).collect();
    compose(ts.iter(), inst.base_level())
}

fn assert_matrix(inst: &Instance, got: &TransferMatrix, want: [BigInt; 4]) {
    for (g, w) in got.t.iter().zip(want) {
        assert!(g.fe_eq(&inst.int(w)));
    }
}

fn odd(bits: usize, x: u64) -> BigInt {
    let mask = if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    };
    BigInt::from((x & mask) | 1 | (1u64 << (bits - 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn doubling_walk_is_m_and_power(bits in 1usize..=40, x in any::<u64>()) {
        let m = odd(bits, x);
        let inst = gen_lowerbound_chain(bits, &m).unwrap();
        prop_assert_eq!(inst.n(), bits + 1);
        prop_assert_eq!(inst.m(), bits + 1);
        let w = walk(&inst, 0..bits);
        assert_matrix(&inst, &w, [1.into(), 0.into(), m, BigInt::from(1) << bits]);
    }

    #[test]
    fn full_walk_first_column(bits in 1usize..=30, x in any::<u64>(), y in any::<u64>()) {
        let (m, n) = (odd(bits, x), odd(bits, y));
        let inst = gen_lowerbound_full(bits, &m, &n).unwrap();
        prop_assert_eq!((inst.n(), inst.m()), (2 * bits + 2, 2 * bits + 2));
        let w = walk(&inst, 0..2 * bits + 1);
        let p = BigInt::from(1) << bits;
        let col = [&m, &(&p + &m * &n)];
        prop_assert!(w.t[0].fe_eq(&inst.int(col[0].clone())));
        prop_assert!(w.t[2].fe_eq(&inst.int(col[1].clone())));
    }

    #[test]
    fn instance_text_round_trip(seed in any::<u64>()) {
        let inst = common::small_random(seed);
        let text = inst.to_text();
        let back = Instance::parse(&text).unwrap();
        prop_assert!(back == inst);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn assignment_text_round_trip(seed in any::<u64>()) {
        let inst = common::small_random(seed);
        let r = solve(&inst).unwrap();
        let text = match r.assignment() {
            Some(a) => a.to_text(),
            None => "UNSAT\n".to_string(),
        };
        let back = Assignment::parse(&text, inst.field(), inst.n()).unwrap();
        match back {
            Some(a) => {
                verify_assignment(&inst, &a).unwrap();
                prop_assert_eq!(a.to_text(), text);
            }
            None => prop_assert!(!r.is_sat()),
        }
    }
}

#[test]
fn lowerbound_rejects_bad_parameters() {
    assert!(gen_lowerbound_full(4, &BigInt::from(12), &BigInt::from(13)).is_err());
    assert!(gen_lowerbound_full(4, &BigInt::from(33), &BigInt::from(13)).is_err());
    assert!(gen_lowerbound_chain(4, &BigInt::from(-3)).is_err());
    assert!(gen_lowerbound_chain(0, &BigInt::from(1)).is_err());
}

#[test]
fn lowerbound_full_example_counts() {
    let inst = gen_lowerbound_full(4, &BigInt::from(11), &BigInt::from(13)).unwrap();
    assert_eq!((inst.n(), inst.m()), (10, 10));
}

#[test]
fn dimacs_round_trip_and_embedding() {
    let text = "c sample\np cnf 4 3\n1 -2 0\n2 3 0\n-3 -4 0\n";
    let f = Cnf::parse_dimacs(text).unwrap();
    assert_eq!(f.clauses.len(), 3);
    assert_eq!(
        Cnf::parse_dimacs(&f.to_dimacs()).unwrap().clauses,
        f.clauses
    );
    let inst = embed_cnf(&f).unwrap();
    assert_eq!((inst.n(), inst.m()), (4, 3));
    // x1 or not x2 forbids x1 = 0, x2 = 1
    let c = inst.constraint(0);
    let nz: Vec<bool> = c.eta.iter().map(|x| !x.is_zero()).collect();
    assert_eq!(nz, vec![false, true, false, false]);
}

#[test]
fn dimacs_rejects_long_and_unit_clauses() {
    assert!(Cnf::parse_dimacs("p cnf 3 1\n1 2 3 0\n").is_err());
    let mut f = Cnf::new(2);
    f.push(1, 1);
    assert!(embed_cnf(&f).is_err());
}

#[test]
fn parse_errors_carry_positions() {
    let err =
        Instance::parse("q2sat 1\nfield poly 0 1\nqubits 2\nconstraint 0 5 1:1 1:0 1:0 1:0\n")
            .unwrap_err();
    assert!(err.to_string().contains("line 4"), "{err}");
    assert!(
        Instance::parse("q2sat 1\nfield poly 0 1\nqubits 2\nconstraint 0 0 1:1 1:0 1:0 1:0\n")
            .is_err()
    );
    assert!(
        Instance::parse("q2sat 1\nfield poly 0 1\nqubits 2\nconstraint 0 1 1:0 1:0 1:0 1:0\n")
            .is_err()
    );
}
