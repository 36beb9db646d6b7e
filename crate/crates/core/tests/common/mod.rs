#![allow(dead_code)]

use q2sat::fieldarith::FieldElement;
use q2sat::model::{random_instance, Instance, RandomSpec};
use q2sat::oracle::{brute_kernel_dim, verify_assignment};
use q2sat::solver::{solve, SolveReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random instance in the style of the oracle-equivalence corpus:
/// n <= 5, m <= 8, mixed product and entangled constraints, over Q or Q[i].
pub fn small_random(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(2..=5);
    let spec = RandomSpec {
        n,
        m: rng.gen_range(0..=8),
        product_fraction: [0.0, 0.3, 0.6, 1.0][rng.gen_range(0..4)],
        coeff_bound: rng.gen_range(1..=2),
        gaussian: rng.gen_bool(0.3),
        planted: rng.gen_bool(0.5),
        seed,
    };
    random_instance(&spec).expect("valid spec")
}

/// Solves and checks the decision against the dense kernel and, on SAT, the
/// assignment against every constraint.
pub fn solve_checked(inst: &Instance) -> SolveReport {
    let report = solve(inst).expect("solver error");
    let dim = brute_kernel_dim(inst).expect("small instance");
    assert_eq!(
        report.is_sat(),
        dim > 0,
        "decision disagrees with oracle on\n{}",
        inst.to_text()
    );
    if let Some(a) = report.assignment() {
        verify_assignment(inst, a).unwrap_or_else(|e| panic!("{e} on\n{}", inst.to_text()));
    }
    report
}

pub fn ints(inst: &Instance, xs: &[i64]) -> Vec<FieldElement> {
    xs.iter().map(|&x| inst.int(x)).collect()
}

pub fn vec2(inst: &Instance, x: i64, y: i64) -> [FieldElement; 2] {
    [inst.int(x), inst.int(y)]
}
