//! Named benchmark instance families, looked up by name from `gen` and
//! `bench`.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{gen_lowerbound_full, Instance};
use crate::solver::{SolveError, SolveMetrics, SolveOptions, Solver};

pub trait InstanceFamily: Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    /// An instance with roughly `size` qubits, deterministic in `seed`.
    fn generate(&self, size: usize, seed: u64) -> Instance;
}

/// Signed permutation matrices, row-major.
const SIGNED_PERMS: [[i64; 4]; 8] = [
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [-1, 0, 0, 1],
    [-1, 0, 0, -1],
    [0, 1, 1, 0],
    [0, 1, -1, 0],
    [0, -1, 1, 0],
    [0, -1, -1, 0],
];

fn eta_of(t: [i64; 4]) -> [i64; 4] {
    [t[2], -t[0], t[3], -t[1]]
}

fn matmul(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn transpose(a: [i64; 4]) -> [i64; 4] {
    [a[0], a[2], a[1], a[3]]
}

fn add(inst: &mut Instance, u: usize, v: usize, eta: [i64; 4]) {
    inst.add_int_constraint(u, v, eta)
        .expect("family constraint");
}

/// A path whose transfers are signed permutations; solved by free choice.
struct Chain;

impl InstanceFamily for Chain {
    fn name(&self) -> &'static str {
        "chain"
    }
    fn describe(&self) -> &'static str {
        "path of entangled constraints with signed-permutation transfers"
    }
    fn generate(&self, size: usize, seed: u64) -> Instance {
        let n = size.max(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = Instance::rational(n);
        for i in 0..n - 1 {
            let t = SIGNED_PERMS[rng.gen_range(0..8)];
            add(&mut inst, i, i + 1, eta_of(t));
        }
        inst
    }
}

/// A ring whose cycle matrix is the swap, so the cycle search discretizes
/// on the eigenvectors `(1, 1)` and `(1, -1)`.
struct Cycle;

impl InstanceFamily for Cycle {
    fn name(&self) -> &'static str {
        "cycle"
    }
    fn describe(&self) -> &'static str {
        "ring of signed-permutation transfers with cycle matrix [[0,1],[1,0]]"
    }
    fn generate(&self, size: usize, seed: u64) -> Instance {
        let n = size.max(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = Instance::rational(n);
        let mut prod = [1, 0, 0, 1];
        for i in 0..n - 1 {
            let t = SIGNED_PERMS[rng.gen_range(0..8)];
            prod = matmul(t, prod);
            add(&mut inst, i, i + 1, eta_of(t));
        }
        // closing transfer S * prod^-1, and prod^-1 = prod^T
        let last = matmul([0, 1, 1, 0], transpose(prod));
        add(&mut inst, n - 1, 0, eta_of(last));
        inst
    }
}

/// Planted basis states with about two constraints per qubit: entangled
/// signed-permutation constraints consistent with the plant, and product
/// constraints that the plant satisfies on one side.
struct Random;

impl InstanceFamily for Random {
    fn name(&self) -> &'static str {
        "random"
    }
    fn describe(&self) -> &'static str {
        "planted satisfiable graph, 2n constraints, 20% product"
    }
    fn generate(&self, size: usize, seed: u64) -> Instance {
        let n = size.max(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plant: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut inst = Instance::rational(n);
        let others: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [1, -1]];
        for _ in 0..2 * n {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            if rng.gen_bool(0.2) {
                // a kills the planted basis state on its side
                let (a, b) = if rng.gen_bool(0.5) {
                    let a = if plant[u] == 0 { [0, 1] } else { [1, 0] };
                    (a, others[rng.gen_range(0..4)])
                } else {
                    let b = if plant[v] == 0 { [0, 1] } else { [1, 0] };
                    (others[rng.gen_range(0..4)], b)
                };
                add(
                    &mut inst,
                    u,
                    v,
                    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]],
                );
            } else {
                let s1 = if rng.gen_bool(0.5) { 1 } else { -1 };
                let s2 = if rng.gen_bool(0.5) { 1 } else { -1 };
                let t = if plant[u] == plant[v] {
                    [s1, 0, 0, s2]
                } else {
                    [0, s1, s2, 0]
                };
                add(&mut inst, u, v, eta_of(t));
            }
        }
        inst
    }
}

/// Product-only path. A two-constraint gadget makes the first reaction
/// seeded at qubit 0 conflict, so the reaction from qubit 1 sweeps the path.
/// Without the fast path each crossing multiplies the state by 3.
struct Classical;

impl InstanceFamily for Classical {
    fn name(&self) -> &'static str {
        "classical"
    }
    fn describe(&self) -> &'static str {
        "product-only path with small integer factors"
    }
    fn generate(&self, size: usize, seed: u64) -> Instance {
        let len = size.max(3) - 1;
        let y = len;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = Instance::rational(len + 1);
        let outer = |a: [i64; 2], b: [i64; 2]| [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
        // pairs (a, b) with a . perp(b_prev) = +-3 whatever b_prev is below
        let choices: [([i64; 2], [i64; 2]); 2] = [([1, 1], [1, -2]), ([1, -1], [1, 2])];
        let (a0, b0) = choices[0];
        add(&mut inst, 0, 1, outer(a0, b0));
        // qubit 0 seeded with perp(a0) = (-1, 1) meets alpha = (1, 0) on two
        // parallel constraints with different partners: a conflict
        add(&mut inst, 0, y, outer([1, 0], [1, 0]));
        add(&mut inst, 0, y, outer([1, 0], [0, 1]));
        let mut prev_b = b0;
        for i in 1..len - 1 {
            // perp(prev_b) is (2, 1) or (-2, 1); pick a with a . perp = +-3
            let perp = [-prev_b[1], prev_b[0]];
            let (mut a, b) = choices[rng.gen_range(0..2)];
            if (a[0] * perp[0] + a[1] * perp[1]).abs() != 3 {
                a = [a[0], -a[1]];
            }
            add(&mut inst, i, i + 1, outer(a, b));
            prev_b = b;
        }
        inst
    }
}

/// The doubling construction on `2n + 2` qubits with random odd n-bit M, N.
struct LowerBound;

impl LowerBound {
    fn params(bits: usize, seed: u64) -> (BigInt, BigInt) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || {
            let bytes: Vec<u8> = (0..bits.div_ceil(8)).map(|_| rng.gen()).collect();
            let mut x = BigUint::from_bytes_le(&bytes) % (BigUint::from(1u8) << bits);
            x.set_bit(0, true);
            x.set_bit(bits as u64 - 1, true);
            BigInt::from(x)
        };
        (pick(), pick())
    }
}

impl InstanceFamily for LowerBound {
    fn name(&self) -> &'static str {
        "lowerbound"
    }
    fn describe(&self) -> &'static str {
        "doubling chain with unique solution (M, 2^n + MN) on the last qubit"
    }
    fn generate(&self, size: usize, seed: u64) -> Instance {
        let bits = (size / 2).max(1);
        let (m, n) = LowerBound::params(bits, seed);
        gen_lowerbound_full(bits, &m, &n).expect("valid parameters")
    }
}

/// Random odd integers with exactly `bits` bits, for the doubling
/// construction.
pub fn lowerbound_params(bits: usize, seed: u64) -> (BigInt, BigInt) {
    LowerBound::params(bits, seed)
}

static FAMILIES: [&dyn InstanceFamily; 5] = [&Chain, &Cycle, &Random, &Classical, &LowerBound];

pub fn registry() -> &'static [&'static dyn InstanceFamily] {
    &FAMILIES
}

pub fn family(name: &str) -> Option<&'static dyn InstanceFamily> {
    FAMILIES.iter().copied().find(|f| f.name() == name)
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub sat: bool,
    #[serde(flatten)]
    pub metrics: SolveMetrics,
    #[serde(skip)]
    pub wall: Duration,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str =
        "family,n,m,sat,edge_traversals,field_ops,max_coeff_bits,wall_ms";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3}",
            self.family,
            self.n,
            self.m,
            self.sat,
            self.metrics.edge_traversals,
            self.metrics.field_ops,
            self.metrics.max_coeff_bits,
            self.wall.as_secs_f64() * 1e3
        )
    }
}

/// Generates one instance and solves it, timing the solve only.
pub fn bench_one(
    fam: &dyn InstanceFamily,
    size: usize,
    seed: u64,
    opts: SolveOptions,
) -> Result<BenchRow, SolveError> {
    let inst = fam.generate(size, seed);
    let t0 = Instant::now();
    let report = Solver::new(&inst, opts).run()?;
    Ok(BenchRow {
        family: fam.name().to_string(),
        n: inst.n(),
        m: inst.m(),
        sat: report.is_sat(),
        metrics: report.metrics,
        wall: t0.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_kernel_dim, verify_assignment};
    use crate::solver::solve;

    #[test]
    fn registry_lookup() {
        let names: Vec<&str> = registry().iter().map(|f| f.name()).collect();
        assert_eq!(
            names,
            vec!["chain", "cycle", "random", "classical", "lowerbound"]
        );
        assert!(family("cycle").is_some());
        assert!(family("nope").is_none());
    }

    #[test]
    fn small_members_are_sat_and_verified() {
        for f in registry() {
            for seed in 0..5 {
                let inst = f.generate(10, seed);
                if inst.n() <= 10 {
                    assert!(brute_kernel_dim(&inst).unwrap() > 0, "{}", f.name());
                }
                let r = solve(&inst).unwrap();
                assert!(r.is_sat(), "{} seed {seed}", f.name());
                verify_assignment(&inst, r.assignment().unwrap()).unwrap();
            }
        }
    }

    #[test]
    fn classical_growth_depends_on_fastpath() {
        let f = family("classical").unwrap();
        let bits = |size, fastpath| {
            let o = SolveOptions {
                fastpath,
                normalize: false,
            };
            bench_one(f, size, 1, o).unwrap().metrics.max_coeff_bits
        };
        assert_eq!(bits(50, true), bits(400, true));
        assert!(bits(400, false) > 4 * bits(50, false));
    }
}
