use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, ModelError};
use crate::fieldarith::{FieldElement, NumberField};

/// Constraint vector whose forward transfer is `[[t00, t01], [t10, t11]]`.
fn eta_for_transfer(inst: &Instance, t: [BigInt; 4]) -> [FieldElement; 4] {
    let [t00, t01, t10, t11] = t;
    [inst.int(t10), inst.int(-t00), inst.int(t11), inst.int(-t01)]
}

fn bit(x: &BigInt, k: u64) -> BigInt {
    BigInt::from(u8::from(x.bit(k)))
}

fn check_param(name: &str, x: &BigInt, n: usize) -> Result<(), ModelError> {
    if x.sign() != num_bigint::Sign::Plus || !x.bit(0) || x.bits() > n as u64 {
        return Err(ModelError::Params(format!(
            "{name} must be a positive odd integer of at most {n} bits"
        )));
    }
    Ok(())
}

/// Appends the doubling chain `q0 -> q0+1 -> ... -> q0+n` driven by the bits of
/// `x`, most significant first.
fn push_bits(inst: &mut Instance, q0: usize, n: usize, x: &BigInt) -> Result<(), ModelError> {
    for i in 1..=n {
        let b = bit(x, (n - i) as u64);
        let eta = eta_for_transfer(inst, [1.into(), 0.into(), b, 2.into()]);
        inst.add_constraint(q0 + i - 1, q0 + i, eta)?;
    }
    Ok(())
}

/// Forces qubit 0 to `|0>` given that qubit 1 follows it through the first
/// doubling step with leading bit `m`.
fn push_anchor(inst: &mut Instance, m: &BigInt) -> Result<(), ModelError> {
    let eta = [inst.int(0), inst.int(0), inst.int(m.clone()), inst.int(-1)];
    inst.add_constraint(0, 1, eta)?;
    Ok(())
}

/// Satisfiable instance on `2n + 2` qubits whose unique solution has
/// `(M, 2^n + M N)` on the last qubit.
pub fn gen_lowerbound_full(n: usize, m: &BigInt, big_n: &BigInt) -> Result<Instance, ModelError> {
    if n == 0 {
        return Err(ModelError::Params("n must be positive".into()));
    }
    check_param("M", m, n)?;
    check_param("N", big_n, n)?;
    let mut inst = Instance::rational(2 * n + 2);
    push_bits(&mut inst, 0, n, m)?;
    let swap = eta_for_transfer(&inst, [0.into(), 1.into(), 1.into(), 0.into()]);
    inst.add_constraint(n, n + 1, swap)?;
    push_bits(&mut inst, n + 1, n, big_n)?;
    push_anchor(&mut inst, &bit(m, n as u64 - 1))?;
    Ok(inst)
}

/// The first half only: qubit `n` ends in `(1, M)`.
pub fn gen_lowerbound_chain(n: usize, m: &BigInt) -> Result<Instance, ModelError> {
    if n == 0 {
        return Err(ModelError::Params("n must be positive".into()));
    }
    check_param("M", m, n)?;
    let mut inst = Instance::rational(n + 1);
    push_bits(&mut inst, 0, n, m)?;
    push_anchor(&mut inst, &bit(m, n as u64 - 1))?;
    Ok(inst)
}

/// Parameters for [`random_instance`].
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub n: usize,
    pub m: usize,
    /// Fraction of constraints drawn as product vectors.
    pub product_fraction: f64,
    /// Coefficients are drawn from `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    /// Work over `Q[i]` instead of `Q`.
    pub gaussian: bool,
    /// Make every constraint vanish on a random product state.
    pub planted: bool,
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            n: 8,
            m: 12,
            product_fraction: 0.3,
            coeff_bound: 3,
            gaussian: false,
            planted: false,
            seed: 0,
        }
    }
}

pub fn random_instance(spec: &RandomSpec) -> Result<Instance, ModelError> {
    if spec.m > 0 && spec.n < 2 {
        return Err(ModelError::Params(
            "constraints need at least two qubits".into(),
        ));
    }
    if spec.coeff_bound < 1 {
        return Err(ModelError::Params(
            "coefficient bound must be positive".into(),
        ));
    }
    let field = if spec.gaussian {
        NumberField::gaussian()
    } else {
        NumberField::rationals()
    };
    let mut inst = Instance::new(Arc::new(field), spec.n);
    let base = inst.base_level().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.coeff_bound;
    let scalar = |rng: &mut ChaCha8Rng| -> FieldElement {
        let re = rng.gen_range(-k..=k);
        if spec.gaussian {
            let im = rng.gen_range(-k..=k);
            FieldElement::from_parts(&base, 1.into(), vec![re.into(), im.into()])
                .expect("two coefficients")
        } else {
            FieldElement::from_int(&base, re)
        }
    };
    let nonzero_vec = |rng: &mut ChaCha8Rng, len: usize| -> Vec<FieldElement> {
        loop {
            let v: Vec<FieldElement> = (0..len).map(|_| scalar(rng)).collect();
            if v.iter().any(|x| !x.is_zero()) {
                return v;
            }
        }
    };
    let perp = |v: &[FieldElement]| vec![-&v[1], v[0].clone()];
    // planted states keep both amplitudes nonzero
    let plant: Vec<Vec<FieldElement>> = (0..spec.n)
        .map(|_| loop {
            let v = nonzero_vec(&mut rng, 2);
            if !spec.planted || v.iter().all(|x| !x.is_zero()) {
                return v;
            }
        })
        .collect();
    while inst.m() < spec.m {
        let u = rng.gen_range(0..spec.n);
        let mut v = rng.gen_range(0..spec.n - 1);
        if v >= u {
            v += 1;
        }
        let eta: Vec<FieldElement> = if rng.gen_bool(spec.product_fraction.clamp(0.0, 1.0)) {
            let (a, b) = if spec.planted {
                if rng.gen_bool(0.5) {
                    (perp(&plant[u]), nonzero_vec(&mut rng, 2))
                } else {
                    (nonzero_vec(&mut rng, 2), perp(&plant[v]))
                }
            } else {
                (nonzero_vec(&mut rng, 2), nonzero_vec(&mut rng, 2))
            };
            vec![&a[0] * &b[0], &a[0] * &b[1], &a[1] * &b[0], &a[1] * &b[1]]
        } else if spec.planted {
            let (pu, pv) = (&plant[u], &plant[v]);
            let e = nonzero_vec(&mut rng, 3);
            let s = &pu[1] * &pv[1];
            let r = &(&(&e[0] * &(&pu[0] * &pv[0])) + &(&e[1] * &(&pu[0] * &pv[1])))
                + &(&e[2] * &(&pu[1] * &pv[0]));
            vec![&e[0] * &s, &e[1] * &s, &e[2] * &s, -r]
        } else {
            nonzero_vec(&mut rng, 4)
        };
        inst.add_constraint(u, v, eta.try_into().expect("four coefficients"))?;
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sat_by(inst: &Instance, states: &[[BigInt; 2]]) -> bool {
        inst.constraints().iter().all(|c| {
            let a = &states[c.u];
            let b = &states[c.v];
            let e: Vec<BigInt> = c
                .eta
                .iter()
                .map(|x| x.as_rational().unwrap().to_integer())
                .collect();
            &e[0] * &a[0] * &b[0]
                + &e[1] * &a[0] * &b[1]
                + &e[2] * &a[1] * &b[0]
                + &e[3] * &a[1] * &b[1]
                == BigInt::from(0)
        })
    }

    #[test]
    fn lowerbound_states_satisfy() {
        let n = 4;
        let m = BigInt::from(11);
        let big_n = BigInt::from(13);
        let inst = gen_lowerbound_full(n, &m, &big_n).unwrap();
        assert_eq!((inst.n(), inst.m()), (2 * n + 2, 2 * n + 2));
        let mut states: Vec<[BigInt; 2]> = (0..=n).map(|i| [1.into(), &m >> (n - i)]).collect();
        let mut s = BigInt::from(1);
        states.push([m.clone(), s.clone()]);
        for i in 1..=n {
            s = 2 * s + &m * bit(&big_n, (n - i) as u64);
            states.push([m.clone(), s.clone()]);
        }
        assert_eq!(states[2 * n + 1][1], BigInt::from(16 + 11 * 13));
        assert!(sat_by(&inst, &states));
        // the anchor rules out |1> on qubit 0
        let mut bad = states.clone();
        bad[0] = [0.into(), 1.into()];
        bad[1] = [0.into(), 2.into()];
        assert!(!sat_by(&inst, &bad));
    }

    #[test]
    fn parameter_checks() {
        assert!(gen_lowerbound_chain(3, &BigInt::from(8)).is_err());
        assert!(gen_lowerbound_chain(3, &BigInt::from(17)).is_err());
        assert!(gen_lowerbound_chain(3, &BigInt::from(5)).is_ok());
    }

    #[test]
    fn planted_random_is_deterministic() {
        let spec = RandomSpec {
            planted: true,
            gaussian: true,
            ..RandomSpec::default()
        };
        let a = random_instance(&spec).unwrap();
        let b = random_instance(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), spec.m);
    }
}
