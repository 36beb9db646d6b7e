//! Transfer matrices, proportionality tests, product factorization and
//! eigenvectors of 2x2 matrices over the tower.

use std::sync::Arc;

use crate::fieldarith::{adjoin_sqrt, FieldElement, FieldError, TowerLevel};
use crate::model::Constraint;

/// A 2x2 matrix, row-major: `[t00, t01, t10, t11]`.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub t: [FieldElement; 4],
}

impl TransferMatrix {
    pub fn identity(level: &Arc<TowerLevel>) -> Self {
        let (z, o) = (FieldElement::zero(level), FieldElement::one(level));
        TransferMatrix {
            t: [o.clone(), z.clone(), z, o],
        }
    }

    /// `self * o`, so `o` acts first.
    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.t;
        let [e, f, g, h] = &o.t;
        TransferMatrix {
            t: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h],
        }
    }

    pub fn apply(&self, v: &[FieldElement; 2]) -> [FieldElement; 2] {
        let [a, b, c, d] = &self.t;
        [a * &v[0] + b * &v[1], c * &v[0] + d * &v[1]]
    }

    pub fn det(&self) -> FieldElement {
        let [a, b, c, d] = &self.t;
        a * d - b * c
    }

    pub fn trace(&self) -> FieldElement {
        &self.t[0] + &self.t[3]
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().all(|x| x.is_zero())
    }

    /// Whether the matrix is a (possibly zero) multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.t[1].is_zero() && self.t[2].is_zero() && self.t[0].fe_eq(&self.t[3])
    }

    /// The constraint vector whose forward transfer this is.
    pub fn to_constraint(&self) -> [FieldElement; 4] {
        let [t00, t01, t10, t11] = &self.t;
        [t10.clone(), -t00, t11.clone(), -t01]
    }
}

/// Transfer of `c` from `u` to `v` when `forward`, else from `v` to `u`.
/// A product state satisfies `c` iff the far state is proportional (or zero
/// multiple) to the transfer of the near one.
pub fn transfer_of(c: &Constraint, forward: bool) -> TransferMatrix {
    let [e00, e01, e10, e11] = &c.eta;
    let t = if forward {
        [-e01, -e11, e00.clone(), e10.clone()]
    } else {
        [-e10, -e11, e00.clone(), e01.clone()]
    };
    TransferMatrix { t }
}

/// Product of the transfers along a walk, first step applied first.
pub fn compose<'a>(
    walk: impl IntoIterator<Item = &'a TransferMatrix>,
    level: &Arc<TowerLevel>,
) -> TransferMatrix {
    walk.into_iter()
        .fold(TransferMatrix::identity(level), |acc, t| t.mul(&acc))
}

/// Both nonzero and equal up to a nonzero scalar.
pub fn proportional(a: &[FieldElement], b: &[FieldElement]) -> bool {
    assert_eq!(a.len(), b.len());
    let Some(p) = a.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if b[p].is_zero() {
        return false;
    }
    (0..a.len()).all(|i| i == p || (&a[i] * &b[p]).fe_eq(&(&a[p] * &b[i])))
}

/// `a = c b` for some scalar `c`, zero allowed.
pub fn proportional_star(a: &[FieldElement], b: &[FieldElement]) -> bool {
    a.iter().all(|x| x.is_zero()) || proportional(a, b)
}

/// `(-v1, v0)`, the vector killed by the bilinear pairing with `v`.
pub fn perp(v: &[FieldElement; 2]) -> [FieldElement; 2] {
    [-&v[1], v[0].clone()]
}

/// Bilinear pairing `a0 b0 + a1 b1` (no conjugation).
pub fn dot(a: &[FieldElement; 2], b: &[FieldElement; 2]) -> FieldElement {
    &a[0] * &b[0] + &a[1] * &b[1]
}

/// Factors `eta = a (x) b` when it has rank one as a 2x2 matrix.
#[derive(Clone, Debug)]
pub struct ProductFactors {
    pub a: [FieldElement; 2],
    pub b: [FieldElement; 2],
}

pub fn product_factors(eta: &[FieldElement; 4]) -> Option<ProductFactors> {
    let [e00, e01, e10, e11] = eta;
    if !(e00 * e11).fe_eq(&(e01 * e10)) {
        return None;
    }
    let col = if e00.is_zero() && e10.is_zero() { 1 } else { 0 };
    let row = if e00.is_zero() && e01.is_zero() { 2 } else { 0 };
    Some(ProductFactors {
        a: [eta[col].clone(), eta[2 + col].clone()],
        b: [eta[row].clone(), eta[row + 1].clone()],
    })
}

#[derive(Clone, Debug)]
pub enum Eigen {
    /// The matrix is a multiple of the identity: every vector is an
    /// eigenvector.
    Degenerate,
    /// One or two eigenvectors with their eigenvalues, all at `level`.
    Vectors {
        level: Arc<TowerLevel>,
        pairs: Vec<([FieldElement; 2], FieldElement)>,
    },
}

/// Eigenvectors of `m`, adjoining the square root of the discriminant when
/// it is not already a square.
pub fn eigenvectors(m: &TransferMatrix) -> Result<Eigen, FieldError> {
    if m.is_scalar() {
        return Ok(Eigen::Degenerate);
    }
    let level = m.t.iter().fold(m.t[0].level().clone(), |l, x| {
        TowerLevel::common(&l, x.level()).unwrap_or(l)
    });
    let [a, b, c, d] = &m.t;
    let tr = a + d;
    let disc = &tr * &tr - m.det().scale_int(&4.into());
    let half = FieldElement::from_int(&level, 2).inv()?;
    if disc.is_zero() {
        let v = if !b.is_zero() {
            [b.scale_int(&2.into()), d - a]
        } else {
            [a - d, c.scale_int(&2.into())]
        };
        let lam = &tr * &half;
        return Ok(Eigen::Vectors {
            level: level.clone(),
            pairs: vec![(v, lam)],
        });
    }
    if b.is_zero() && c.is_zero() {
        let z = FieldElement::zero(&level);
        let o = FieldElement::one(&level);
        return Ok(Eigen::Vectors {
            level: level.clone(),
            pairs: vec![([o.clone(), z.clone()], a.clone()), ([z, o], d.clone())],
        });
    }
    let s = adjoin_sqrt(&level, &disc)?;
    let lift = |x: &FieldElement| x.lift_to(&s.level);
    let (a, b, c, d, tr, half) = (
        lift(a)?,
        lift(b)?,
        lift(c)?,
        lift(d)?,
        lift(&tr)?,
        lift(&half)?,
    );
    let r = &s.root;
    let mut pairs = Vec::with_capacity(2);
    for r in [r.clone(), -r] {
        let v = if !b.is_zero() {
            [b.scale_int(&2.into()), &d - &a + &r]
        } else {
            [&a - &d + &r, c.scale_int(&2.into())]
        };
        pairs.push((v, (&tr + &r) * &half));
    }
    Ok(Eigen::Vectors {
        level: s.level,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldarith::NumberField;
    use crate::model::Instance;
    use proptest::prelude::*;

    fn mat(level: &Arc<TowerLevel>, t: [i64; 4]) -> TransferMatrix {
        TransferMatrix {
            t: t.map(|k| FieldElement::from_int(level, k)),
        }
    }

    fn rational_base() -> Arc<TowerLevel> {
        TowerLevel::base(Arc::new(NumberField::rationals()))
    }

    fn check_eigen(m: &TransferMatrix) {
        match eigenvectors(m).unwrap() {
            Eigen::Degenerate => assert!(m.is_scalar()),
            Eigen::Vectors { pairs, .. } => {
                for (v, lam) in pairs {
                    assert!(!(v[0].is_zero() && v[1].is_zero()));
                    let mv = m.apply(&v);
                    assert!(mv[0].fe_eq(&(&lam * &v[0])));
                    assert!(mv[1].fe_eq(&(&lam * &v[1])));
                }
            }
        }
    }

    #[test]
    fn eigen_examples() {
        let l = rational_base();
        // irrational spectrum, Jordan block, diagonal, swap, scalar
        for t in [
            [1, 1, 1, 0],
            [2, 1, 0, 2],
            [3, 0, 0, 5],
            [0, 1, 1, 0],
            [4, 0, 0, 4],
            [0, 1, -1, 0],
        ] {
            check_eigen(&mat(&l, t));
        }
        let Eigen::Vectors { level, pairs } = eigenvectors(&mat(&l, [0, 1, -1, 0])).unwrap() else {
            panic!()
        };
        assert_eq!(level.depth(), 1);
        assert_eq!(pairs.len(), 2);
        assert!(matches!(
            eigenvectors(&mat(&l, [4, 0, 0, 4])).unwrap(),
            Eigen::Degenerate
        ));
    }

    #[test]
    fn transfer_round_trip_and_satisfaction() {
        let mut inst = Instance::rational(2);
        inst.add_int_constraint(0, 1, [1, 2, -3, 5]).unwrap();
        let c = inst.constraint(0).clone();
        let t = transfer_of(&c, true);
        let back = t.to_constraint();
        assert!(back.iter().zip(&c.eta).all(|(x, y)| x.fe_eq(y)));
        let psi = [inst.int(4), inst.int(-7)];
        let phi = t.apply(&psi);
        let [e00, e01, e10, e11] = &c.eta;
        let val = e00 * &psi[0] * &phi[0]
            + e01 * &psi[0] * &phi[1]
            + e10 * &psi[1] * &phi[0]
            + e11 * &psi[1] * &phi[1];
        assert!(val.is_zero());
        let rev = transfer_of(&c, false);
        let chi = rev.apply(&phi);
        let val = e00 * &chi[0] * &phi[0]
            + e01 * &chi[0] * &phi[1]
            + e10 * &chi[1] * &phi[0]
            + e11 * &chi[1] * &phi[1];
        assert!(val.is_zero());
    }

    #[test]
    fn product_transfer_is_rank_one() {
        let l = rational_base();
        let a = [
            FieldElement::from_int(&l, 2),
            FieldElement::from_int(&l, -1),
        ];
        let b = [FieldElement::from_int(&l, 0), FieldElement::from_int(&l, 3)];
        let eta = [&a[0] * &b[0], &a[0] * &b[1], &a[1] * &b[0], &a[1] * &b[1]];
        let f = product_factors(&eta).unwrap();
        assert!(proportional(&f.a, &a));
        assert!(proportional(&f.b, &b));
        let mut inst = Instance::rational(2);
        inst.add_constraint(0, 1, eta).unwrap();
        let t = transfer_of(inst.constraint(0), true);
        let psi = [FieldElement::from_int(&l, 5), FieldElement::from_int(&l, 1)];
        let out = t.apply(&psi);
        let expect = perp(&f.b).map(|x| &x * &dot(&f.a, &psi));
        assert!(proportional(&out, &expect));
        assert!(product_factors(&[
            FieldElement::from_int(&l, 1),
            FieldElement::from_int(&l, 0),
            FieldElement::from_int(&l, 0),
            FieldElement::from_int(&l, 1)
        ])
        .is_none());
    }

    #[test]
    fn proportionality() {
        let l = rational_base();
        let v = |x: i64, y: i64| [FieldElement::from_int(&l, x), FieldElement::from_int(&l, y)];
        assert!(proportional(&v(1, 2), &v(-2, -4)));
        assert!(!proportional(&v(1, 2), &v(2, 3)));
        assert!(!proportional(&v(0, 0), &v(0, 0)));
        assert!(proportional_star(&v(0, 0), &v(1, 0)));
        assert!(!proportional_star(&v(1, 0), &v(0, 0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn eigen_residual_vanishes(t in proptest::array::uniform4(-6i64..=6)) {
            check_eigen(&mat(&rational_base(), t));
        }

        #[test]
        fn eigen_residual_over_gaussian(t in proptest::array::uniform8(-4i64..=4)) {
            let l = TowerLevel::base(Arc::new(NumberField::gaussian()));
            let e = |k: usize| FieldElement::from_parts(&l, 1.into(), vec![t[2 * k].into(), t[2 * k + 1].into()]).unwrap();
            check_eigen(&TransferMatrix { t: [e(0), e(1), e(2), e(3)] });
        }
    }
}
