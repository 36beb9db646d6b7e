//! Outward-rounded dyadic interval arithmetic.
//!
//! Every endpoint is an integer `k` standing for `k / 2^prec`, where `prec`
//! is fixed for one evaluation. Results always enclose the exact value.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::isqrt::{isqrt_ceil, isqrt_floor};

pub(crate) fn floor_shr(a: &BigInt, k: u32) -> BigInt {
    a >> k
}

pub(crate) fn ceil_shr(a: &BigInt, k: u32) -> BigInt {
    -((-a) >> k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
}

impl Interval {
    pub fn point(k: BigInt) -> Self {
        Interval {
            lo: k.clone(),
            hi: k,
        }
    }

    pub fn zero() -> Self {
        Self::point(BigInt::zero())
    }

    pub fn from_int(k: &BigInt, prec: u32) -> Self {
        Self::point(k << prec)
    }

    /// Encloses `num / den` for `den > 0`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        debug_assert!(den.is_positive());
        let scaled = num << prec;
        Interval {
            lo: scaled.div_floor(den),
            hi: -((-&scaled).div_floor(den)),
        }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap();
        let hi = cands.iter().max().unwrap();
        Interval {
            lo: floor_shr(lo, prec),
            hi: ceil_shr(hi, prec),
        }
    }

    pub fn square(&self, prec: u32) -> Self {
        if self.contains_zero() {
            let m = self.lo.abs().max(self.hi.abs());
            Interval {
                lo: BigInt::zero(),
                hi: ceil_shr(&(&m * &m), prec),
            }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            Interval {
                lo: floor_shr(&lo, prec),
                hi: ceil_shr(&hi, prec),
            }
        }
    }

    /// Exact multiplication by an integer.
    pub fn scale(&self, k: &BigInt) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.sign() == Sign::Minus {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: &BigInt) -> Self {
        debug_assert!(k.is_positive());
        Interval {
            lo: self.lo.div_floor(k),
            hi: -((-&self.hi).div_floor(k)),
        }
    }

    /// Division by an interval that lies strictly above zero.
    pub fn div_positive(&self, o: &Self, prec: u32) -> Self {
        debug_assert!(o.lo.is_positive());
        let a = &self.lo << prec;
        let b = &self.hi << prec;
        let cands = [(&a, &o.lo), (&a, &o.hi), (&b, &o.lo), (&b, &o.hi)];
        let lo = cands.iter().map(|(x, y)| x.div_floor(y)).min().unwrap();
        let hi = cands
            .iter()
            .map(|(x, y)| -((-*x).div_floor(y)))
            .max()
            .unwrap();
        Interval { lo, hi }
    }

    /// Square root of the nonnegative part of the interval.
    ///
    /// Callers use this only when the exact value is known to be
    /// nonnegative, so clamping the lower end at zero keeps the enclosure.
    pub fn sqrt(&self, prec: u32) -> Self {
        let clamp = |x: &BigInt| {
            if x.is_negative() {
                BigInt::zero()
            } else {
                x.clone()
            }
        };
        let lo = clamp(&self.lo) << prec;
        let hi = clamp(&self.hi) << prec;
        Interval {
            lo: BigInt::from(isqrt_floor(lo.magnitude())),
            hi: BigInt::from(isqrt_ceil(hi.magnitude())),
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// Lower bound on the distance from zero.
    pub fn mag_lower(&self) -> BigInt {
        if self.contains_zero() {
            BigInt::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            -&self.hi
        }
    }

    pub fn lo_rational(&self, prec: u32) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::from(1) << prec)
    }

    pub fn hi_rational(&self, prec: u32) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::from(1) << prec)
    }
}

/// Axis-aligned box in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CBox {
    pub re: Interval,
    pub im: Interval,
}

impl CBox {
    pub fn real(re: Interval) -> Self {
        CBox {
            re,
            im: Interval::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::real(Interval::zero())
    }

    pub fn one(prec: u32) -> Self {
        Self::real(Interval::from_int(&BigInt::from(1), prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        CBox {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CBox {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn neg(&self) -> Self {
        CBox {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let re = self.re.mul(&o.re, prec).sub(&self.im.mul(&o.im, prec));
        let im = self.re.mul(&o.im, prec).add(&self.im.mul(&o.re, prec));
        CBox { re, im }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CBox {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        CBox {
            re: self.re.div_int(k),
            im: self.im.div_int(k),
        }
    }

    /// Multiplication by the imaginary unit.
    pub fn times_i(&self) -> Self {
        CBox {
            re: self.im.neg(),
            im: self.re.clone(),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Largest side length.
    pub fn width(&self) -> BigInt {
        self.re.width().max(self.im.width())
    }

    /// Lower bound on `|z|^2`, in units of `2^(-2 prec)`.
    pub fn abs2_lower(&self) -> BigInt {
        let a = self.re.mag_lower();
        let b = self.im.mag_lower();
        &a * &a + &b * &b
    }

    /// Encloses `|z|`.
    pub fn abs(&self, prec: u32) -> Interval {
        self.re.square(prec).add(&self.im.square(prec)).sqrt(prec)
    }
}
