//! Towers of possibly redundant quadratic extensions `F[r_0][r_1]...` and
//! the numerator-level algorithms that run on them.
//!
//! A numerator at depth `k` is a flat vector of `d * 2^k` integers. Index
//! `mask * d + e` holds the coefficient of `w^e * prod_{j in mask} r_j`, so
//! the lower half of a vector is the part free of the top radical and the
//! upper half is its cofactor. Radicands are stored with denominator one.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::counter;
use super::field::{Conjugation, NumberField};
use super::interval::{CBox, Interval};
use super::FieldError;

/// Largest tower the solver is allowed to build.
pub const MAX_TOWER_DEPTH: usize = 3;

const START_PREC: u32 = 64;
const MAX_PREC: u32 = 1 << 22;

/// Which complex square root a radical denotes, certified when the radical
/// is adjoined. All choices agree with the principal branch, argument in
/// `(-pi/2, pi/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootKind {
    /// Radicand is a positive real; the root is its positive square root.
    PositiveReal,
    /// Radicand is a negative real; the root lies on the positive imaginary axis.
    NegativeReal,
    /// Radicand is zero.
    Zero,
    /// Radicand has positive imaginary part.
    UpperHalf,
    /// Radicand has negative imaginary part.
    LowerHalf,
    /// Radicand has positive real part; realness not decided.
    RightHalf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Radical {
    pub(crate) radicand: Vec<BigInt>,
    pub(crate) kind: RootKind,
}

/// Radical `index` is the conjugation partner of a non-real radical `j`:
/// its radicand equals `scale^2 * g_j * conj(g_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Partner {
    pub(crate) index: usize,
    pub(crate) scale: BigRational,
}

/// Numerator vector with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Raw {
    pub(crate) den: BigInt,
    pub(crate) num: Vec<BigInt>,
}

pub(crate) fn all_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale_vec(a: &[BigInt], k: &BigInt) -> Vec<BigInt> {
    if k.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x * k).collect()
}

pub(crate) fn pad(v: &[BigInt], width: usize) -> Vec<BigInt> {
    let mut out = v.to_vec();
    out.resize(width, BigInt::zero());
    out
}

impl Raw {
    pub(crate) fn zero(width: usize) -> Self {
        Raw {
            den: BigInt::one(),
            num: vec![BigInt::zero(); width],
        }
    }

    pub(crate) fn one(width: usize) -> Self {
        let mut r = Self::zero(width);
        r.num[0] = BigInt::one();
        r
    }

    pub(crate) fn add(&self, o: &Raw) -> Raw {
        counter::bump();
        let mut r = if self.den == o.den {
            Raw {
                den: self.den.clone(),
                num: add_vec(&self.num, &o.num),
            }
        } else {
            Raw {
                den: &self.den * &o.den,
                num: self
                    .num
                    .iter()
                    .zip(&o.num)
                    .map(|(x, y)| x * &o.den + y * &self.den)
                    .collect(),
            }
        };
        r.maybe_reduce();
        r
    }

    pub(crate) fn neg(&self) -> Raw {
        Raw {
            den: self.den.clone(),
            num: self.num.iter().map(|x| -x).collect(),
        }
    }

    pub(crate) fn sub(&self, o: &Raw) -> Raw {
        self.add(&o.neg())
    }

    pub(crate) fn scale_int(&self, k: &BigInt) -> Raw {
        counter::bump();
        Raw {
            den: self.den.clone(),
            num: scale_vec(&self.num, k),
        }
    }

    pub(crate) fn lift(&self, width: usize) -> Raw {
        Raw {
            den: self.den.clone(),
            num: pad(&self.num, width),
        }
    }

    /// Divides out the common gcd once the denominator grows past the
    /// configured threshold.
    pub(crate) fn maybe_reduce(&mut self) {
        if self.den.bits() <= counter::reduce_threshold() {
            return;
        }
        self.reduce();
    }

    pub(crate) fn reduce(&mut self) {
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if g.is_one() {
            return;
        }
        self.den /= &g;
        for c in &mut self.num {
            *c /= &g;
        }
    }

    pub(crate) fn max_bits(&self) -> u64 {
        self.num
            .iter()
            .map(|c| c.bits())
            .max()
            .unwrap_or(0)
            .max(self.den.bits())
    }
}

/// One level of a tower: the base field with an ordered list of adjoined
/// square roots.
pub struct TowerLevel {
    field: Arc<NumberField>,
    parent: Option<Arc<TowerLevel>>,
    radicals: Vec<Radical>,
    partners: Vec<Option<Partner>>,
    conj_images: OnceLock<Vec<Option<Raw>>>,
}

impl fmt::Debug for TowerLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TowerLevel")
            .field("field", &self.field.to_string())
            .field("radicals", &self.radicals)
            .finish()
    }
}

impl TowerLevel {
    pub fn base(field: Arc<NumberField>) -> Arc<Self> {
        Arc::new(TowerLevel {
            field,
            parent: None,
            radicals: Vec::new(),
            partners: Vec::new(),
            conj_images: OnceLock::new(),
        })
    }

    /// Adds one radical with a known branch. No depth limit is applied here.
    pub(crate) fn extend(
        self: &Arc<Self>,
        radicand: Vec<BigInt>,
        kind: RootKind,
        partner_of: Option<(usize, BigRational)>,
    ) -> Arc<Self> {
        debug_assert_eq!(radicand.len(), self.width(self.depth()));
        let mut radicals = self.radicals.clone();
        radicals.push(Radical { radicand, kind });
        let mut partners = self.partners.clone();
        partners.push(None);
        if let Some((j, scale)) = partner_of {
            partners[j] = Some(Partner {
                index: radicals.len() - 1,
                scale,
            });
        }
        Arc::new(TowerLevel {
            field: self.field.clone(),
            parent: Some(self.clone()),
            radicals,
            partners,
            conj_images: OnceLock::new(),
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn depth(&self) -> usize {
        self.radicals.len()
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub(crate) fn width(&self, k: usize) -> usize {
        self.degree() << k
    }

    pub fn kind(&self, j: usize) -> RootKind {
        self.radicals[j].kind
    }

    pub(crate) fn radicand_num(&self, j: usize) -> &[BigInt] {
        &self.radicals[j].radicand
    }

    pub(crate) fn partner(&self, j: usize) -> Option<&Partner> {
        self.partners[j].as_ref()
    }

    pub fn prefix(self: &Arc<Self>, k: usize) -> Arc<Self> {
        assert!(k <= self.depth());
        let mut cur = self.clone();
        while cur.depth() > k {
            cur = cur.parent.clone().expect("parent of nonempty level");
        }
        cur
    }

    /// Structural identity: same field and the same radicals with the same
    /// branches and partners.
    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b)
            || ((Arc::ptr_eq(&a.field, &b.field) || a.field == b.field)
                && a.radicals == b.radicals
                && a.partners == b.partners)
    }

    pub fn is_prefix_of(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        a.depth() <= b.depth() && Self::same(a, &b.prefix(a.depth()))
    }

    /// The deeper of two levels when one is a prefix of the other.
    pub fn common(a: &Arc<Self>, b: &Arc<Self>) -> Option<Arc<Self>> {
        if Arc::ptr_eq(a, b) {
            Some(a.clone())
        } else if Self::is_prefix_of(a, b) {
            Some(b.clone())
        } else if Self::is_prefix_of(b, a) {
            Some(a.clone())
        } else {
            None
        }
    }

    /// A level containing both towers: the common prefix, then the rest of
    /// `a`, then the rest of `b`. Returns the merged level and the index
    /// map for the radicals of `b`.
    pub(crate) fn merge(a: &Arc<Self>, b: &Arc<Self>) -> Option<(Arc<Self>, Vec<usize>)> {
        if !(Arc::ptr_eq(&a.field, &b.field) || a.field == b.field) {
            return None;
        }
        let lim = a.depth().min(b.depth());
        let mut c = 0;
        while c < lim && Self::same(&a.prefix(c + 1), &b.prefix(c + 1)) {
            c += 1;
        }
        let mut merged = a.clone();
        let mut map: Vec<usize> = (0..c).collect();
        for j in c..b.depth() {
            let g = b.embed_num(b.radicand_num(j), j, &map, merged.depth());
            let partner_of = (0..j).find_map(|i| {
                b.partner(i)
                    .filter(|p| p.index == j && merged.partner(map[i]).is_none())
                    .map(|p| (map[i], p.scale.clone()))
            });
            merged = merged.extend(g, b.kind(j), partner_of);
            map.push(merged.depth() - 1);
        }
        Some((merged, map))
    }

    /// Re-indexes a numerator of depth `k` into a level of depth `dst_depth`
    /// by sending radical `j` to radical `map[j]`.
    pub(crate) fn embed_num(
        &self,
        x: &[BigInt],
        k: usize,
        map: &[usize],
        dst_depth: usize,
    ) -> Vec<BigInt> {
        let d = self.degree();
        let mut out = vec![BigInt::zero(); d << dst_depth];
        for (idx, c) in x.iter().enumerate().take(d << k) {
            if c.is_zero() {
                continue;
            }
            let (mask, e) = (idx / d, idx % d);
            let mut nm = 0usize;
            for (j, &m) in map.iter().enumerate().take(k) {
                if mask >> j & 1 == 1 {
                    nm |= 1 << m;
                }
            }
            out[nm * d + e] = c.clone();
        }
        out
    }

    fn base_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree();
        if d == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let p = self.field.poly();
        for t in (d..2 * d - 1).rev() {
            let c = std::mem::take(&mut prod[t]);
            if c.is_zero() {
                continue;
            }
            for (i, pi) in p.iter().enumerate().take(d) {
                if !pi.is_zero() {
                    prod[t - d + i] -= &c * pi;
                }
            }
        }
        prod.truncate(d);
        prod
    }

    /// Product of two numerators of depth `k`.
    pub(crate) fn mul_num(&self, k: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if k == 0 {
            return self.base_mul(a, b);
        }
        let h = a.len() / 2;
        let (a0, a1) = a.split_at(h);
        let (b0, b1) = b.split_at(h);
        let za = all_zero(a1);
        let zb = all_zero(b1);
        let (lo, hi) = if za && zb {
            (self.mul_num(k - 1, a0, b0), vec![BigInt::zero(); h])
        } else if za {
            (self.mul_num(k - 1, a0, b0), self.mul_num(k - 1, a0, b1))
        } else if zb {
            (self.mul_num(k - 1, a0, b0), self.mul_num(k - 1, a1, b0))
        } else {
            let p0 = self.mul_num(k - 1, a0, b0);
            let p1 = self.mul_num(k - 1, a1, b1);
            let pm = self.mul_num(k - 1, &add_vec(a0, a1), &add_vec(b0, b1));
            let g = self.radicand_num(k - 1);
            let lo = add_vec(&p0, &self.mul_num(k - 1, g, &p1));
            let hi = sub_vec(&sub_vec(&pm, &p0), &p1);
            (lo, hi)
        };
        let mut out = lo;
        out.extend(hi);
        out
    }

    pub(crate) fn mul_raw(&self, k: usize, a: &Raw, b: &Raw) -> Raw {
        counter::bump();
        let mut r = Raw {
            den: &a.den * &b.den,
            num: self.mul_num(k, &a.num, &b.num),
        };
        r.maybe_reduce();
        r
    }

    /// Exact zero test on a numerator of depth `k`, valid for redundant
    /// radicals.
    pub(crate) fn is_zero_num(&self, k: usize, x: &[BigInt]) -> bool {
        if all_zero(x) {
            return true;
        }
        if k == 0 {
            // p is irreducible, so the coefficient vector is zero iff the value is
            return false;
        }
        let h = x.len() / 2;
        let (x0, x1) = x.split_at(h);
        if all_zero(x1) || self.kind(k - 1) == RootKind::Zero || self.is_zero_num(k - 1, x1) {
            return self.is_zero_num(k - 1, x0);
        }
        if all_zero(x0) {
            // x1 != 0 and r != 0
            return false;
        }
        // x0 + x1 r = 0 forces x0^2 = x1^2 g
        let g = self.radicand_num(k - 1);
        let x1sq = self.mul_num(k - 1, x1, x1);
        let t = sub_vec(&self.mul_num(k - 1, x0, x0), &self.mul_num(k - 1, &x1sq, g));
        if !self.is_zero_num(k - 1, &t) {
            return false;
        }
        // Now x0 = s x1 r with s = +-1, so x is 0 or 2 x1 r; the latter is
        // bounded away from zero, which a fine enough box detects.
        let mut wp = START_PREC;
        loop {
            let (om, rb) = self.radical_boxes(k, wp);
            let bx = self.eval_num(k, x, wp, &om, &rb);
            if !bx.contains_zero() {
                return false;
            }
            let by = self.eval_num(k - 1, x1, wp, &om, &rb).mul(&rb[k - 1], wp);
            let m2 = by.abs2_lower();
            let w = bx.width();
            if m2.is_positive() && &w * &w < &m2 * 2 {
                return true;
            }
            wp *= 2;
            assert!(wp <= MAX_PREC, "equality test did not converge");
        }
    }

    fn base_inv(&self, x: &[BigInt]) -> Raw {
        let d = self.degree();
        if d == 1 {
            let a = &x[0];
            return Raw {
                den: a.abs(),
                num: vec![if a.is_negative() {
                    -BigInt::one()
                } else {
                    BigInt::one()
                }],
            };
        }
        // Solve (x * y) = 1 via the multiplication matrix of x.
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let mut e = vec![BigInt::zero(); d];
            e[j] = BigInt::one();
            cols.push(self.base_mul(x, &e));
        }
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d)
                    .map(|j| BigRational::from_integer(cols[j][i].clone()))
                    .collect();
                row.push(if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| !m[r][col].is_zero())
                .expect("nonzero element of an irreducible field is invertible");
            m.swap(col, piv);
            let inv = m[col][col].recip();
            for v in m[col].iter_mut() {
                *v = &*v * &inv;
            }
            for r in 0..d {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    let prow = m[col].clone();
                    for (x, p) in m[r].iter_mut().zip(&prow).skip(col) {
                        *x -= p * &f;
                    }
                }
            }
        }
        let sol: Vec<BigRational> = m.into_iter().map(|row| row[d].clone()).collect();
        let den = sol.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = sol.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Raw { den, num }
    }

    /// Inverse of a nonzero numerator of depth `k`; `None` when it is zero.
    pub(crate) fn inv_num(&self, k: usize, x: &[BigInt]) -> Option<Raw> {
        if k == 0 {
            if all_zero(x) {
                return None;
            }
            return Some(self.base_inv(x));
        }
        let h = x.len() / 2;
        let (x0, x1) = x.split_at(h);
        if all_zero(x1) || self.kind(k - 1) == RootKind::Zero || self.is_zero_num(k - 1, x1) {
            return self.inv_num(k - 1, x0).map(|r| r.lift(2 * h));
        }
        let g = self.radicand_num(k - 1);
        let x1sq = self.mul_num(k - 1, x1, x1);
        let n = sub_vec(&self.mul_num(k - 1, x0, x0), &self.mul_num(k - 1, &x1sq, g));
        if !self.is_zero_num(k - 1, &n) {
            // 1/(x0 + x1 r) = (x0 - x1 r) / (x0^2 - x1^2 g)
            let i = self.inv_num(k - 1, &n)?;
            let mut num = self.mul_num(k - 1, x0, &i.num);
            num.extend(self.mul_num(k - 1, x1, &i.num).into_iter().map(|c| -c));
            return Some(Raw { den: i.den, num });
        }
        // x = 2 x1 r, so 1/x = r / (2 x1 g)
        if self.is_zero_num(k, x) {
            return None;
        }
        let t = scale_vec(&self.mul_num(k - 1, x1, g), &BigInt::from(2));
        let i = self.inv_num(k - 1, &t)?;
        let mut num = vec![BigInt::zero(); h];
        num.extend(i.num);
        Some(Raw { den: i.den, num })
    }

    pub(crate) fn inv_raw(&self, k: usize, x: &Raw) -> Option<Raw> {
        counter::bump();
        let mut r = self.inv_num(k, &x.num)?;
        r.num = scale_vec(&r.num, &x.den);
        r.maybe_reduce();
        Some(r)
    }

    fn base_conj(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        match self.field.conjugation() {
            Conjugation::Identity => Some(x.to_vec()),
            Conjugation::QuadraticFlip => {
                // a + b w -> a + b (-c1 - w)
                let c1 = &self.field.poly()[1];
                Some(vec![&x[0] - &x[1] * c1, -&x[1]])
            }
            Conjugation::Unsupported => {
                if all_zero(&x[1..]) {
                    Some(x.to_vec())
                } else {
                    None
                }
            }
        }
    }

    fn conj_images(&self) -> &[Option<Raw>] {
        self.conj_images.get_or_init(|| {
            let kk = self.depth();
            let w = self.width(kk);
            let d = self.degree();
            let mono = |mask: usize| {
                let mut r = Raw::zero(w);
                r.num[mask * d] = BigInt::one();
                r
            };
            (0..kk)
                .map(|j| match self.kind(j) {
                    RootKind::PositiveReal => Some(mono(1 << j)),
                    RootKind::NegativeReal => Some(mono(1 << j).neg()),
                    RootKind::Zero => Some(Raw::zero(w)),
                    RootKind::UpperHalf | RootKind::LowerHalf => {
                        // conj(r) = |g| r / g with |g| = s / scale
                        let p = self.partner(j)?;
                        let ig = self.inv_num(j, self.radicand_num(j))?;
                        let prod = self.mul_num(
                            kk,
                            &pad(&ig.num, w),
                            &mono((1 << j) | (1 << p.index)).num,
                        );
                        Some(Raw {
                            den: ig.den * p.scale.numer(),
                            num: scale_vec(&prod, p.scale.denom()),
                        })
                    }
                    RootKind::RightHalf => None,
                })
                .collect()
        })
    }

    /// Complex conjugate of a numerator of depth `k`, as an element of the
    /// full level. `None` when conjugation is not expressible here.
    pub(crate) fn conj_num(&self, k: usize, x: &[BigInt]) -> Option<Raw> {
        let w = self.width(self.depth());
        if all_zero(x) {
            return Some(Raw::zero(w));
        }
        if k == 0 {
            let c = self.base_conj(x)?;
            return Some(Raw {
                den: BigInt::one(),
                num: pad(&c, w),
            });
        }
        let h = x.len() / 2;
        let (x0, x1) = x.split_at(h);
        let c0 = self.conj_num(k - 1, x0)?;
        if all_zero(x1) {
            return Some(c0);
        }
        let img = self.conj_images()[k - 1].as_ref()?;
        let c1 = self.conj_num(k - 1, x1)?;
        Some(c0.add(&self.mul_raw(self.depth(), &c1, img)))
    }

    pub(crate) fn conj_raw(&self, x: &Raw) -> Option<Raw> {
        counter::bump();
        let mut c = self.conj_num(self.depth(), &x.num)?;
        c.den *= &x.den;
        c.maybe_reduce();
        Some(c)
    }

    /// Boxes around `w` and around each of the first `k` radicals.
    pub(crate) fn radical_boxes(&self, k: usize, wp: u32) -> (CBox, Vec<CBox>) {
        let om = self.field.generator_box(wp);
        let mut rb = Vec::with_capacity(k);
        for j in 0..k {
            let g = self.eval_num(j, self.radicand_num(j), wp, &om, &rb);
            rb.push(sqrt_box(&g, self.kind(j), wp));
        }
        (om, rb)
    }

    pub(crate) fn eval_num(&self, k: usize, x: &[BigInt], wp: u32, om: &CBox, rb: &[CBox]) -> CBox {
        if all_zero(x) {
            return CBox::zero();
        }
        if k == 0 {
            let mut acc = CBox::zero();
            for c in x.iter().rev() {
                acc = acc.mul(om, wp).add(&CBox::real(Interval::from_int(c, wp)));
            }
            return acc;
        }
        let h = x.len() / 2;
        let (x0, x1) = x.split_at(h);
        let lo = self.eval_num(k - 1, x0, wp, om, rb);
        if all_zero(x1) {
            return lo;
        }
        lo.add(&self.eval_num(k - 1, x1, wp, om, rb).mul(&rb[k - 1], wp))
    }

    /// Box of width at most `2^-prec` around the value of `x`, returned with
    /// the working precision its endpoints are expressed in.
    pub(crate) fn numeric_box_raw(&self, x: &Raw, prec: u32) -> (CBox, u32) {
        let k = self.depth();
        let mut wp = prec.max(8) + 32;
        loop {
            let (om, rb) = self.radical_boxes(k, wp);
            let b = self.eval_num(k, &x.num, wp, &om, &rb).div_int(&x.den);
            if b.width() <= BigInt::one() << (wp - prec) {
                return (b, wp);
            }
            wp *= 2;
            assert!(wp <= MAX_PREC, "numeric evaluation did not converge");
        }
    }

    /// Certifies the branch for the square root of `g` (full depth).
    pub(crate) fn determine_kind(&self, g: &[BigInt]) -> Result<RootKind, FieldError> {
        let k = self.depth();
        if self.is_zero_num(k, g) {
            return Ok(RootKind::Zero);
        }
        let real = self
            .conj_num(k, g)
            .map(|c| self.is_zero_num(k, &sub_vec(&scale_vec(g, &c.den), &c.num)));
        let mut wp = START_PREC;
        loop {
            let (om, rb) = self.radical_boxes(k, wp);
            let b = self.eval_num(k, g, wp, &om, &rb);
            match real {
                Some(true) => {
                    if b.re.lo.is_positive() {
                        return Ok(RootKind::PositiveReal);
                    }
                    if b.re.hi.is_negative() {
                        return Ok(RootKind::NegativeReal);
                    }
                }
                Some(false) => {
                    if b.im.lo.is_positive() {
                        return Ok(RootKind::UpperHalf);
                    }
                    if b.im.hi.is_negative() {
                        return Ok(RootKind::LowerHalf);
                    }
                }
                None => {
                    if b.im.lo.is_positive() {
                        return Ok(RootKind::UpperHalf);
                    }
                    if b.im.hi.is_negative() {
                        return Ok(RootKind::LowerHalf);
                    }
                    if b.re.lo.is_positive() {
                        return Ok(RootKind::RightHalf);
                    }
                    if wp >= 1 << 14 {
                        return Err(FieldError::BranchUndecided);
                    }
                }
            }
            wp *= 2;
            assert!(wp <= MAX_PREC, "branch certification did not converge");
        }
    }
}

fn sqrt_box(g: &CBox, kind: RootKind, wp: u32) -> CBox {
    let two = BigInt::from(2);
    match kind {
        RootKind::Zero => CBox::zero(),
        RootKind::PositiveReal => CBox::real(g.re.sqrt(wp)),
        RootKind::NegativeReal => CBox {
            re: Interval::zero(),
            im: g.re.neg().sqrt(wp),
        },
        RootKind::UpperHalf | RootKind::LowerHalf => {
            let a = g.abs(wp);
            let re = a.add(&g.re).div_int(&two).sqrt(wp);
            let im = a.sub(&g.re).div_int(&two).sqrt(wp);
            let im = if kind == RootKind::LowerHalf {
                im.neg()
            } else {
                im
            };
            CBox { re, im }
        }
        RootKind::RightHalf => {
            let a = g.abs(wp);
            let re = a.add(&g.re).div_int(&two).sqrt(wp);
            let im = if re.lo.is_positive() {
                g.im.div_positive(&re.scale(&two), wp)
            } else {
                let s = a.sqrt(wp);
                Interval {
                    lo: -&s.hi,
                    hi: s.hi,
                }
            };
            CBox { re, im }
        }
    }
}
