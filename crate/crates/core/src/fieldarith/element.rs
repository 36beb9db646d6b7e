//! Field elements in rationalized form and their arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::counter;
use super::field::NumberField;
use super::interval::CBox;
use super::isqrt::isqrt_exact;
use super::tower::{all_zero, pad, Raw, RootKind, TowerLevel, MAX_TOWER_DEPTH};
use super::FieldError;

/// `(1/mu) * f(w, r_0, ..., r_{k-1})` over a tower level.
#[derive(Clone)]
pub struct FieldElement {
    level: Arc<TowerLevel>,
    raw: Raw,
}

/// Rational box `[re_lo, re_hi] x [im_lo, im_hi]` enclosing a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re_lo: BigRational,
    pub re_hi: BigRational,
    pub im_lo: BigRational,
    pub im_hi: BigRational,
}

impl ComplexBox {
    pub fn contains(&self, re: &BigRational, im: &BigRational) -> bool {
        &self.re_lo <= re && re <= &self.re_hi && &self.im_lo <= im && im <= &self.im_hi
    }

    pub fn overlaps(&self, o: &ComplexBox) -> bool {
        self.re_lo <= o.re_hi
            && o.re_lo <= self.re_hi
            && self.im_lo <= o.im_hi
            && o.im_lo <= self.im_hi
    }

    pub fn width(&self) -> BigRational {
        let a = &self.re_hi - &self.re_lo;
        let b = &self.im_hi - &self.im_lo;
        if a > b {
            a
        } else {
            b
        }
    }
}

fn to_box(b: &CBox, wp: u32) -> ComplexBox {
    ComplexBox {
        re_lo: b.re.lo_rational(wp),
        re_hi: b.re.hi_rational(wp),
        im_lo: b.im.lo_rational(wp),
        im_hi: b.im.hi_rational(wp),
    }
}

impl FieldElement {
    fn wrap(level: Arc<TowerLevel>, raw: Raw) -> Self {
        debug_assert_eq!(raw.num.len(), level.width(level.depth()));
        debug_assert!(raw.den.is_positive());
        FieldElement { level, raw }
    }

    pub fn zero(level: &Arc<TowerLevel>) -> Self {
        Self::wrap(level.clone(), Raw::zero(level.width(level.depth())))
    }

    pub fn one(level: &Arc<TowerLevel>) -> Self {
        Self::wrap(level.clone(), Raw::one(level.width(level.depth())))
    }

    pub fn from_int(level: &Arc<TowerLevel>, k: impl Into<BigInt>) -> Self {
        let mut r = Raw::zero(level.width(level.depth()));
        r.num[0] = k.into();
        Self::wrap(level.clone(), r)
    }

    pub fn from_rational(level: &Arc<TowerLevel>, q: &BigRational) -> Self {
        let mut r = Raw::zero(level.width(level.depth()));
        r.num[0] = q.numer().clone();
        r.den = q.denom().clone();
        Self::wrap(level.clone(), r)
    }

    /// Builds `(1/den) * sum num[i] * monomial_i`.
    pub fn from_parts(
        level: &Arc<TowerLevel>,
        den: BigInt,
        num: Vec<BigInt>,
    ) -> Result<Self, FieldError> {
        if !den.is_positive() {
            return Err(FieldError::Parse("denominator must be positive".into()));
        }
        if num.len() != level.width(level.depth()) {
            return Err(FieldError::Parse(format!(
                "expected {} coefficients, found {}",
                level.width(level.depth()),
                num.len()
            )));
        }
        Ok(Self::wrap(level.clone(), Raw { den, num }))
    }

    /// The field generator `w`.
    pub fn generator(level: &Arc<TowerLevel>) -> Self {
        let mut r = Raw::zero(level.width(level.depth()));
        if level.degree() == 1 {
            r.num[0] = -&level.field().poly()[0];
        } else {
            r.num[1] = BigInt::one();
        }
        Self::wrap(level.clone(), r)
    }

    /// The adjoined root `r_j` as stored (square root of the integral radicand).
    pub fn radical(level: &Arc<TowerLevel>, j: usize) -> Self {
        assert!(j < level.depth());
        let mut r = Raw::zero(level.width(level.depth()));
        r.num[(1 << j) * level.degree()] = BigInt::one();
        Self::wrap(level.clone(), r)
    }

    pub fn level(&self) -> &Arc<TowerLevel> {
        &self.level
    }

    pub fn den(&self) -> &BigInt {
        &self.raw.den
    }

    pub fn num(&self) -> &[BigInt] {
        &self.raw.num
    }

    /// Largest bit length among the denominator and numerator coefficients.
    pub fn coeff_bits(&self) -> u64 {
        self.raw.max_bits()
    }

    /// The value when the representation has only a constant term.
    pub fn as_rational(&self) -> Option<BigRational> {
        if all_zero(&self.raw.num[1..]) {
            Some(BigRational::new(
                self.raw.num[0].clone(),
                self.raw.den.clone(),
            ))
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        counter::bump();
        self.level.is_zero_num(self.level.depth(), &self.raw.num)
    }

    pub fn is_one(&self) -> bool {
        self.fe_eq(&Self::one(&self.level))
    }

    /// Moves the element to a level that has this one as a prefix.
    pub fn lift_to(&self, level: &Arc<TowerLevel>) -> Result<Self, FieldError> {
        if Arc::ptr_eq(&self.level, level) {
            return Ok(self.clone());
        }
        if !TowerLevel::is_prefix_of(&self.level, level) {
            return Err(FieldError::IncompatibleTowers);
        }
        Ok(Self::wrap(
            level.clone(),
            self.raw.lift(level.width(level.depth())),
        ))
    }

    fn align(&self, o: &Self) -> Result<(Arc<TowerLevel>, Raw, Raw), FieldError> {
        if Arc::ptr_eq(&self.level, &o.level) {
            return Ok((self.level.clone(), self.raw.clone(), o.raw.clone()));
        }
        let l = TowerLevel::common(&self.level, &o.level).ok_or(FieldError::IncompatibleTowers)?;
        let w = l.width(l.depth());
        Ok((l, self.raw.lift(w), o.raw.lift(w)))
    }

    /// Brings two elements into one level, merging unrelated towers when needed.
    pub fn unify(a: &Self, b: &Self) -> Result<(Self, Self), FieldError> {
        if let Some(l) = TowerLevel::common(&a.level, &b.level) {
            return Ok((a.lift_to(&l)?, b.lift_to(&l)?));
        }
        let (m, map) =
            TowerLevel::merge(&a.level, &b.level).ok_or(FieldError::IncompatibleTowers)?;
        let w = m.width(m.depth());
        let ea = Self::wrap(m.clone(), a.raw.lift(w));
        let num = b
            .level
            .embed_num(&b.raw.num, b.level.depth(), &map, m.depth());
        let eb = Self::wrap(
            m,
            Raw {
                den: b.raw.den.clone(),
                num,
            },
        );
        Ok((ea, eb))
    }

    /// Moves `b` into the level of `a` when `b`'s tower embeds into it.
    pub fn unify_into(target: &Arc<TowerLevel>, b: &Self) -> Result<Self, FieldError> {
        b.lift_to(target)
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, FieldError> {
        let (l, a, b) = self.align(o)?;
        Ok(Self::wrap(l, a.add(&b)))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, FieldError> {
        let (l, a, b) = self.align(o)?;
        Ok(Self::wrap(l, a.sub(&b)))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, FieldError> {
        let (l, a, b) = self.align(o)?;
        let r = l.mul_raw(l.depth(), &a, &b);
        Ok(Self::wrap(l, r))
    }

    /// Semantic equality (same complex value).
    pub fn checked_eq(&self, o: &Self) -> Result<bool, FieldError> {
        let (l, a, b) = self.align(o)?;
        counter::bump();
        let diff: Vec<BigInt> = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &b.den - y * &a.den)
            .collect();
        Ok(l.is_zero_num(l.depth(), &diff))
    }

    /// Semantic equality; panics when the towers are incompatible.
    pub fn fe_eq(&self, o: &Self) -> bool {
        self.checked_eq(o).expect("elements of incompatible towers")
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        Self::wrap(self.level.clone(), self.raw.scale_int(k))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let r = self
            .level
            .inv_raw(self.level.depth(), &self.raw)
            .ok_or(FieldError::DivisionByZero)?;
        Ok(Self::wrap(self.level.clone(), r))
    }

    /// Complex conjugate, when the tower supports it.
    pub fn conj(&self) -> Result<Self, FieldError> {
        let r = self
            .level
            .conj_raw(&self.raw)
            .ok_or(FieldError::ConjugationUnsupported)?;
        Ok(Self::wrap(self.level.clone(), r))
    }

    /// Divides numerator and denominator by their common gcd.
    pub fn reduced(&self) -> Self {
        let mut r = self.raw.clone();
        r.reduce();
        Self::wrap(self.level.clone(), r)
    }

    /// A box of width at most `2^-prec` that contains the value.
    pub fn numeric_box(&self, prec: u32) -> ComplexBox {
        let (b, wp) = self.level.numeric_box_raw(&self.raw, prec);
        to_box(&b, wp)
    }

    /// `mu:g0/g1/...`, one comma-separated group of `d` coefficients per
    /// radical monomial.
    pub fn to_compact(&self) -> String {
        let d = self.level.degree();
        let groups: Vec<String> = self
            .raw
            .num
            .chunks(d)
            .map(|g| {
                g.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        format!("{}:{}", self.raw.den, groups.join("/"))
    }

    pub fn parse_compact(level: &Arc<TowerLevel>, s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(format!("malformed element `{s}`"));
        let (mu, rest) = s.split_once(':').ok_or_else(bad)?;
        let den: BigInt = mu.trim().parse().map_err(|_| bad())?;
        let groups: Vec<&str> = rest.split('/').collect();
        if groups.len() != 1 << level.depth() {
            return Err(FieldError::Parse(format!(
                "element `{s}` needs {} coefficient groups",
                1 << level.depth()
            )));
        }
        let mut num = Vec::with_capacity(level.width(level.depth()));
        for g in groups {
            let coeffs: Vec<BigInt> = g
                .split(',')
                .map(|t| t.trim().parse::<BigInt>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            if coeffs.len() != level.degree() {
                return Err(FieldError::Parse(format!(
                    "element `{s}` needs {} coefficients per group",
                    level.degree()
                )));
            }
            num.extend(coeffs);
        }
        Self::from_parts(level, den, num)
    }

    /// `mu: 6, coeffs: [[7, 1]]` form.
    pub fn to_spec_string(&self) -> String {
        let d = self.level.degree();
        let groups: Vec<String> = self
            .raw
            .num
            .chunks(d)
            .map(|g| {
                format!(
                    "[{}]",
                    g.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        format!("mu: {}, coeffs: [{}]", self.raw.den, groups.join(", "))
    }

    pub fn parse_spec(level: &Arc<TowerLevel>, s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(format!("malformed element `{s}`"));
        let rest = s.trim().strip_prefix("mu:").ok_or_else(bad)?;
        let (mu, rest) = rest.split_once(',').ok_or_else(bad)?;
        let rest = rest.trim().strip_prefix("coeffs:").ok_or_else(bad)?.trim();
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let compact: Vec<String> = inner
            .split(']')
            .map(|g| {
                g.trim()
                    .trim_start_matches(',')
                    .trim()
                    .trim_start_matches('[')
            })
            .filter(|g| !g.is_empty())
            .map(|g| g.replace(' ', ""))
            .collect();
        Self::parse_compact(level, &format!("{}:{}", mu.trim(), compact.join("/")))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldElement({} @ depth {})",
            self.to_compact(),
            self.level.depth()
        )
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.$checked(o).expect("elements of incompatible towers")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::wrap(self.level.clone(), self.raw.neg())
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Result of adjoining a square root: the (possibly unchanged) level and
/// the root as an element of it.
#[derive(Clone, Debug)]
pub struct SqrtResult {
    pub level: Arc<TowerLevel>,
    pub root: FieldElement,
}

/// Adjoins the principal square root of `d` to `level`.
///
/// A rational `d` whose square root is rational does not extend the tower.
pub fn adjoin_sqrt(level: &Arc<TowerLevel>, d: &FieldElement) -> Result<SqrtResult, FieldError> {
    adjoin_sqrt_inner(level, d, None, MAX_TOWER_DEPTH)
}

pub(crate) fn adjoin_sqrt_inner(
    level: &Arc<TowerLevel>,
    d: &FieldElement,
    known: Option<RootKind>,
    max_depth: usize,
) -> Result<SqrtResult, FieldError> {
    let d = d.lift_to(level)?;
    if let Some(q) = d.as_rational() {
        if q.is_zero() {
            return Ok(SqrtResult {
                level: level.clone(),
                root: FieldElement::zero(level),
            });
        }
        if q.is_positive() {
            if let Some(s) = isqrt_exact(&(q.numer() * q.denom())) {
                let root =
                    FieldElement::from_rational(level, &BigRational::new(s, q.denom().clone()));
                return Ok(SqrtResult {
                    level: level.clone(),
                    root,
                });
            }
        }
    }
    if level.depth() >= max_depth {
        return Err(FieldError::TowerTooDeep(max_depth));
    }
    // sqrt(num/mu) = sqrt(num * mu) / mu keeps the stored radicand integral
    let g: Vec<BigInt> = d.raw.num.iter().map(|c| c * &d.raw.den).collect();
    let kind = match known {
        Some(k) => k,
        None => level.determine_kind(&g)?,
    };
    let next = level.extend(g, kind, None);
    let k = level.depth();
    let mut r = Raw::zero(next.width(next.depth()));
    r.num[(1 << k) * next.degree()] = BigInt::one();
    r.den = d.raw.den.clone();
    let root = FieldElement::wrap(next.clone(), r);
    Ok(SqrtResult { level: next, root })
}

/// Radicand `G * den(G)^2` of the conjugation partner of radical `j`, where
/// `G = g_j * conj(g_j)`, together with the scale `den(G)`.
pub(crate) fn partner_radicand(
    level: &Arc<TowerLevel>,
    j: usize,
) -> Result<(Vec<BigInt>, BigRational), FieldError> {
    let k = level.depth();
    let w = level.width(k);
    let g = Raw {
        den: BigInt::one(),
        num: pad(level.radicand_num(j), w),
    };
    let c = level
        .conj_raw(&g)
        .ok_or(FieldError::ConjugationUnsupported)?;
    let mut prod = level.mul_raw(k, &g, &c);
    prod.reduce();
    let num = prod.num.iter().map(|x| x * &prod.den).collect();
    Ok((num, BigRational::from_integer(prod.den)))
}

/// Adds the conjugation partner for radical `j`.
pub(crate) fn adjoin_partner(
    level: &Arc<TowerLevel>,
    j: usize,
) -> Result<Arc<TowerLevel>, FieldError> {
    let (g, scale) = partner_radicand(level, j)?;
    Ok(level.extend(g, RootKind::PositiveReal, Some((j, scale))))
}

/// Level spec `[D_0;D_1;...]` with each radicand in compact form at its prefix.
pub fn level_spec(level: &Arc<TowerLevel>) -> String {
    let parts: Vec<String> = (0..level.depth())
        .map(|j| {
            let p = level.prefix(j);
            FieldElement::wrap(
                p,
                Raw {
                    den: BigInt::one(),
                    num: level.radicand_num(j).to_vec(),
                },
            )
            .to_compact()
        })
        .collect();
    format!("[{}]", parts.join(";"))
}

/// Rebuilds a level from its spec, recertifying branches and recovering
/// conjugation partners.
pub fn parse_level_spec(field: &Arc<NumberField>, s: &str) -> Result<Arc<TowerLevel>, FieldError> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| FieldError::Parse(format!("malformed level spec `{s}`")))?;
    let mut level = TowerLevel::base(field.clone());
    if inner.trim().is_empty() {
        return Ok(level);
    }
    for part in inner.split(';') {
        let d = FieldElement::parse_compact(&level, part.trim())?;
        if !d.raw.den.is_one() {
            return Err(FieldError::Parse(
                "radicands must have denominator 1".into(),
            ));
        }
        let kind = level.determine_kind(&d.raw.num)?;
        let mut partner_of = None;
        if kind == RootKind::PositiveReal {
            for j in 0..level.depth() {
                let nonreal = matches!(level.kind(j), RootKind::UpperHalf | RootKind::LowerHalf);
                if nonreal && level.partner(j).is_none() {
                    if let Ok((g, scale)) = partner_radicand(&level, j) {
                        let cand = FieldElement::wrap(
                            level.clone(),
                            Raw {
                                den: BigInt::one(),
                                num: g,
                            },
                        );
                        if cand.fe_eq(&d) {
                            partner_of = Some((j, scale));
                            break;
                        }
                    }
                }
            }
        }
        level = level.extend(d.raw.num.clone(), kind, partner_of);
    }
    Ok(level)
}
