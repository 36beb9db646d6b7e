//! The base number field `Q[w]`: minimal polynomial, embedding and the
//! certified location of `w` in the complex plane.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{CBox, Interval};
use super::isqrt::isqrt_ceil;
use super::FieldError;

/// Largest accepted degree of the minimal polynomial.
pub const MAX_DEGREE: usize = 16;
/// Largest accepted bit size of any coefficient or box endpoint part.
pub const MAX_SPEC_BITS: u64 = 128;

/// Rational box `[re_lo, re_hi] x [im_lo, im_hi]` in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalBox {
    pub re_lo: BigRational,
    pub re_hi: BigRational,
    pub im_lo: BigRational,
    pub im_hi: BigRational,
}

/// How complex conjugation acts on the base field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjugation {
    /// `w` is real: conjugation fixes the field.
    Identity,
    /// Quadratic field with non-real `w`: the conjugate root is `-c1 - w`.
    QuadraticFlip,
    /// Non-real `w` of degree above two; the conjugate root need not lie in
    /// the field.
    Unsupported,
}

#[derive(Clone, Debug)]
struct Disc {
    re: BigRational,
    im: BigRational,
    /// Upper bound on the radius.
    radius: BigRational,
}

/// A number field given by a monic integer polynomial and an isolating box
/// that selects the embedding of its generator.
#[derive(Clone, Debug)]
pub struct NumberField {
    poly: Vec<BigInt>,
    embedding: Option<RationalBox>,
    isolation: Option<Disc>,
    /// Inclusion discs of the other roots.
    others: Vec<Disc>,
    conjugation: Conjugation,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.embedding == other.embedding
    }
}

impl Eq for NumberField {}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn eval_complex(poly: &[BigInt], re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
    // Horner over Q[i]
    let mut acc_re = BigRational::zero();
    let mut acc_im = BigRational::zero();
    for c in poly.iter().rev() {
        let nr = &acc_re * re - &acc_im * im + BigRational::from_integer(c.clone());
        let ni = &acc_re * im + &acc_im * re;
        acc_re = nr;
        acc_im = ni;
    }
    (acc_re, acc_im)
}

fn derivative(poly: &[BigInt]) -> Vec<BigInt> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Upper bound `r >= sqrt(x)` with `r` dyadic.
fn sqrt_upper(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << (2 * bits);
    let scaled = x * BigRational::from_integer(scale);
    let ceil = scaled.ceil().to_integer();
    let root = isqrt_ceil(ceil.magnitude());
    BigRational::new(BigInt::from(root), BigInt::one() << bits)
}

/// Radius bound `d |p(z)| / |p'(z)|` of a disc around `z` that must contain a root.
fn inclusion_radius(poly: &[BigInt], re: &BigRational, im: &BigRational) -> Option<BigRational> {
    let d = poly.len() - 1;
    let (pr, pi) = eval_complex(poly, re, im);
    let (dr, di) = eval_complex(&derivative(poly), re, im);
    let num = &pr * &pr + &pi * &pi;
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    let r2 = num / den * rat((d * d) as i64);
    Some(sqrt_upper(&r2, 96))
}

fn durand_kerner(poly: &[BigInt]) -> Vec<Complex64> {
    let d = poly.len() - 1;
    let coeffs: Vec<f64> = poly
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect();
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let bound = 1.0 + coeffs[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut roots: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32) * bound.sqrt()).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-17 {
            break;
        }
    }
    roots
}

fn disc_inside_box(disc: &Disc, b: &RationalBox) -> bool {
    &disc.re - &disc.radius >= b.re_lo
        && &disc.re + &disc.radius <= b.re_hi
        && &disc.im - &disc.radius >= b.im_lo
        && &disc.im + &disc.radius <= b.im_hi
}

fn disc_misses_box(disc: &Disc, b: &RationalBox) -> bool {
    let clamp = |x: &BigRational, lo: &BigRational, hi: &BigRational| {
        if x < lo {
            lo.clone()
        } else if x > hi {
            hi.clone()
        } else {
            x.clone()
        }
    };
    let cx = clamp(&disc.re, &b.re_lo, &b.re_hi);
    let cy = clamp(&disc.im, &b.im_lo, &b.im_hi);
    let dx = &disc.re - cx;
    let dy = &disc.im - cy;
    &dx * &dx + &dy * &dy > &disc.radius * &disc.radius
}

fn discs_disjoint(a: &Disc, b: &Disc) -> bool {
    let dx = &a.re - &b.re;
    let dy = &a.im - &b.im;
    let r = &a.radius + &b.radius;
    &dx * &dx + &dy * &dy > &r * &r
}

impl NumberField {
    /// The rationals, `p(x) = x`.
    pub fn rationals() -> Self {
        NumberField {
            poly: vec![BigInt::zero(), BigInt::one()],
            embedding: None,
            isolation: None,
            others: Vec::new(),
            conjugation: Conjugation::Identity,
        }
    }

    /// `Q[i]` with `i` in the upper half plane.
    pub fn gaussian() -> Self {
        let b = RationalBox {
            re_lo: BigRational::new((-1).into(), 2.into()),
            re_hi: BigRational::new(1.into(), 2.into()),
            im_lo: BigRational::new(1.into(), 2.into()),
            im_hi: BigRational::new(3.into(), 2.into()),
        };
        Self::new(vec![1.into(), 0.into(), 1.into()], Some(b)).expect("Q[i] is well formed")
    }

    /// `Q[sqrt(k)]` with the positive root, for non-square `k > 0`.
    pub fn real_quadratic(k: i64) -> Result<Self, FieldError> {
        let s = (k as f64).sqrt();
        let b = RationalBox {
            re_lo: BigRational::from_float(s - 0.25).unwrap(),
            re_hi: BigRational::from_float(s + 0.25).unwrap(),
            im_lo: rat(-1),
            im_hi: rat(1),
        };
        Self::new(vec![BigInt::from(-k), 0.into(), 1.into()], Some(b))
    }

    pub fn new(poly: Vec<BigInt>, embedding: Option<RationalBox>) -> Result<Self, FieldError> {
        if poly.len() < 2 {
            return Err(FieldError::InvalidSpec(
                "polynomial must have degree at least 1".into(),
            ));
        }
        if !poly.last().unwrap().is_one() {
            return Err(FieldError::InvalidSpec("polynomial must be monic".into()));
        }
        let d = poly.len() - 1;
        if d > MAX_DEGREE || poly.iter().any(|c| c.bits() > MAX_SPEC_BITS) {
            return Err(FieldError::InvalidSpec(
                "field specification exceeds size bound".into(),
            ));
        }
        if let Some(b) = &embedding {
            let parts = [&b.re_lo, &b.re_hi, &b.im_lo, &b.im_hi];
            if parts
                .iter()
                .any(|r| r.numer().bits() > MAX_SPEC_BITS || r.denom().bits() > MAX_SPEC_BITS)
            {
                return Err(FieldError::InvalidSpec(
                    "embedding box exceeds size bound".into(),
                ));
            }
            if b.re_lo > b.re_hi || b.im_lo > b.im_hi {
                return Err(FieldError::InvalidSpec("embedding box is empty".into()));
            }
        }
        if d == 1 {
            if let Some(b) = &embedding {
                let root = BigRational::from_integer(-&poly[0]);
                let zero = BigRational::zero();
                if root < b.re_lo || root > b.re_hi || zero < b.im_lo || zero > b.im_hi {
                    return Err(FieldError::InvalidSpec(
                        "embedding box misses the root".into(),
                    ));
                }
            }
            return Ok(NumberField {
                poly,
                embedding,
                isolation: None,
                others: Vec::new(),
                conjugation: Conjugation::Identity,
            });
        }
        let b = embedding.clone().ok_or_else(|| {
            FieldError::InvalidSpec("embedding box required for degree > 1".into())
        })?;

        let approx = durand_kerner(&poly);
        let mut discs = Vec::with_capacity(d);
        for z in &approx {
            let re = BigRational::from_float(z.re)
                .ok_or_else(|| FieldError::InvalidSpec("root approximation failed".into()))?;
            let im = BigRational::from_float(z.im)
                .ok_or_else(|| FieldError::InvalidSpec("root approximation failed".into()))?;
            let radius = inclusion_radius(&poly, &re, &im)
                .ok_or_else(|| FieldError::InvalidSpec("polynomial has a repeated root".into()))?;
            discs.push(Disc { re, im, radius });
        }
        for i in 0..d {
            for j in i + 1..d {
                if !discs_disjoint(&discs[i], &discs[j]) {
                    return Err(FieldError::InvalidSpec(
                        "could not separate the roots of the polynomial".into(),
                    ));
                }
            }
        }
        let mut chosen = None;
        for (k, disc) in discs.iter().enumerate() {
            if disc_inside_box(disc, &b) {
                if chosen.is_some() {
                    return Err(FieldError::InvalidSpec(
                        "embedding box holds several roots".into(),
                    ));
                }
                chosen = Some(k);
            } else if !disc_misses_box(disc, &b) {
                return Err(FieldError::InvalidSpec(
                    "a root lies too close to the embedding box boundary".into(),
                ));
            }
        }
        let k =
            chosen.ok_or_else(|| FieldError::InvalidSpec("embedding box holds no root".into()))?;
        let own = discs[k].clone();
        let mirror = Disc {
            re: own.re.clone(),
            im: -&own.im,
            radius: own.radius.clone(),
        };
        let mirror_hits_other = discs
            .iter()
            .enumerate()
            .any(|(j, o)| j != k && !discs_disjoint(&mirror, o));
        let real = if discs_disjoint(&mirror, &own) {
            false
        } else if !mirror_hits_other {
            true
        } else {
            return Err(FieldError::InvalidSpec(
                "cannot decide whether the generator is real".into(),
            ));
        };
        let conjugation = match (real, d) {
            (true, _) => Conjugation::Identity,
            (false, 2) => Conjugation::QuadraticFlip,
            (false, _) => Conjugation::Unsupported,
        };
        Ok(NumberField {
            poly,
            embedding,
            isolation: Some(own),
            others: discs
                .into_iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, o)| o)
                .collect(),
            conjugation,
        })
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// Coefficients `c0, ..., c_{d-1}, 1`.
    pub fn poly(&self) -> &[BigInt] {
        &self.poly
    }

    pub fn embedding(&self) -> Option<&RationalBox> {
        self.embedding.as_ref()
    }

    pub fn conjugation(&self) -> Conjugation {
        self.conjugation
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    /// Box around the generator with endpoints in units of `2^-prec` and
    /// width at most a few units.
    pub fn generator_box(&self, prec: u32) -> CBox {
        let Some(iso) = &self.isolation else {
            return CBox::real(Interval::from_int(&(-&self.poly[0]), prec));
        };
        let d = self.degree();
        let work = prec + 16;
        let unit = BigInt::one() << work;
        let round = |x: &BigRational| {
            let scaled = (x * BigRational::from_integer(unit.clone()))
                .round()
                .to_integer();
            BigRational::new(scaled, unit.clone())
        };
        let dp = derivative(&self.poly);
        let target = BigRational::new(BigInt::one(), BigInt::one() << (prec + 1));
        let mut re = iso.re.clone();
        let mut im = iso.im.clone();
        for _ in 0..256 {
            let (pr, pi) = eval_complex(&self.poly, &re, &im);
            let (dr, di) = eval_complex(&dp, &re, &im);
            let den = &dr * &dr + &di * &di;
            let num2 = &pr * &pr + &pi * &pi;
            if den.is_zero() {
                break;
            }
            let r2 = &num2 / &den * rat((d * d) as i64);
            let radius = sqrt_upper(&r2, work);
            if radius <= target {
                // The disc holds a root; missing every other root's disc makes it w.
                let disc = Disc {
                    re: re.clone(),
                    im: im.clone(),
                    radius: radius.clone(),
                };
                if self.others.iter().all(|o| discs_disjoint(&disc, o)) {
                    let mut re_iv = Interval::from_rational(&(&re - &radius), prec);
                    re_iv.hi = Interval::from_rational(&(&re + &radius), prec).hi;
                    let im_iv = if self.conjugation == Conjugation::Identity {
                        Interval::zero()
                    } else {
                        let lo = Interval::from_rational(&(&im - &radius), prec).lo;
                        let hi = Interval::from_rational(&(&im + &radius), prec).hi;
                        Interval { lo, hi }
                    };
                    return CBox {
                        re: re_iv,
                        im: im_iv,
                    };
                }
            }
            // Newton step z <- z - p(z)/p'(z)
            let qr = (&pr * &dr + &pi * &di) / &den;
            let qi = (&pi * &dr - &pr * &di) / &den;
            re = round(&(&re - qr));
            im = round(&(&im - qi));
            if self.conjugation == Conjugation::Identity {
                im = BigRational::zero();
            }
        }
        panic!("generator refinement failed to converge");
    }

    /// The `field { p: [...], box: [...] }` form.
    pub fn to_spec_string(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Some(BigRational::new(a, b))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.poly.iter().map(|c| c.to_string()).collect();
        write!(f, "field {{ p: [{}]", p.join(", "))?;
        if let Some(b) = &self.embedding {
            write!(
                f,
                ", box: [{}, {}, {}, {}]",
                format_rational(&b.re_lo),
                format_rational(&b.re_hi),
                format_rational(&b.im_lo),
                format_rational(&b.im_hi)
            )?;
        }
        write!(f, " }}")
    }
}

impl FromStr for NumberField {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| FieldError::InvalidSpec(m.to_string());
        let body = s
            .trim()
            .strip_prefix("field")
            .map(str::trim)
            .and_then(|r| r.strip_prefix('{'))
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| bad("expected `field { ... }`"))?;
        let list = |key: &str| -> Result<Option<Vec<String>>, FieldError> {
            let Some(pos) = body.find(key) else {
                return Ok(None);
            };
            let rest = body[pos + key.len()..].trim_start();
            let rest = rest
                .strip_prefix(':')
                .ok_or_else(|| bad("expected ':'"))?
                .trim_start();
            let rest = rest.strip_prefix('[').ok_or_else(|| bad("expected '['"))?;
            let end = rest.find(']').ok_or_else(|| bad("unterminated list"))?;
            Ok(Some(
                rest[..end]
                    .split(',')
                    .map(|t| t.trim().to_string())
                    .filter(|t| !t.is_empty())
                    .collect(),
            ))
        };
        let p = list("p")?.ok_or_else(|| bad("missing p"))?;
        let poly = p
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(|_| bad("bad coefficient")))
            .collect::<Result<Vec<_>, _>>()?;
        let embedding = match list("box")? {
            None => None,
            Some(b) if b.len() == 4 => {
                let r: Vec<BigRational> = b
                    .iter()
                    .map(|t| parse_rational(t).ok_or_else(|| bad("bad box entry")))
                    .collect::<Result<_, _>>()?;
                Some(RationalBox {
                    re_lo: r[0].clone(),
                    re_hi: r[1].clone(),
                    im_lo: r[2].clone(),
                    im_hi: r[3].clone(),
                })
            }
            Some(_) => return Err(bad("box needs four entries")),
        };
        NumberField::new(poly, embedding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_generator_is_i() {
        let f = NumberField::gaussian();
        assert_eq!(f.conjugation(), Conjugation::QuadraticFlip);
        let b = f.generator_box(40);
        let one = BigInt::one() << 40;
        assert!(b.re.contains_zero());
        assert!(b.im.lo <= one && one <= b.im.hi);
    }

    #[test]
    fn sqrt2_box() {
        let f = NumberField::real_quadratic(2).unwrap();
        assert_eq!(f.conjugation(), Conjugation::Identity);
        let p = 8;
        let b = f.generator_box(p);
        let v = BigRational::new(141421.into(), 100000.into());
        assert!(b.re.lo_rational(p) <= v && v <= b.re.hi_rational(p));
        assert!(b.re.width() <= BigInt::from(4));
    }

    #[test]
    fn negative_root_selected_by_box() {
        let b = RationalBox {
            re_lo: rat(-2),
            re_hi: rat(-1),
            im_lo: rat(-1),
            im_hi: rat(1),
        };
        let f = NumberField::new(vec![(-2).into(), 0.into(), 1.into()], Some(b)).unwrap();
        let g = f.generator_box(30);
        assert!(g.re.hi < BigInt::zero());
    }

    #[test]
    fn cubic_complex_root_unsupported_conjugation() {
        // x^3 - 2, complex root near -0.63 + 1.09i
        let b = RationalBox {
            re_lo: rat(-1),
            re_hi: rat(0),
            im_lo: rat(1) / rat(2),
            im_hi: rat(2),
        };
        let f = NumberField::new(vec![(-2).into(), 0.into(), 0.into(), 1.into()], Some(b)).unwrap();
        assert_eq!(f.conjugation(), Conjugation::Unsupported);
        let _ = f.generator_box(100);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(NumberField::new(vec![1.into(), 2.into()], None).is_err());
        let wide = RationalBox {
            re_lo: rat(-5),
            re_hi: rat(5),
            im_lo: rat(-5),
            im_hi: rat(5),
        };
        assert!(NumberField::new(vec![(-2).into(), 0.into(), 1.into()], Some(wide)).is_err());
        assert!(NumberField::new(vec![(-2).into(), 0.into(), 1.into()], None).is_err());
        let empty = RationalBox {
            re_lo: rat(10),
            re_hi: rat(11),
            im_lo: rat(0),
            im_hi: rat(1),
        };
        assert!(NumberField::new(vec![(-2).into(), 0.into(), 1.into()], Some(empty)).is_err());
    }

    #[test]
    fn spec_string_round_trip() {
        let f = NumberField::gaussian();
        let s = f.to_spec_string();
        assert_eq!(s, "field { p: [1, 0, 1], box: [-1/2, 1/2, 1/2, 3/2] }");
        let g: NumberField = s.parse().unwrap();
        assert_eq!(f, g);
        let q: NumberField = "field { p: [0, 1] }".parse().unwrap();
        assert!(q.is_rationals());
    }
}
