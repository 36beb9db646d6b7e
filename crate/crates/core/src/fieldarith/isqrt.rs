use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

/// Floor square root of a nonnegative integer by Newton iteration.
///
/// The starting point `2^ceil(bits/2)` is always above the root, so the
/// iterates decrease monotonically until they stop.
pub fn isqrt_floor(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let bits = n.bits();
    let mut x = BigUint::one() << bits.div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Ceiling square root of a nonnegative integer.
pub fn isqrt_ceil(n: &BigUint) -> BigUint {
    let s = isqrt_floor(n);
    if &s * &s == *n {
        s
    } else {
        s + 1u32
    }
}

/// Returns `Some(s)` with `s * s == d` when `d` is a perfect square.
///
/// `None` plays the role of `NotPerfectSquare`; negative inputs are never
/// perfect squares.
pub fn isqrt_exact(d: &BigInt) -> Option<BigInt> {
    if d.sign() == Sign::Minus {
        return None;
    }
    let n = d.magnitude();
    let s = isqrt_floor(n);
    if &s * &s == *n {
        Some(BigInt::from(s))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_values() {
        assert_eq!(isqrt_exact(&BigInt::from(144)), Some(BigInt::from(12)));
        assert_eq!(isqrt_exact(&BigInt::from(0)), Some(BigInt::from(0)));
        assert_eq!(isqrt_exact(&BigInt::from(2)), None);
        assert_eq!(isqrt_exact(&BigInt::from(1)), Some(BigInt::from(1)));
        assert_eq!(isqrt_exact(&BigInt::from(-4)), None);
        for k in 0u32..2000 {
            let n = BigUint::from(k);
            assert_eq!(isqrt_floor(&n), n.sqrt(), "floor sqrt of {k}");
            let c = isqrt_ceil(&n);
            assert!(&c * &c >= n);
            assert!(c.is_zero() || (&c - 1u32) * (&c - 1u32) < n);
        }
    }

    fn big_from_words(words: &[u32]) -> BigUint {
        BigUint::from_slice(words)
    }

    proptest! {
        #[test]
        fn exact_on_squares(words in proptest::collection::vec(any::<u32>(), 0..32)) {
            // up to 1024-bit roots
            let s = BigInt::from(big_from_words(&words));
            let sq = &s * &s;
            prop_assert_eq!(isqrt_exact(&sq), Some(s.clone()));
            if s > BigInt::one() {
                prop_assert_eq!(isqrt_exact(&(&sq + 1)), None);
                prop_assert_eq!(isqrt_exact(&(&sq - 1)), None);
            }
        }

        #[test]
        fn floor_matches_library_root(words in proptest::collection::vec(any::<u32>(), 1..40)) {
            let n = big_from_words(&words);
            prop_assert_eq!(isqrt_floor(&n), n.sqrt());
        }
    }
}
