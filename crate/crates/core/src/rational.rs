//! Exact rational helpers on top of [`num_rational::BigRational`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> Rational {
    it.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn is_binary(v: &Rational) -> bool {
    v.is_zero() || v.is_one()
}

/// Formats as `p/q` in lowest terms, or `p` for integers.
pub fn format(v: &Rational) -> String {
    let mut s = String::new();
    if v.denom().is_one() {
        let _ = write!(s, "{}", v.numer());
    } else {
        let _ = write!(s, "{}/{}", v.numer(), v.denom());
    }
    s
}

/// Parses `p/q` or an integer. Rejects a zero denominator.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Least common multiple of the denominators of `values` (1 when empty).
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales every value by `scale` and returns the numerators, which must be integral.
pub fn scale_to_integers(values: &[Rational], scale: &BigInt) -> Vec<BigInt> {
    values
        .iter()
        .map(|v| {
            let s = v * Rational::from_integer(scale.clone());
            debug_assert!(s.is_integer());
            s.to_integer()
        })
        .collect()
}

pub fn to_u64(v: &Rational) -> Option<u64> {
    if v.is_integer() && !v.is_negative() {
        v.to_integer().to_u64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse_agree() {
        for (n, d) in [(0, 1), (3, 1), (-7, 3), (6, 4), (100, 7)] {
            let v = ratio(n, d);
            assert_eq!(parse(&format(&v)), Some(v));
        }
        assert_eq!(format(&ratio(6, 4)), "3/2");
        assert_eq!(format(&int(5)), "5");
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn common_denominator_is_lcm() {
        let v = [ratio(1, 4), ratio(5, 6), int(3)];
        assert_eq!(common_denominator(v.iter()), BigInt::from(12));
        let scaled = scale_to_integers(&v, &BigInt::from(12));
        assert_eq!(scaled, [3, 10, 36].map(BigInt::from));
    }
}
