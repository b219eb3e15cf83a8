//! Exact rational arithmetic helpers.
//!
//! Every statistic in this crate is an exact `BigRational`; nothing is ever
//! rounded to floating point. Fractions serialize as reduced `"num/den"`
//! strings.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Exact rational from an integer.
pub fn q_int(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

/// Exact rational `a / b` (`b != 0`).
pub fn q_frac(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Q {
    Q::new(a.into(), b.into())
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

/// `base^exp` for a non-negative integer exponent.
pub fn q_pow(base: &Q, exp: u32) -> Q {
    let mut acc = q_one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// `n^exp` as an integer rational.
pub fn q_int_pow(n: u64, exp: u32) -> Q {
    q_int(BigInt::from(n).pow(exp))
}

/// Floor of a non-negative rational as a `BigUint`.
pub fn q_floor_uint(q: &Q) -> BigUint {
    assert!(!q.is_negative(), "floor_uint on negative rational");
    q.floor().to_integer().to_biguint().expect("non-negative")
}

/// Ceiling of a rational as a `BigInt`.
pub fn q_ceil_int(q: &Q) -> BigInt {
    q.ceil().to_integer()
}

/// Ceiling of a non-negative rational as a `usize`, failing on overflow.
pub fn q_ceil_usize(q: &Q) -> Result<usize> {
    let c = q_ceil_int(q);
    usize::try_from(&c).map_err(|_| Error::BadParameter(format!("ceiling {c} exceeds usize")))
}

/// Reduced `"num/den"` rendering (integers render as `"n/1"`).
pub fn format_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parse `"num/den"` or a bare integer.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Invalid(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Invalid(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Invalid(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(num, den))
}

/// Check `0 < eps < 1`.
pub fn check_epsilon(eps: &Q) -> Result<()> {
    if eps <= &q_zero() || eps >= &q_one() {
        return Err(Error::BadEpsilon(format_q(eps)));
    }
    Ok(())
}

/// Serde adapter serializing a `Q` as its reduced `"num/den"` string.
///
/// Use with `#[serde(with = "crate::num::serde_q")]`.
pub mod serde_q {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_q(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = String::deserialize(d)?;
        parse_q(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_parse_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12/8"] {
            let q = parse_q(s).unwrap();
            assert_eq!(parse_q(&format_q(&q)).unwrap(), q);
        }
        assert_eq!(format_q(&parse_q("-12/8").unwrap()), "-3/2");
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(q_floor_uint(&q_frac(7, 2)), BigUint::from(3u32));
        assert_eq!(q_ceil_usize(&q_frac(7, 2)).unwrap(), 4);
        assert_eq!(q_ceil_usize(&q_int(4)).unwrap(), 4);
    }

    #[test]
    fn epsilon_bounds() {
        assert!(check_epsilon(&q_frac(1, 2)).is_ok());
        assert!(check_epsilon(&q_int(1)).is_err());
        assert!(check_epsilon(&q_zero()).is_err());
    }
}
