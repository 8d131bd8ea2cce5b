//! Arbitrary precision rationals and their `num/den` string form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Always `num/den`, including integers (`3/1`).
pub fn to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn ceil_to_grid(x: &Q, denom: i64) -> Q {
    let scaled = x * qi(denom);
    Q::new(scaled.ceil().to_integer(), BigInt::from(denom))
}

pub fn floor_to_grid(x: &Q, denom: i64) -> Q {
    let scaled = x * qi(denom);
    Q::new(scaled.floor().to_integer(), BigInt::from(denom))
}

/// Simplest rational (smallest denominator, then smallest numerator) in the
/// closed interval `[lo, hi]`, for `0 <= lo <= hi`.
pub fn simplest_in(lo: &Q, hi: &Q) -> Q {
    assert!(!lo.is_negative() && lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // lo, hi share the integer part; recurse on reciprocals of the fractional parts
    let lo_f = lo - &fl;
    let hi_f = hi - &fl;
    let inner = simplest_in(&hi_f.recip(), &lo_f.recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        assert_eq!(parse("3/6").unwrap(), q(1, 2));
        assert_eq!(parse("-4").unwrap(), qi(-4));
        assert_eq!(to_string(&qi(3)), "3/1");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_in(&q(1, 3), &q(1, 2)), q(1, 2));
        assert_eq!(simplest_in(&q(3, 10), &q(7, 20)), q(1, 3));
        assert_eq!(simplest_in(&q(5, 7), &q(5, 7)), q(5, 7));
        assert_eq!(simplest_in(&q(0, 1), &q(1, 100)), q(0, 1));
        assert_eq!(simplest_in(&q(1, 101), &q(1, 100)), q(1, 100));
    }

    #[test]
    fn grids() {
        assert_eq!(ceil_to_grid(&q(1, 4), 6), q(1, 3));
        assert_eq!(floor_to_grid(&q(1, 4), 6), q(1, 6));
    }
}
