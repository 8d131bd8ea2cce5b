//! Exact comparison of real linear combinations of magnitudes.
//!
//! A combination `Σ c_i · 2^(e_i)` with rational `c_i` and rational `e_i` is
//! rewritten over `x = 2^(1/L)`, `L` the common denominator of the
//! exponents, as `Σ_{j<L} C_j x^j` with dyadic `C_j`. Since `y^L - 2` is
//! irreducible over the rationals, the combination vanishes iff every `C_j`
//! does; otherwise its sign is found by interval evaluation of the `x^j`
//! from integer `L`-th roots, refining until the interval excludes zero.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Q;
use crate::valfield::Mag;

/// A formal real-valued combination of magnitudes.
#[derive(Clone, Debug, Default)]
pub struct MagSum {
    terms: Vec<(Q, Q)>,
}

impl MagSum {
    pub fn new() -> MagSum {
        MagSum::default()
    }

    /// Adds `c · m`.
    pub fn push(&mut self, c: Q, m: &Mag) -> &mut Self {
        if let Mag::Finite(v) = m {
            if !c.is_zero() {
                self.terms.push((c, -v.clone()));
            }
        }
        self
    }

    pub fn plus(mut self, m: &Mag) -> Self {
        self.push(Q::one(), m);
        self
    }

    pub fn minus(mut self, m: &Mag) -> Self {
        self.push(-Q::one(), m);
        self
    }

    pub fn sign(&self) -> Ordering {
        sign_of(&self.terms)
    }
}

/// `a` compared with `b` as real numbers, where both are sums of magnitudes.
pub fn compare_sums(a: &[Mag], b: &[Mag]) -> Ordering {
    let mut s = MagSum::new();
    for m in a {
        s.push(Q::one(), m);
    }
    for m in b {
        s.push(-Q::one(), m);
    }
    s.sign()
}

fn sign_of(terms: &[(Q, Q)]) -> Ordering {
    if terms.is_empty() {
        return Ordering::Equal;
    }
    let l: BigInt = terms
        .iter()
        .fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
    let l_u32 = l.to_u32().expect("exponent denominators too large");
    let mut coeffs: Vec<Q> = vec![Q::zero(); l_u32 as usize];
    for (c, e) in terms {
        let k = (e * Q::from_integer(l.clone())).to_integer();
        let (a, j) = k.div_mod_floor(&l);
        let j = j.to_usize().expect("residue");
        let a = a.to_i64().expect("exponent too large");
        let pow2 = if a >= 0 {
            Q::from_integer(BigInt::one() << a as usize)
        } else {
            Q::new(BigInt::one(), BigInt::one() << (-a) as usize)
        };
        coeffs[j] += c * pow2;
    }
    if coeffs.iter().all(Zero::is_zero) {
        return Ordering::Equal;
    }
    let mut bits: u64 = 64;
    loop {
        let (lo, hi) = enclose(&coeffs, l_u32, bits);
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        bits *= 2;
    }
}

/// Interval enclosure of `Σ C_j 2^(j/L)` using `bits` fractional bits.
fn enclose(coeffs: &[Q], l: u32, bits: u64) -> (Q, Q) {
    let scale = BigInt::one() << bits as usize;
    let mut lo = Q::zero();
    let mut hi = Q::zero();
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (xl, xh) = if j == 0 {
            (Q::one(), Q::one())
        } else {
            // floor(2^(j/L + bits)) = floor((2^(j + bits·L))^(1/L))
            let radicand = BigUint::one() << (j as u64 + bits * l as u64) as usize;
            let root = BigInt::from(radicand.nth_root(l));
            (
                Q::new(root.clone(), scale.clone()),
                Q::new(root + 1, scale.clone()),
            )
        };
        if c.is_positive() {
            lo += c * xl;
            hi += c * xh;
        } else {
            lo += c * xh;
            hi += c * xl;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn m(n: i64, d: i64) -> Mag {
        Mag::from_val_frac(n, d)
    }

    #[test]
    fn equal_sums_detected_exactly() {
        // 2^(-1) + 2^(-1) = 2^0
        assert_eq!(compare_sums(&[m(1, 1), m(1, 1)], &[m(0, 1)]), Ordering::Equal);
        // 2^(-1/2) · 2 = 2^(1/2)
        assert_eq!(compare_sums(&[m(1, 2), m(1, 2)], &[m(-1, 2)]), Ordering::Equal);
    }

    #[test]
    fn strict_comparisons() {
        // 2^(-1/2) ≈ 0.7071 > 2^(-1/3)·... compare 2^(-1/2) with 2^(-1/3): smaller
        assert_eq!(compare_sums(&[m(1, 2)], &[m(1, 3)]), Ordering::Less);
        // 2^(-1/2) + 2^(-1/2) ≈ 1.414 > 2^(-1/3) + 2^(-1) ≈ 1.2937
        assert_eq!(compare_sums(&[m(1, 2), m(1, 2)], &[m(1, 3), m(1, 1)]), Ordering::Greater);
        // 2^(1/3) ≈ 1.2599 vs 2^(-1/3) + 2^(-3) + 2^(-4) ≈ 0.7937 + 0.1875 = 0.9812
        assert_eq!(compare_sums(&[m(-1, 3)], &[m(1, 3), m(3, 1), m(4, 1)]), Ordering::Greater);
    }

    #[test]
    fn zero_magnitudes_vanish() {
        assert_eq!(compare_sums(&[Mag::Zero], &[]), Ordering::Equal);
        assert_eq!(compare_sums(&[Mag::Zero], &[m(5, 1)]), Ordering::Less);
    }

    #[test]
    fn close_values_are_separated() {
        // 2^(1/12) ≈ 1.059463 vs 1 + 2^(-4) - 2^(-9) = 1.060546875 ... compare
        let mut s = MagSum::new();
        s.push(Q::one(), &m(-1, 12));
        s.push(-Q::one(), &m(0, 1));
        s.push(-Q::one(), &m(4, 1));
        s.push(q(1, 1), &m(9, 1));
        // 1.0594631 - 1.0605469 < 0
        assert_eq!(s.sign(), Ordering::Less);
    }
}
