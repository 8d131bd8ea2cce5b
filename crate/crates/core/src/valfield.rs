//! The model field and its absolute value.
//!
//! A [`Scalar`] is a finite sum `Σ a_i t^(e_i)` with rational exponents and
//! nonzero rational coefficients, plus a truncation order: every exponent at
//! or above `trunc` is unknown. `trunc = None` means the element is exact.
//! The absolute value is `|x| = 2^(-e_0)` for the least exponent `e_0`, so a
//! [`Mag`] is stored as that exponent (its valuation).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// A value of the absolute value: either `0` or `2^(-q)` for rational `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mag {
    Zero,
    /// `2^(-q)`; `q` is the valuation.
    Finite(Q),
}

impl Mag {
    pub fn one() -> Mag {
        Mag::Finite(Q::zero())
    }

    /// `2^(-v)`.
    pub fn from_val(v: Q) -> Mag {
        Mag::Finite(v)
    }

    /// `2^(-n/d)`.
    pub fn from_val_frac(n: i64, d: i64) -> Mag {
        Mag::Finite(rational::q(n, d))
    }

    pub fn val(&self) -> Option<&Q> {
        match self {
            Mag::Zero => None,
            Mag::Finite(q) => Some(q),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Mag::Zero)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        match (self, other) {
            (Mag::Finite(a), Mag::Finite(b)) => Mag::Finite(a + b),
            _ => Mag::Zero,
        }
    }

    pub fn div(&self, other: &Mag) -> Result<Mag> {
        match (self, other) {
            (_, Mag::Zero) => Err(Error::DivisionByZero),
            (Mag::Zero, _) => Ok(Mag::Zero),
            (Mag::Finite(a), Mag::Finite(b)) => Ok(Mag::Finite(a - b)),
        }
    }

    pub fn recip(&self) -> Result<Mag> {
        Mag::one().div(self)
    }

    pub fn powi(&self, n: i64) -> Result<Mag> {
        self.pow(&rational::qi(n))
    }

    /// `m^e`; exact because exponents are rational.
    pub fn pow(&self, e: &Q) -> Result<Mag> {
        match self {
            Mag::Finite(q) => Ok(Mag::Finite(q * e)),
            Mag::Zero if e.is_positive() => Ok(Mag::Zero),
            Mag::Zero => Err(Error::ZeroToNonpositivePower),
        }
    }

    pub fn pow_usize(&self, n: usize) -> Mag {
        if n == 0 {
            return Mag::one();
        }
        self.pow(&rational::qi(n as i64)).expect("positive power")
    }

    pub fn max<'a>(&'a self, other: &'a Mag) -> &'a Mag {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Non-authoritative floating point rendering.
    pub fn to_f64(&self) -> f64 {
        match self {
            Mag::Zero => 0.0,
            Mag::Finite(q) => {
                let (n, d) = (q.numer().to_string(), q.denom().to_string());
                let v = n.parse::<f64>().unwrap_or(f64::NAN) / d.parse::<f64>().unwrap_or(f64::NAN);
                (-v).exp2()
            }
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Mag::Zero, Mag::Zero) => Ordering::Equal,
            (Mag::Zero, _) => Ordering::Less,
            (_, Mag::Zero) => Ordering::Greater,
            // larger valuation means smaller magnitude
            (Mag::Finite(a), Mag::Finite(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mag::Zero => write!(f, "0"),
            Mag::Finite(q) => write!(f, "2^({})", -q),
        }
    }
}

/// A truncated generalized power series in `t` with rational exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: Vec<(Q, Q)>,
    trunc: Option<Q>,
}

fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if a < b { a } else { b }),
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { terms: Vec::new(), trunc: None }
    }

    pub fn one() -> Scalar {
        Scalar::from_rational(Q::one())
    }

    pub fn from_rational(c: Q) -> Scalar {
        Scalar::monomial(c, Q::zero())
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rational(rational::qi(n))
    }

    /// `c · t^e`.
    pub fn monomial(c: Q, e: Q) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: vec![(e, c)], trunc: None }
    }

    /// `t^e`.
    pub fn t_pow(e: Q) -> Scalar {
        Scalar::monomial(Q::one(), e)
    }

    /// Builds a scalar from `(exponent, coefficient)` pairs in any order;
    /// like exponents are combined and zero or unknown terms dropped.
    pub fn from_terms<I>(terms: I, trunc: Option<Q>) -> Scalar
    where
        I: IntoIterator<Item = (Q, Q)>,
    {
        let mut acc: BTreeMap<Q, Q> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert_with(Q::zero) += c;
        }
        Scalar::from_map(acc, trunc)
    }

    fn from_map(acc: BTreeMap<Q, Q>, trunc: Option<Q>) -> Scalar {
        let terms = acc
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && trunc.as_ref().map_or(true, |t| e < t))
            .collect();
        Scalar { terms, trunc }
    }

    pub fn terms(&self) -> &[(Q, Q)] {
        &self.terms
    }

    pub fn trunc(&self) -> Option<&Q> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    /// All known terms vanish (exactly zero, or zero up to the truncation).
    pub fn vanishes_to_trunc(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent that is known or could be present: the leading
    /// exponent, or `trunc` when no term is known; `None` for exact zero.
    fn low(&self) -> Option<Q> {
        match self.terms.first() {
            Some((e, _)) => Some(e.clone()),
            None => self.trunc.clone(),
        }
    }

    pub fn leading(&self) -> Option<&(Q, Q)> {
        self.terms.first()
    }

    pub fn mag(&self) -> Result<Mag> {
        match (self.terms.first(), &self.trunc) {
            (Some((e, _)), _) => Ok(Mag::Finite(e.clone())),
            (None, None) => Ok(Mag::Zero),
            (None, Some(_)) => Err(Error::IndeterminateMag),
        }
    }

    /// An upper bound for `|x|` that is always available: the magnitude when
    /// determinate, otherwise `2^(-trunc)`.
    pub fn mag_upper(&self) -> Mag {
        match (self.terms.first(), &self.trunc) {
            (Some((e, _)), _) => Mag::Finite(e.clone()),
            (None, None) => Mag::Zero,
            (None, Some(t)) => Mag::Finite(t.clone()),
        }
    }

    /// Lowers the truncation order (never raises it).
    pub fn truncate(&self, order: &Q) -> Scalar {
        let trunc = min_opt(self.trunc.clone(), Some(order.clone()));
        let limit = trunc.clone().expect("just set");
        Scalar {
            terms: self.terms.iter().filter(|(e, _)| *e < limit).cloned().collect(),
            trunc,
        }
    }

    pub fn scale(&self, c: &Q) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Multiplication by `t^e`.
    pub fn shift(&self, e: &Q) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(x, a)| (x + e, a.clone())).collect(),
            trunc: self.trunc.as_ref().map(|t| t + e),
        }
    }

    pub fn add_ref(&self, other: &Scalar) -> Scalar {
        let trunc = min_opt(self.trunc.clone(), other.trunc.clone());
        let mut acc: BTreeMap<Q, Q> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            *acc.entry(e.clone()).or_insert_with(Q::zero) += c;
        }
        Scalar::from_map(acc, trunc)
    }

    pub fn neg_ref(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn sub_ref(&self, other: &Scalar) -> Scalar {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Scalar::zero();
        }
        // x = X + O(t^tx), y = Y + O(t^ty): the product is known below
        // min(tx + low(y), ty + low(x)).
        let a = self.trunc.as_ref().map(|t| t + other.low().expect("nonzero"));
        let b = other.trunc.as_ref().map(|t| t + self.low().expect("nonzero"));
        let trunc = min_opt(a, b);
        if let Some(x) = self.mul_small_exponents(other, &trunc) {
            return x;
        }
        let mut acc: BTreeMap<Q, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if let Some(t) = &trunc {
                    if &e >= t {
                        // terms of `other` are increasing
                        break;
                    }
                }
                *acc.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        Scalar::from_map(acc, trunc)
    }

    /// `mul_ref` with exponents scaled to integers over a common denominator,
    /// when everything fits in `i64`; saves a gcd per term pair.
    fn mul_small_exponents(&self, other: &Scalar, trunc: &Option<Q>) -> Option<Scalar> {
        let dens = self.terms.iter().chain(&other.terms).map(|(e, _)| e.denom()).chain(trunc.iter().map(|t| t.denom()));
        let mut l: i64 = 1;
        for d in dens {
            let d = d.to_i64()?;
            l = l.checked_mul(d / l.gcd(&d))?;
        }
        let scaled = |e: &Q| -> Option<i64> { (e.numer().to_i64()?).checked_mul(l / e.denom().to_i64()?) };
        let xs: Vec<i64> = self.terms.iter().map(|(e, _)| scaled(e)).collect::<Option<_>>()?;
        let ys: Vec<i64> = other.terms.iter().map(|(e, _)| scaled(e)).collect::<Option<_>>()?;
        let cut = match trunc {
            Some(t) => Some(scaled(t)?),
            None => None,
        };
        let bound = i64::MAX / 4;
        if xs.iter().chain(&ys).any(|x| x.abs() > bound) {
            return None;
        }
        let mut acc: BTreeMap<i64, Q> = BTreeMap::new();
        for (x, (_, c1)) in xs.iter().zip(&self.terms) {
            for (y, (_, c2)) in ys.iter().zip(&other.terms) {
                let e = x + y;
                if cut.map_or(false, |t| e >= t) {
                    break;
                }
                match acc.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c1 * c2);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => *o.get_mut() += c1 * c2,
                }
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Q::new(e.into(), l.into()), c))
            .collect();
        Some(Scalar { terms, trunc: trunc.clone() })
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// `1/x` by geometric series, known below `order` (or exactly, for an
    /// exact monomial).
    pub fn inv(&self, order: &Q) -> Result<Scalar> {
        let (v, c) = match self.terms.first() {
            Some(lead) => lead.clone(),
            None if self.trunc.is_none() => return Err(Error::DivisionByZero),
            None => return Err(Error::IndeterminateMag),
        };
        let c_inv = c.recip();
        if self.terms.len() == 1 && self.trunc.is_none() {
            return Ok(Scalar::monomial(c_inv, -v));
        }
        // x = c t^v (1 + u), |u| < 1; relative precision of x is trunc - v,
        // and the absolute precision of 1/x is that minus v.
        let mut limit = order.clone();
        if let Some(t) = &self.trunc {
            let rel = t - &v - &v;
            if rel < limit {
                limit = rel;
            }
        }
        // u known below trunc - v
        let u = Scalar {
            terms: self.terms[1..]
                .iter()
                .map(|(e, a)| (e - &v, a * &c_inv))
                .collect(),
            trunc: self.trunc.as_ref().map(|t| t - &v),
        };
        // 1/(1+u) known below limit + v
        let rel_limit = &limit + &v;
        let neg_u = u.neg_ref().truncate(&rel_limit);
        let mut sum = Scalar::one().truncate(&rel_limit);
        let mut power = Scalar::one().truncate(&rel_limit);
        loop {
            power = power.mul_ref(&neg_u).truncate(&rel_limit);
            if power.terms.is_empty() {
                break;
            }
            sum = sum.add_ref(&power);
        }
        Ok(sum.shift(&-v).scale(&c_inv))
    }

    /// Exact comparison when decidable: `Some(true)` if certainly distinct,
    /// `Some(false)` if certainly equal, `None` when truncation hides it.
    pub fn certainly_ne(&self, other: &Scalar) -> Option<bool> {
        let d = self.sub_ref(other);
        match d.mag() {
            Ok(Mag::Zero) => Some(false),
            Ok(_) => Some(true),
            Err(_) => None,
        }
    }
}

/// Canonical element of magnitude `m`: `t^q` for `m = 2^(-q)`, `0` for zero.
pub fn sample_point(m: &Mag) -> Scalar {
    match m {
        Mag::Zero => Scalar::zero(),
        Mag::Finite(q) => Scalar::t_pow(q.clone()),
    }
}

/// `m^e` for a magnitude and a rational power.
pub fn mag_pow(m: &Mag, e: &Q) -> Result<Mag> {
    m.pow(e)
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_ref(rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.sub_ref(rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_ref(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.add_ref(&rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.sub_ref(&rhs)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.mul_ref(&rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && self.trunc.is_none() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})t^({e})")?;
            }
        }
        if let Some(t) = &self.trunc {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(t^({t}))")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn tq(n: i64, d: i64) -> Scalar {
        Scalar::t_pow(q(n, d))
    }

    #[test]
    fn mag_examples() {
        assert_eq!((&tq(1, 2) + &tq(1, 1)).mag().unwrap(), Mag::from_val_frac(1, 2));
        assert_eq!(Scalar::zero().mag().unwrap(), Mag::Zero);
        let x = &Scalar::monomial(qi(3), q(1, 3)) - &tq(1, 3);
        assert_eq!(x.terms(), &[(q(1, 3), qi(2))]);
        assert_eq!(x.mag().unwrap(), Mag::from_val_frac(1, 3));
        let indet = Scalar::from_terms(vec![], Some(qi(2)));
        assert_eq!(indet.mag(), Err(Error::IndeterminateMag));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!((&tq(1, 2) + &tq(1, 3)).mag().unwrap(), Mag::from_val_frac(1, 3));
        assert_eq!((&tq(1, 2) * &tq(1, 3)).mag().unwrap(), Mag::from_val_frac(5, 6));
        let x = &(&Scalar::one() + &tq(1, 1)) - &Scalar::one();
        assert_eq!(x, tq(1, 1));
        assert_eq!(x.mag().unwrap(), Mag::from_val_frac(1, 1));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Scalar::one().inv(&qi(5)).unwrap(), Scalar::one());
        let x = &Scalar::one() + &tq(1, 1);
        let inv = x.inv(&qi(2)).unwrap();
        assert_eq!(inv, Scalar::from_terms(vec![(qi(0), qi(1)), (qi(1), qi(-1))], Some(qi(2))));
        assert_eq!(tq(1, 1).inv(&qi(2)).unwrap(), tq(-1, 1));
        assert_eq!(Scalar::zero().inv(&qi(1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_of_shifted_point() {
        // 1/(t^(1/2) + t) = t^(-1/2) (1 - t^(1/2) + t - ...)
        let x = &tq(1, 2) + &tq(1, 1);
        let inv = x.inv(&qi(2)).unwrap();
        let prod = &x * &inv;
        assert_eq!(prod.terms(), &[(qi(0), qi(1))]);
        assert!(prod.trunc().unwrap() >= &q(3, 2));
    }

    #[test]
    fn mag_pow_examples() {
        assert_eq!(mag_pow(&Mag::from_val_frac(1, 1), &q(1, 2)).unwrap(), Mag::from_val_frac(1, 2));
        assert_eq!(mag_pow(&Mag::from_val_frac(3, 1), &q(1, 3)).unwrap(), Mag::from_val_frac(1, 1));
        assert_eq!(mag_pow(&Mag::from_val_frac(2, 3), &qi(3)).unwrap(), Mag::from_val_frac(2, 1));
        assert_eq!(mag_pow(&Mag::Zero, &qi(0)), Err(Error::ZeroToNonpositivePower));
        assert_eq!(mag_pow(&Mag::Zero, &qi(2)).unwrap(), Mag::Zero);
    }

    #[test]
    fn sample_points() {
        assert_eq!(sample_point(&Mag::from_val_frac(1, 2)), tq(1, 2));
        assert_eq!(sample_point(&Mag::Zero), Scalar::zero());
        assert_eq!(sample_point(&Mag::one()), Scalar::one());
    }

    #[test]
    fn mag_order() {
        assert!(Mag::Zero < Mag::from_val_frac(100, 1));
        assert!(Mag::from_val_frac(2, 1) < Mag::from_val_frac(1, 1));
        assert!(Mag::from_val_frac(-1, 1) > Mag::one());
    }

    #[test]
    fn truncated_product_tracks_order() {
        let x = Scalar::from_terms(vec![(qi(1), qi(1))], Some(qi(3)));
        let y = Scalar::from_terms(vec![(qi(0), qi(2))], Some(qi(2)));
        let p = &x * &y;
        // min(3 + 0, 2 + 1)
        assert_eq!(p.trunc(), Some(&qi(3)));
        assert_eq!(p.terms(), &[(qi(1), qi(2))]);
    }
}
