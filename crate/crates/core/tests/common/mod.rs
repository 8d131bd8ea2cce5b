//! Proptest strategies shared by the integration tests. Exponents are drawn
//! from `{p/q : 1 <= p <= 12, q <= 6}`, coefficients from small integers.
#![allow(dead_code)]

use nonarch::rational::{q, qi};
use nonarch::{Mag, PowerSeries, Scalar, ZeroProfile, Q};
use proptest::prelude::*;

pub fn exponent() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=6).prop_map(|(p, d)| q(p, d))
}

/// Exponent in `(0, 1)`.
pub fn small_exponent() -> impl Strategy<Value = Q> {
    (2i64..=6).prop_flat_map(|d| (1..d).prop_map(move |p| q(p, d)))
}

pub fn coeff() -> impl Strategy<Value = Q> {
    prop_oneof![(1i64..=3).prop_map(qi), (1i64..=3).prop_map(|c| qi(-c))]
}

/// Exact scalar with up to 4 terms and exponents in `[0, 2]`.
pub fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(((0i64..=12, 1i64..=6).prop_map(|(p, d)| q(p, d)), coeff()), 1..=4)
        .prop_map(|ts| Scalar::from_terms(ts, None))
        .prop_filter("nonzero", |x| !x.is_exact_zero())
}

/// A point of the open unit disk with `|x| = 2^-e`, `e ∈ (0,1)`.
pub fn point() -> impl Strategy<Value = Scalar> {
    (small_exponent(), coeff(), prop::option::of((coeff(), exponent()))).prop_map(|(e, c, extra)| {
        let mut x = Scalar::monomial(c, e.clone());
        if let Some((c2, h)) = extra {
            x = &x + &Scalar::monomial(c2, &e + h / qi(2));
        }
        x
    })
}

/// A polynomial with known zeros: `u·Π(z - w)` with `|f(0)| = 1`.
#[derive(Clone, Debug)]
pub struct Known {
    pub zeros: Vec<Scalar>,
    pub series: PowerSeries,
    pub profile: ZeroProfile,
}

pub fn from_zeros(zeros: Vec<Scalar>) -> Known {
    let total: Q = zeros.iter().map(|w| w.mag().unwrap().val().unwrap().clone()).sum();
    let u = Scalar::t_pow(-total);
    let mut series = PowerSeries::polynomial(vec![u.clone()]);
    let mut f0 = u;
    for w in &zeros {
        series = series.mul(&PowerSeries::linear(w));
        f0 = f0.mul_ref(&w.neg_ref());
    }
    let mut grouped: Vec<(Scalar, u32)> = Vec::new();
    for w in &zeros {
        match grouped.iter_mut().find(|(x, _)| x == w) {
            Some(e) => e.1 += 1,
            None => grouped.push((w.clone(), 1)),
        }
    }
    Known { zeros, series, profile: ZeroProfile::new(f0, grouped) }
}

/// Up to `n` zeros, with repeats and zeros close to earlier ones.
pub fn known(n: usize) -> impl Strategy<Value = Known> {
    prop::collection::vec((point(), 0u8..4, any::<prop::sample::Index>(), exponent(), coeff()), 1..=n).prop_map(
        |draws| {
            let mut zeros: Vec<Scalar> = Vec::new();
            for (p, kind, idx, h, c) in draws {
                let w = match (kind, zeros.is_empty()) {
                    (0, false) => zeros[idx.index(zeros.len())].clone(),
                    (1, false) => {
                        let base = &zeros[idx.index(zeros.len())];
                        let v = base.mag().unwrap().val().unwrap().clone();
                        base + &Scalar::monomial(c, v + h / qi(4))
                    }
                    _ => p,
                };
                zeros.push(w);
            }
            from_zeros(zeros)
        },
    )
}

pub fn mag_of(x: &Scalar) -> Mag {
    x.mag().unwrap()
}
