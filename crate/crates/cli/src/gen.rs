//! Seeded random instances. Exponents come from `{p/q : 1 <= p <= 12, q <= 6}`
//! and coefficients from small integers, so every failure replays from its seed.

use nonarch::prescribe::{make_plan, Prescription, Target};
use nonarch::rational::{q, qi};
use nonarch::{Error, Mag, PowerSeries, Scalar, ZeroProfile, Q};
use rand::Rng;

pub fn exponent<R: Rng>(rng: &mut R) -> Q {
    q(rng.gen_range(1..=12), rng.gen_range(1..=6))
}

/// An exponent in `(0, 1)` for radii of interesting circles.
pub fn small_exponent<R: Rng>(rng: &mut R) -> Q {
    let d = rng.gen_range(2..=6);
    q(rng.gen_range(1..d), d)
}

fn coeff<R: Rng>(rng: &mut R) -> Q {
    let c = rng.gen_range(1..=3);
    qi(if rng.gen_bool(0.5) { c } else { -c })
}

/// A point of the disk: `c₀ t^e` plus, sometimes, a higher-order term.
pub fn point<R: Rng>(rng: &mut R) -> Scalar {
    let e = small_exponent(rng);
    let mut x = Scalar::monomial(coeff(rng), e.clone());
    if rng.gen_bool(0.5) {
        x = &x + &Scalar::monomial(coeff(rng), &e + exponent(rng) / qi(2));
    }
    x
}

/// A point on the circle of `w` at distance `2^-(v(w)+h)`, `h > 0`.
pub fn nearby<R: Rng>(rng: &mut R, w: &Scalar) -> Scalar {
    let v = w.mag().expect("exact").val().expect("nonzero").clone();
    w + &Scalar::monomial(coeff(rng), v + exponent(rng) / qi(4))
}

/// A polynomial given both ways: as a zero profile and as the exact series
/// `u·Π(z - w)` with `|u| = 1/Π|w|`, so `|f(0)| = 1`.
#[derive(Clone, Debug)]
pub struct Sample {
    pub profile: ZeroProfile,
    pub series: PowerSeries,
}

pub fn sample<R: Rng>(rng: &mut R, max_factors: usize) -> Sample {
    let n = rng.gen_range(1..=max_factors);
    let mut zeros: Vec<Scalar> = Vec::new();
    while zeros.len() < n {
        let w = match zeros.len() {
            0 => point(rng),
            _ => match rng.gen_range(0..4) {
                0 => zeros[rng.gen_range(0..zeros.len())].clone(),
                1 => {
                    let base = zeros[rng.gen_range(0..zeros.len())].clone();
                    nearby(rng, &base)
                }
                _ => point(rng),
            },
        };
        zeros.push(w);
    }
    from_zeros(&zeros)
}

pub fn from_zeros(zeros: &[Scalar]) -> Sample {
    let total: Q = zeros.iter().map(|w| w.mag().unwrap().val().unwrap().clone()).sum();
    let u = Scalar::t_pow(-total);
    let mut series = PowerSeries::polynomial(vec![u.clone()]);
    let mut f0 = u;
    for w in zeros {
        series = series.mul(&PowerSeries::linear(w));
        f0 = f0.mul_ref(&w.neg_ref());
    }
    let mut grouped: Vec<(Scalar, u32)> = Vec::new();
    for w in zeros {
        match grouped.iter_mut().find(|(x, _)| x == w) {
            Some(e) => e.1 += 1,
            None => grouped.push((w.clone(), 1)),
        }
    }
    Sample { profile: ZeroProfile::new(f0, grouped), series }
}

/// Up to 4 circles with up to 3 targets each, tolerances `2^-q` with
/// `q <= 6`; redrawn until a plan with `stages` exists.
pub fn prescription<R: Rng>(rng: &mut R, stages: usize) -> (Prescription, u32) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let p = raw_prescription(rng);
        match make_plan(&p, stages, &[]) {
            Ok(_) => return (p, attempts),
            Err(Error::InfeasibleHorizon) => continue,
            Err(e) => panic!("generator produced an invalid prescription: {e}"),
        }
    }
}

fn raw_prescription<R: Rng>(rng: &mut R) -> Prescription {
    let n_circles = rng.gen_range(1..=4);
    let mut rhos: Vec<i64> = Vec::new();
    while rhos.len() < n_circles {
        let r = rng.gen_range(1..=24);
        if !rhos.contains(&r) {
            rhos.push(r);
        }
    }
    let mut targets = Vec::new();
    for r in rhos {
        let rho = q(r, 6);
        let k = rng.gen_range(1..=3);
        // smallest integer q with 2^-q below the circle, capped at 6
        let qmin = (r / 6 + 1).min(6);
        let qe = rng.gen_range(qmin..=6);
        for j in 0..k {
            let mut c = Scalar::monomial(qi(j + 1), rho.clone());
            if rng.gen_bool(0.3) {
                c = &c + &Scalar::t_pow(&rho + q(rng.gen_range(1..=6), 6) + qi(qe));
            }
            targets.push(Target { center: c, eps: Mag::from_val(qi(qe)) });
        }
    }
    Prescription::new(targets).expect("targets are disjoint by construction")
}
