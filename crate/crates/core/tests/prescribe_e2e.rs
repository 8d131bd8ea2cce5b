mod common;

use common::{point, scalar};
use nonarch::json;
use nonarch::prescribe::{
    extend_stage, make_plan, make_plan_for_norm, norm_target_select, plan_norm_exponent, prescribe, prescribe_stages,
    vandermonde_solve, verify_prescription, Prescription, Target,
};
use nonarch::rational::{q, qi};
use nonarch::{Error, Mag, PowerSeries, Region, Scalar, Q};
use num_traits::{One, Signed};
use proptest::prelude::*;

fn target(c: i64, rho: Q, eps: i64) -> Target {
    Target { center: Scalar::monomial(qi(c), rho), eps: Mag::from_val(qi(eps)) }
}

/// Four circles, two with two targets each.
fn four_circles() -> Prescription {
    Prescription::new(vec![
        target(1, qi(3), 4),
        target(1, qi(2), 3),
        target(2, qi(2), 3),
        target(1, q(3, 2), 3),
        target(1, q(1, 2), 2),
        target(3, q(1, 2), 2),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interpolant_reproduces_values(nodes in prop::collection::vec(point(), 1..=3), values in prop::collection::vec(scalar(), 3)) {
        let mut uniq: Vec<Scalar> = Vec::new();
        for n in nodes {
            if !uniq.contains(&n) {
                uniq.push(n);
            }
        }
        let values = &values[..uniq.len()];
        let order = qi(4);
        let coeffs = match vandermonde_solve(&uniq, values, &order) {
            Ok(c) => c,
            Err(Error::IndeterminatePivot) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let p = PowerSeries::polynomial(coeffs);
        for (x, y) in uniq.iter().zip(values) {
            let r = p.eval(x).unwrap().sub_ref(y);
            prop_assert!(r.vanishes_to_trunc());
        }
    }

    #[test]
    fn greedy_hits_targets(h in 4usize..=32, num in 1i64..=99) {
        let bounds: Vec<(Q, Q)> = (0..h as i64).map(|n| (q(1, 4 * (n + 2)), q(1, n + 2))).collect();
        let lo: Q = bounds.iter().map(|b| b.0.clone()).sum();
        let hi: Q = bounds.iter().map(|b| b.1.clone()).sum();
        let target = &lo + (&hi - &lo) * q(num, 100);
        let eps = q(1, 1024);
        let sel = norm_target_select(&bounds, &target, 1 << 20, &eps).unwrap();
        prop_assert!((&sel.sum - &target).abs() <= eps);
        for ((x, t), (a, b)) in sel.values.iter().zip(&sel.t).zip(&bounds) {
            prop_assert!(a <= x && x <= b);
            prop_assert_eq!(&(t * a + (Q::one() - t) * b), x);
        }
    }

    #[test]
    fn json_round_trips(x in scalar(), zs in prop::collection::vec(point(), 1..=3)) {
        prop_assert_eq!(json::parse_scalar(&json::scalar_json(&x).to_string()).unwrap(), x);
        let f = zs.iter().fold(PowerSeries::one(), |acc, w| acc.mul(&PowerSeries::linear(w)));
        prop_assert_eq!(json::parse_series(&json::series_json(&f).to_string()).unwrap(), f);
    }
}

#[test]
fn four_circle_prescription_end_to_end() {
    let p = four_circles();
    let plan = make_plan(&p, 3, &[]).unwrap();
    let stages = prescribe_stages(&p, &plan).unwrap();
    let f = stages.last().unwrap();
    let rep = verify_prescription(f, &p).unwrap();
    assert!(rep.all_pass, "{}", rep.summary());
    // log₂‖f‖ as predicted by the plan
    assert_eq!(f.gauss_norm().unwrap().value, Mag::from_val(-plan_norm_exponent(&p, &plan)));
    // coefficient bound 1/c³ on every stage
    let bound = Mag::from_val(-qi(3) * p.c_val());
    for s in &stages {
        for a in s.coeffs() {
            assert!(a.mag_upper() <= bound);
        }
    }
    // the plan and prescription survive the wire format
    assert_eq!(json::plan_from_value(&json::plan_json(&plan)).unwrap(), plan);
    assert_eq!(json::prescription_from_value(&json::prescription_json(&p)).unwrap(), p);
}

#[test]
fn forbidden_radius_is_avoided() {
    let p = four_circles();
    let plan = make_plan(&p, 3, &[]).unwrap();
    let forbidden = plan.separators.clone();
    let moved = make_plan(&p, 3, &forbidden).unwrap();
    assert!(moved.separators.iter().all(|s| !forbidden.contains(s)));
    let f = prescribe(&p, &moved).unwrap();
    let nd = f.newton().unwrap();
    assert!(forbidden.iter().all(|r| nd.count_at(r) == 0));
}

#[test]
fn norm_targeted_plan_lands_near_the_request() {
    let p = four_circles();
    let plan = make_plan(&p, 3, &[]).unwrap();
    let base = plan_norm_exponent(&p, &plan);
    let eps = q(1, 64);
    let want = &base + q(1, 10);
    let steered = make_plan_for_norm(&p, 3, &[], &want, 1 << 12, &eps).unwrap();
    let f = prescribe(&p, &steered).unwrap();
    let got = -f.gauss_norm().unwrap().value.val().unwrap().clone();
    assert!((got - want).abs() <= eps);
    assert!(verify_prescription(&f, &p).unwrap().all_pass);
}

#[test]
fn verify_rejects_wrong_functions() {
    let p = four_circles();
    let rep = verify_prescription(&PowerSeries::one(), &p).unwrap();
    assert!(!rep.all_pass && rep.targets.iter().all(|t| !t.pass));
    // one zero moved off its target disk, still on the right circle
    let mut zeros: Vec<Scalar> = p.targets().iter().map(|t| t.center.clone()).collect();
    zeros[1] = Scalar::monomial(qi(5), qi(2));
    let f = zeros.iter().fold(PowerSeries::one(), |acc, w| acc.mul(&PowerSeries::linear(w)));
    let rep = verify_prescription(&f, &p).unwrap();
    assert!(!rep.targets[1].pass);
    assert!(rep.targets.iter().enumerate().all(|(i, t)| i == 1 || t.pass));
}

#[test]
fn stage_extension_audits() {
    let a1 = Scalar::t_pow(qi(1));
    let a2 = Scalar::t_pow(q(1, 2));
    let a3 = Scalar::t_pow(q(1, 3));
    let order = qi(12);
    let p1 = PowerSeries::one_minus_over(&a1, &order).unwrap().mul(&PowerSeries::one_minus_over(&a2, &order).unwrap());
    let s = Mag::from_val(q(5, 12));
    let st = extend_stage(&p1, &[a2.clone()], &[a3.clone()], &s).unwrap();
    for a in [&a2, &a3] {
        assert!(st.p2.eval(a).unwrap().vanishes_to_trunc());
    }
    // the old zero is only kept up to its disk
    assert_eq!(st.p2.count_zeros_near(&a1, &Region::ClosedDisk(Mag::from_val(q(3, 2)))).unwrap(), 1);
    let counts: Vec<usize> = st.p2.newton().unwrap().counts().into_iter().map(|(_, k)| k).collect();
    assert_eq!(counts, vec![1, 1, 2, 1]);
    assert_eq!(st.p2.count_zeros(&Region::Circle(s)).unwrap(), 2);
}
