mod common;

use common::{from_zeros, known};
use nonarch::rational::{q, qi};
use nonarch::semlab::{curve, disjointify, regularity_products, solve_radius, stage_values, stage_values_at, DiskFamily};
use nonarch::{Error, Mag, Scalar, Q};
use num_traits::Zero;
use proptest::prelude::*;

/// Centers on the circle `2^(-1/2)`, some pairs close together.
fn centers() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::btree_set((1i64..=4, prop::option::of(1i64..=6)), 1..=5).prop_map(|set| {
        set.into_iter()
            .map(|(c, near)| {
                let base = Scalar::monomial(qi(c), q(1, 2));
                match near {
                    Some(h) => &base + &Scalar::t_pow(q(1, 2) + q(h, 3)),
                    None => base,
                }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Schedules with `rₙ^(kₙ) = sₙ^(kₙ)` at every stage give identical tables:
    /// weights `k` at base `r` against weights `2k` at base `r²`.
    #[test]
    fn matched_schedules_give_identical_tables(k in known(5), cs in centers(), e in 1i64..=6) {
        let weights: Vec<u32> = cs.iter().enumerate().map(|(i, _)| 1 + (i as u32 % 3)).collect();
        let doubled: Vec<u32> = weights.iter().map(|w| 2 * w).collect();
        let r = Mag::from_val(q(1, 2) * qi(3) + q(e, 2));
        let a = DiskFamily::new(cs.clone(), weights, r.clone()).unwrap();
        let b = DiskFamily::new(cs, doubled, r.pow_usize(2)).unwrap();
        prop_assert_eq!(a.radii(), b.radii());
        prop_assert_eq!(stage_values(&k.series, &a).unwrap(), stage_values(&k.series, &b).unwrap());
    }

    #[test]
    fn regularity_products_by_brute_force(cs in centers(), ws in prop::collection::vec(1u32..=3, 5)) {
        let ws = &ws[..cs.len()];
        let t = regularity_products(&cs, ws, cs.len()).unwrap();
        for n in 0..cs.len() {
            let mut v = Q::zero();
            for m in 0..cs.len() {
                if m != n {
                    v += cs[n].sub_ref(&cs[m]).mag().unwrap().val().unwrap() * qi(ws[m] as i64);
                }
            }
            prop_assert_eq!(&t.products[n], &Mag::from_val(v));
            let inf = t.products[..=n].iter().min().unwrap();
            prop_assert_eq!(&t.running_inf[n], inf);
        }
    }

    /// Disjointified centers keep every closed disk, so `ζ` is unchanged, and
    /// the open disks no longer meet.
    #[test]
    fn disjointify_keeps_disks(k in known(5), cs in centers(), e in 1i64..=6) {
        let radii: Vec<Mag> = cs.iter().map(|_| Mag::from_val(q(1, 2) + q(e, 3))).collect();
        let d = disjointify(&cs, &radii).unwrap();
        prop_assert!(d.pairwise_ok);
        for (i, (z, w)) in cs.iter().zip(&d.centers).enumerate() {
            prop_assert!(z.sub_ref(w).mag().unwrap() <= radii[i]);
            prop_assert_eq!(k.series.disk_norm(z, &radii[i]).unwrap(), k.series.disk_norm(w, &radii[i]).unwrap());
            for (j, x) in d.centers.iter().enumerate().take(i) {
                prop_assert!(w.sub_ref(x).mag().unwrap() >= radii[i].clone().max(radii[j].clone()));
            }
        }
    }

    #[test]
    fn curves_are_monotone(k in known(6), cs in centers()) {
        let weights = vec![1u32; cs.len()];
        let grid: Vec<Mag> = (1..=6).rev().map(|j| Mag::from_val(q(1, 2) + q(j, 2))).collect();
        let t = curve(&k.series, &cs, &weights, &grid).unwrap();
        for n in 0..cs.len() {
            let row = t.row(n);
            prop_assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn solver_hits_piece_boundaries(k in known(6), pick in any::<prop::sample::Index>()) {
        // targets equal to ξ at each circle-zero distance
        let w = k.zeros[pick.index(k.zeros.len())].clone();
        let z = &w + &Scalar::t_pow(w.mag().unwrap().val().unwrap() + q(1, 2));
        for (d, _) in k.series.circle_zero_distances(&z).unwrap() {
            if d.is_zero() || d >= z.mag().unwrap() {
                continue;
            }
            let tau = k.profile.xi(&z, &d).unwrap();
            let s = solve_radius(&k.series, &z, &tau).unwrap();
            prop_assert_eq!(k.series.xi(&z, &s).unwrap(), tau);
            prop_assert!(s >= d);
        }
    }
}

#[test]
fn stage_table_of_a_single_zero() {
    let z = Scalar::t_pow(q(1, 2));
    let f = from_zeros(vec![&z + &Scalar::t_pow(qi(2))]).series;
    let rep = stage_values_at(&f, &[z.clone()], &[Mag::from_val(qi(1))]).unwrap();
    let r = &rep.records[0];
    assert_eq!(r.count, 1);
    assert_eq!(r.xi, Mag::from_val(qi(1)));
    assert_eq!(r.zeta, r.prefactor.mul(&r.xi));
    // below the zero's distance ξ is the distance itself
    let rep = stage_values_at(&f, &[z], &[Mag::from_val(qi(3))]).unwrap();
    assert_eq!(rep.records[0].xi, Mag::from_val(qi(2)));
    assert_eq!(rep.records[0].count, 0);
}

#[test]
fn family_radii_must_stay_inside_the_circle() {
    let z = Scalar::t_pow(q(1, 2));
    assert_eq!(DiskFamily::new(vec![z], vec![1], Mag::from_val(q(1, 4))).unwrap_err(), Error::DiskNotInCircle);
}
