//! Finite-stage tables for the disk seminorm families `D⁺(zₙ, r^(1/kₙ))`:
//! regularity products, per-stage `ζ`/`ξ`, monotone curves in `r`, the
//! radius solver inverting `ξ`, and test functions with prescribed zeros.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::prescribe::{make_plan, prescribe, Prescription, StagePlan, Target};
use crate::rational::{qi, Q};
use crate::series::{PowerSeries, Recentered, Region};
use crate::valfield::{sample_point, Mag, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskFamily {
    pub centers: Vec<Scalar>,
    pub weights: Vec<u32>,
    pub base_r: Mag,
}

impl DiskFamily {
    pub fn new(centers: Vec<Scalar>, weights: Vec<u32>, base_r: Mag) -> Result<DiskFamily> {
        if centers.len() != weights.len() {
            return Err(Error::LengthMismatch(format!("{} centers, {} weights", centers.len(), weights.len())));
        }
        if weights.iter().any(|&k| k == 0) {
            return Err(Error::Invalid("weights must be positive".into()));
        }
        if base_r.is_zero() || base_r >= Mag::one() {
            return Err(Error::Invalid("base radius must lie in (0,1)".into()));
        }
        let fam = DiskFamily { centers, weights, base_r };
        for (z, r) in fam.centers.iter().zip(fam.radii()) {
            let m = z.mag()?;
            if m >= Mag::one() {
                return Err(Error::CenterOutsideDisk);
            }
            if r >= m {
                return Err(Error::DiskNotInCircle);
            }
        }
        Ok(fam)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// `rₙ = r^(1/kₙ)`.
    pub fn radii(&self) -> Vec<Mag> {
        self.weights
            .iter()
            .map(|&k| self.base_r.pow(&Q::new(1.into(), k.into())).expect("positive radius"))
            .collect()
    }

    /// Same centers and weights at another base radius.
    pub fn with_base(&self, r: Mag) -> Result<DiskFamily> {
        DiskFamily::new(self.centers.clone(), self.weights.clone(), r)
    }

    /// Closed disks pairwise disjoint: `|zₙ - zₘ| > max(rₙ, rₘ)`.
    pub fn disjoint(&self) -> Result<bool> {
        let radii = self.radii();
        for i in 0..self.len() {
            for j in 0..i {
                let d = self.centers[i].sub_ref(&self.centers[j]).mag()?;
                if d <= radii[i].clone().max(radii[j].clone()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityTable {
    /// `Π_{m≠n, m≤N} |zₙ - zₘ|^(kₘ)`.
    pub products: Vec<Mag>,
    /// Running minimum of `products`.
    pub running_inf: Vec<Mag>,
}

pub fn regularity_products(centers: &[Scalar], weights: &[u32], horizon: usize) -> Result<RegularityTable> {
    if centers.len() != weights.len() {
        return Err(Error::LengthMismatch(format!("{} centers, {} weights", centers.len(), weights.len())));
    }
    let n = horizon.min(centers.len());
    let mut dist = vec![vec![Mag::one(); n]; n];
    for i in 0..n {
        for j in 0..i {
            let d = centers[i].sub_ref(&centers[j]).mag()?;
            if d.is_zero() {
                return Err(Error::DuplicateCenters);
            }
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    let products: Vec<Mag> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .fold(Mag::one(), |acc, j| acc.mul(&dist[i][j].pow_usize(weights[j] as usize)))
        })
        .collect();
    let mut running_inf = Vec::with_capacity(n);
    let mut cur: Option<Mag> = None;
    for p in &products {
        let next = match cur {
            Some(c) if c <= *p => c,
            _ => p.clone(),
        };
        running_inf.push(next.clone());
        cur = Some(next);
    }
    Ok(RegularityTable { products, running_inf })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub n: usize,
    pub radius: Mag,
    pub zeta: Mag,
    pub xi: Mag,
    pub prefactor: Mag,
    /// Zeros of `f` in `D⁺(zₙ, rₙ)`.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSummary {
    pub zeta_min: Option<Mag>,
    pub zeta_max: Option<Mag>,
    pub xi_min: Option<Mag>,
    pub xi_max: Option<Mag>,
    pub zeta_nondecreasing: bool,
    pub zeta_nonincreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageReport {
    pub records: Vec<StageRecord>,
    pub summary: StageSummary,
}

fn summarize(records: &[StageRecord]) -> StageSummary {
    let zs: Vec<&Mag> = records.iter().map(|r| &r.zeta).collect();
    let xs: Vec<&Mag> = records.iter().map(|r| &r.xi).collect();
    StageSummary {
        zeta_min: zs.iter().min().map(|m| (*m).clone()),
        zeta_max: zs.iter().max().map(|m| (*m).clone()),
        xi_min: xs.iter().min().map(|m| (*m).clone()),
        xi_max: xs.iter().max().map(|m| (*m).clone()),
        zeta_nondecreasing: zs.windows(2).all(|w| w[0] <= w[1]),
        zeta_nonincreasing: zs.windows(2).all(|w| w[0] >= w[1]),
    }
}

/// Per-stage `ζ`, `ξ` and prefactor; `ζ = prefactor·ξ` and the two
/// independent computations of `ξ` are checked on every record.
pub fn stage_values(f: &PowerSeries, fam: &DiskFamily) -> Result<StageReport> {
    stage_values_at(f, &fam.centers, &fam.radii())
}

/// [`stage_values`] for arbitrary per-stage radii.
pub fn stage_values_at(f: &PowerSeries, centers: &[Scalar], radii: &[Mag]) -> Result<StageReport> {
    if centers.len() != radii.len() {
        return Err(Error::LengthMismatch("centers and radii must align".into()));
    }
    let recentered: Vec<Recentered> = centers.iter().map(|z| f.recenter(z)).collect::<Result<_>>()?;
    report(&recentered, radii)
}

fn report(recentered: &[Recentered], radii: &[Mag]) -> Result<StageReport> {
    let mut records = Vec::with_capacity(recentered.len());
    for (n, (rc, r)) in recentered.iter().zip(radii.iter().cloned()).enumerate() {
        let zeta = rc.disk_norm(&r)?;
        let xi = rc.xi(&r)?;
        let prefactor = rc.prefactor()?;
        if prefactor.mul(&xi) != zeta {
            return Err(Error::VerificationFailed(format!("stage {n}: zeta differs from prefactor times xi")));
        }
        if rc.xi_by_distances(&r)? != xi {
            return Err(Error::VerificationFailed(format!("stage {n}: xi from distances differs")));
        }
        let count = rc.count(&Region::ClosedDisk(r.clone()))?;
        records.push(StageRecord { n, radius: r, zeta, xi, prefactor, count });
    }
    let summary = summarize(&records);
    Ok(StageReport { records, summary })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveTable {
    pub grid: Vec<Mag>,
    /// `columns[g]` is the stage report at `grid[g]`.
    pub columns: Vec<StageReport>,
}

impl CurveTable {
    /// Stage `n`'s `ζ` across the grid.
    pub fn row(&self, n: usize) -> Vec<&Mag> {
        self.columns.iter().map(|c| &c.records[n].zeta).collect()
    }
}

/// Stage tables along an increasing grid of base radii; each stage's `ζ`
/// must be nondecreasing in `r`.
pub fn curve(f: &PowerSeries, centers: &[Scalar], weights: &[u32], grid: &[Mag]) -> Result<CurveTable> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("grid must be strictly increasing".into()));
    }
    let recentered: Vec<Recentered> = centers.iter().map(|z| f.recenter(z)).collect::<Result<_>>()?;
    let mut columns = Vec::with_capacity(grid.len());
    for r in grid {
        let fam = DiskFamily::new(centers.to_vec(), weights.to_vec(), r.clone())?;
        columns.push(report(&recentered, &fam.radii())?);
    }
    for n in 0..centers.len() {
        for w in columns.windows(2) {
            if w[0].records[n].zeta > w[1].records[n].zeta {
                return Err(Error::VerificationFailed(format!("stage {n}: zeta decreases along the grid")));
            }
        }
    }
    Ok(CurveTable { grid: grid.to_vec(), columns })
}

/// The `s` with `ξ_{D⁺(center, s)}(f) = target`: on each piece between
/// consecutive zero distances `ξ` is `s^A · const`, so the solve is linear in
/// exponents. Ties resolve to the largest `s`.
pub fn solve_radius(f: &PowerSeries, center: &Scalar, target: &Mag) -> Result<Mag> {
    let radius = center.mag()?;
    let tv = match target {
        Mag::Finite(v) => v.clone(),
        Mag::Zero => return Err(Error::TargetOutOfRange),
    };
    let dists = f.circle_zero_distances(center)?;
    if dists.is_empty() {
        return Err(Error::TargetOutOfRange);
    }
    // value of Π d^m over all distances >= a cutoff index, in valuations
    let val = |m: &Mag| -> Option<Q> { m.val().cloned() };
    let inner: Vec<&(Mag, usize)> = dists.iter().filter(|(d, _)| d < &radius).collect();
    if inner.is_empty() {
        // every circle zero at distance R: ξ is flat on (0, R) with no
        // largest solution, so report R² from the flat range
        let s = radius.pow_usize(2);
        return if &f.xi(center, &s)? == target { Ok(s) } else { Err(Error::TargetOutOfRange) };
    }
    let far_const = |from: usize| -> Option<Q> {
        let mut c = Q::zero();
        for (d, m) in &dists[from..] {
            c += val(d)? * qi(*m as i64);
        }
        Some(c)
    };
    // pieces [d_i, d_{i+1}) for the distances below R, searched from the top
    let mut acc = 0usize;
    let mut pieces = Vec::new();
    for (i, (d, m)) in inner.iter().enumerate() {
        acc += m;
        let hi = inner.get(i + 1).map_or(radius.clone(), |(e, _)| e.clone());
        pieces.push((i, d.clone(), hi, acc));
    }
    for (i, lo, hi, a) in pieces.into_iter().rev() {
        // far part: every distance past index i (including those at R)
        let c = match far_const(i + 1) {
            Some(c) => c,
            None => continue,
        };
        let s_val = (&tv - c) / qi(a as i64);
        let s = Mag::from_val(s_val);
        if s >= lo && s < hi {
            let check = f.xi(center, &s)?;
            if &check != target {
                return Err(Error::VerificationFailed("solved radius does not reproduce the target".into()));
            }
            return Ok(s);
        }
    }
    Err(Error::TargetOutOfRange)
}

/// A normalized test function with `kₙ` simple zeros near each `zₙ`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub series: PowerSeries,
    pub prescription: Prescription,
    pub plan: StagePlan,
    /// Minimum regularity product over the family.
    pub m: Mag,
}

impl TestFunction {
    /// `T = min rₙ^(Tₙ)` with `Tₙ = Σ_{|zₙ - zₘ| <= rₙ} kₘ`.
    pub fn t_bound(&self, fam: &DiskFamily) -> Result<Mag> {
        let radii = fam.radii();
        let mut best: Option<Mag> = None;
        for (n, r) in radii.iter().enumerate() {
            let mut tn = 0usize;
            for (m, z) in fam.centers.iter().enumerate() {
                if &fam.centers[n].sub_ref(z).mag()? <= r {
                    tn += fam.weights[m] as usize;
                }
            }
            let v = r.pow_usize(tn);
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(best.unwrap_or_else(Mag::one))
    }
}

/// Builds `f` with `‖f‖ = 1` having `kₙ` simple zeros in `D⁺(zₙ, δₙ)` and no
/// other zeros on the circles `C(0, |zₙ|)`: each slot `zₙ + j·uₙ`,
/// `|uₙ| = δₙ/2`, becomes a target of tolerance `δₙ/4`.
pub fn build_test_function(centers: &[Scalar], weights: &[u32], deltas: &[Mag], stages: usize) -> Result<TestFunction> {
    if centers.len() != weights.len() || centers.len() != deltas.len() {
        return Err(Error::LengthMismatch("centers, weights and deltas must align".into()));
    }
    let mut targets = Vec::new();
    for ((z, &k), d) in centers.iter().zip(weights).zip(deltas) {
        let dv = d.val().ok_or_else(|| Error::Invalid("zero tolerance".into()))?;
        let u = sample_point(&Mag::from_val(dv + qi(1)));
        let eps = Mag::from_val(dv + qi(2));
        for j in 0..k {
            let c = z.add_ref(&u.mul_ref(&Scalar::from_int(j as i64)));
            targets.push(Target { center: c, eps: eps.clone() });
        }
    }
    let prescription = Prescription::new(targets)?;
    let plan = make_plan(&prescription, stages, &[])?;
    let f = prescribe(&prescription, &plan)?;
    let series = match f.gauss_norm()?.value {
        Mag::Finite(v) => f.scale(&Scalar::t_pow(-v)),
        Mag::Zero => return Err(Error::ZeroSeries),
    };
    let table = regularity_products(centers, weights, centers.len())?;
    let m = table.running_inf.last().cloned().unwrap_or_else(Mag::one);
    Ok(TestFunction { series, prescription, plan, m })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjointified {
    pub centers: Vec<Scalar>,
    /// `|wᵢ - wⱼ| = max(rᵢ, rⱼ, |zᵢ - zⱼ|)` checked for every pair.
    pub pairwise_ok: bool,
}

/// Moves clustered centers onto `C(zₙ, rₙ)` so that the open disks
/// `D⁻(wₙ, rₙ)` are pairwise disjoint while each closed disk is unchanged.
pub fn disjointify(centers: &[Scalar], radii: &[Mag]) -> Result<Disjointified> {
    if centers.len() != radii.len() {
        return Err(Error::LengthMismatch("centers and radii must align".into()));
    }
    let n = centers.len();
    let meets = |i: usize, j: usize| -> Result<bool> {
        let d = centers[i].sub_ref(&centers[j]).mag()?;
        Ok(d <= radii[i].clone().max(radii[j].clone()))
    };
    let want = |i: usize, j: usize| -> Result<Mag> {
        let d = centers[i].sub_ref(&centers[j]).mag()?;
        Ok(d.max(radii[i].clone()).max(radii[j].clone()))
    };
    let mut out: Vec<Scalar> = Vec::with_capacity(n);
    for i in 0..n {
        let clustered = (0..n).filter(|&j| j != i).any(|j| meets(i, j).unwrap_or(true));
        if !clustered {
            out.push(centers[i].clone());
            continue;
        }
        let step = sample_point(&radii[i]);
        let mut chosen = None;
        for c in 1..=(n as i64 + 2) {
            let w = centers[i].add_ref(&step.mul_ref(&Scalar::from_int(c)));
            let mut ok = true;
            for (j, wj) in out.iter().enumerate() {
                if w.sub_ref(wj).mag()? != want(i, j)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                chosen = Some(w);
                break;
            }
        }
        out.push(chosen.ok_or_else(|| Error::VerificationFailed("no admissible shift".into()))?);
    }
    let mut pairwise_ok = true;
    for i in 0..n {
        for j in 0..i {
            if out[i].sub_ref(&out[j]).mag()? != want(i, j)? {
                pairwise_ok = false;
            }
        }
    }
    Ok(Disjointified { centers: out, pairwise_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::series::ZeroProfile;

    fn tq(n: i64, d: i64) -> Scalar {
        Scalar::t_pow(q(n, d))
    }

    fn m(n: i64, d: i64) -> Mag {
        Mag::from_val_frac(n, d)
    }

    #[test]
    fn regularity_examples() {
        let a = tq(1, 2);
        let b = &tq(1, 2) + &tq(1, 1);
        let t = regularity_products(&[a.clone(), b.clone()], &[1, 1], 2).unwrap();
        assert_eq!(t.products, vec![m(1, 1), m(1, 1)]);
        let t = regularity_products(&[a.clone(), b], &[1, 2], 2).unwrap();
        assert_eq!(t.products, vec![m(2, 1), m(1, 1)]);
        assert_eq!(t.running_inf, vec![m(2, 1), m(2, 1)]);
        let eight: Vec<Scalar> = (0..8)
            .map(|j| &tq(1, 14) + &Scalar::monomial(qi(j), q(1, 7)))
            .collect();
        let t = regularity_products(&eight, &[1; 8], 8).unwrap();
        assert!(t.products.iter().all(|p| *p == m(1, 1)));
        assert_eq!(regularity_products(&[a.clone(), a], &[1, 1], 2), Err(Error::DuplicateCenters));
    }

    #[test]
    fn stage_values_trivial_and_single_zero() {
        let centers = vec![tq(1, 2), tq(1, 3)];
        let fam = DiskFamily::new(centers.clone(), vec![1, 1], m(2, 1)).unwrap();
        let rep = stage_values(&PowerSeries::one(), &fam).unwrap();
        assert!(rep.records.iter().all(|r| r.zeta == Mag::one() && r.xi == Mag::one()));
        let prof = ZeroProfile::new(Scalar::one(), centers.iter().map(|c| (c.clone(), 1)).collect());
        let f = prof.to_series(&qi(8)).unwrap();
        let rep = stage_values(&f, &fam).unwrap();
        assert!(rep.records.iter().all(|r| r.xi == m(2, 1) && r.count == 1));
    }

    #[test]
    fn solve_radius_examples() {
        let c = tq(1, 2);
        // zeros at distances 2^-1 and 2^-2 on the circle 2^-(1/2)
        let w1 = &c + &tq(1, 1);
        let w2 = &c + &tq(2, 1);
        let f = ZeroProfile::new(Scalar::one(), vec![(w1, 1), (w2, 1)]).to_series(&qi(8)).unwrap();
        assert_eq!(solve_radius(&f, &c, &m(5, 2)).unwrap(), m(3, 2));
        let g = ZeroProfile::new(Scalar::one(), vec![(&c + &tq(2, 1), 1)]).to_series(&qi(8)).unwrap();
        assert_eq!(solve_radius(&g, &c, &m(2, 1)).unwrap(), m(2, 1));
        assert_eq!(solve_radius(&g, &c, &m(1, 4)), Err(Error::TargetOutOfRange));
    }

    #[test]
    fn test_function_single_center() {
        let tf = build_test_function(&[tq(1, 2)], &[1], &[m(3, 1)], 2).unwrap();
        assert_eq!(tf.series.gauss_norm().unwrap().value, Mag::one());
        assert_eq!(tf.series.count_zeros_near(&tq(1, 2), &Region::ClosedDisk(m(3, 1))).unwrap(), 1);
    }

    #[test]
    fn disjointify_examples() {
        let a = tq(1, 2);
        let b = tq(1, 3);
        let d = disjointify(&[a.clone(), b.clone()], &[m(2, 1), m(2, 1)]).unwrap();
        assert_eq!(d.centers, vec![a.clone(), b]);
        let d = disjointify(&[a.clone(), a.clone()], &[m(2, 1), m(2, 1)]).unwrap();
        assert!(d.pairwise_ok);
        assert_eq!(d.centers[0].sub_ref(&d.centers[1]).mag().unwrap(), m(2, 1));
        let d = disjointify(&[a.clone(), a.clone(), a.clone()], &vec![m(2, 1); 3]).unwrap();
        assert!(d.pairwise_ok);
        for i in 0..3 {
            assert_eq!(d.centers[i].sub_ref(&a).mag().unwrap(), m(2, 1));
        }
    }
}
