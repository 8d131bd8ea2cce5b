//! Bounded power series on the open unit disk.
//!
//! A [`PowerSeries`] stores the coefficients `a_0..a_N` and a bound
//! `|a_n| <= tail` for every `n > N` (`tail = 0` for polynomials). All
//! questions about a radius `r` reduce to the dominant term analysis of
//! `max_n |a_n| r^n`: the result is certified when the known terms strictly
//! dominate every truncated coefficient and the tail at that radius.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::valfield::{Mag, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Scalar>,
    tail: Mag,
}

/// What is known about `|a_n|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffMag {
    Exact(Mag),
    AtMost(Mag),
}

/// Result of the dominant term analysis at one radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dominant {
    /// `M_r(f) = max_n |a_n| r^n`.
    pub max: Mag,
    /// Smallest index attaining the max.
    pub mu: usize,
    /// Greatest index attaining the max.
    pub nu: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussNorm {
    pub value: Mag,
    /// `false` when truncated data could still exceed `value`, which is then
    /// only a lower bound.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalRadius {
    pub radius: Mag,
    pub mu: usize,
    pub nu: usize,
    pub count: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonData {
    /// Lower hull vertices `(n, v(a_n))`.
    pub vertices: Vec<(usize, Q)>,
    /// Critical radii in `(0, 1)`, increasing.
    pub radii: Vec<CriticalRadius>,
}

impl NewtonData {
    /// Counts per radius, restricted to certified radii.
    pub fn counts(&self) -> Vec<(Mag, usize)> {
        self.radii
            .iter()
            .filter(|c| c.certified)
            .map(|c| (c.radius.clone(), c.count))
            .collect()
    }

    pub fn count_at(&self, r: &Mag) -> usize {
        self.radii
            .iter()
            .find(|c| &c.radius == r)
            .map_or(0, |c| c.count)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Circle(Mag),
    ClosedDisk(Mag),
    OpenDisk(Mag),
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Scalar>, tail: Mag) -> PowerSeries {
        PowerSeries { coeffs, tail }
    }

    pub fn polynomial(coeffs: Vec<Scalar>) -> PowerSeries {
        let mut p = PowerSeries { coeffs, tail: Mag::Zero };
        p.trim();
        p
    }

    pub fn from_rationals(coeffs: &[i64]) -> PowerSeries {
        PowerSeries::polynomial(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    pub fn one() -> PowerSeries {
        PowerSeries::polynomial(vec![Scalar::one()])
    }

    /// `1 - z/w`; exact when `1/w` is, otherwise known below `order`.
    pub fn one_minus_over(w: &Scalar, order: &Q) -> Result<PowerSeries> {
        let inv = w.inv(order)?;
        Ok(PowerSeries::polynomial(vec![Scalar::one(), inv.neg_ref()]))
    }

    /// `z - w`.
    pub fn linear(w: &Scalar) -> PowerSeries {
        PowerSeries::polynomial(vec![w.neg_ref(), Scalar::one()])
    }

    fn trim(&mut self) {
        if self.tail.is_zero() {
            while self.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
                self.coeffs.pop();
            }
        }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn tail(&self) -> &Mag {
        &self.tail
    }

    pub fn is_polynomial(&self) -> bool {
        self.tail.is_zero()
    }

    /// Degree of the stored part (`None` for the empty polynomial).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, n: usize) -> Scalar {
        self.coeffs.get(n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff_mag(&self, n: usize) -> CoeffMag {
        let c = self.coeff(n);
        match c.mag() {
            Ok(m) => CoeffMag::Exact(m),
            Err(_) => CoeffMag::AtMost(c.mag_upper()),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.tail.is_zero() && self.coeffs.iter().all(Scalar::is_exact_zero)
    }

    pub fn scale(&self, c: &Scalar) -> PowerSeries {
        let tail = match c.mag() {
            Ok(m) => self.tail.mul(&m),
            Err(_) => self.tail.mul(&c.mag_upper()),
        };
        PowerSeries::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect(), tail)
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let limit = match (self.is_polynomial(), other.is_polynomial()) {
            (true, true) => n,
            (true, false) => other.coeffs.len(),
            (false, true) => self.coeffs.len(),
            (false, false) => self.coeffs.len().min(other.coeffs.len()),
        };
        let coeffs: Vec<Scalar> = (0..limit).map(|i| self.coeff(i).add_ref(&other.coeff(i))).collect();
        let mut tail = self.tail.clone().max(other.tail.clone());
        for i in limit..n {
            let m = self.coeff(i).add_ref(&other.coeff(i)).mag_upper();
            tail = tail.max(m);
        }
        let mut p = PowerSeries::new(coeffs, tail);
        p.trim();
        p
    }

    /// Product; coefficients past the shorter stored part of a non-polynomial
    /// factor are folded into the tail bound `‖f‖·‖g‖`.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            if self.is_polynomial() && other.is_polynomial() {
                return PowerSeries::polynomial(Vec::new());
            }
        }
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let limit = match (self.is_polynomial(), other.is_polynomial()) {
            (true, true) => full,
            (true, false) => other.coeffs.len(),
            (false, true) => self.coeffs.len(),
            (false, false) => self.coeffs.len().min(other.coeffs.len()),
        };
        let mut coeffs = vec![Scalar::zero(); limit];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= limit {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= limit {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(b));
            }
        }
        let tail = if self.is_polynomial() && other.is_polynomial() {
            Mag::Zero
        } else {
            self.gauss_upper().mul(&other.gauss_upper())
        };
        let mut p = PowerSeries::new(coeffs, tail);
        p.trim();
        p
    }

    /// `z^k · f`.
    pub fn shift_up(&self, k: usize) -> PowerSeries {
        let mut coeffs = vec![Scalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        PowerSeries::new(coeffs, self.tail.clone())
    }

    /// An upper bound for the Gauss norm that is always available.
    pub fn gauss_upper(&self) -> Mag {
        self.coeffs
            .iter()
            .map(Scalar::mag_upper)
            .fold(self.tail.clone(), |acc, m| acc.max(m))
    }

    /// `‖f‖ = sup_n |a_n|`.
    pub fn gauss_norm(&self) -> Result<GaussNorm> {
        let mut known = Mag::Zero;
        let mut bound = self.tail.clone();
        let mut any_exact = false;
        for n in 0..self.coeffs.len() {
            match self.coeff_mag(n) {
                CoeffMag::Exact(m) => {
                    any_exact = true;
                    if m > known {
                        known = m;
                    }
                }
                CoeffMag::AtMost(m) => {
                    if m > bound {
                        bound = m;
                    }
                }
            }
        }
        if known.is_zero() && !bound.is_zero() && !any_exact {
            return Err(Error::IndeterminateMag);
        }
        Ok(GaussNorm { certified: known >= bound, value: known })
    }

    /// Dominant term analysis at radius `r > 0`.
    pub fn dominant(&self, r: &Mag) -> Result<Dominant> {
        if r.is_zero() {
            return Err(Error::Invalid("radius must be positive".into()));
        }
        let mut max = Mag::Zero;
        let mut mu = 0;
        let mut nu = 0;
        let mut bounds: Vec<Mag> = Vec::new();
        for n in 0..self.coeffs.len() {
            let rn = r.pow_usize(n);
            match self.coeff_mag(n) {
                CoeffMag::Exact(m) => {
                    let v = m.mul(&rn);
                    if v.is_zero() {
                        continue;
                    }
                    if v > max {
                        max = v;
                        mu = n;
                        nu = n;
                    } else if v == max {
                        nu = n;
                    }
                }
                CoeffMag::AtMost(m) => bounds.push(m.mul(&rn)),
            }
        }
        if !self.tail.is_zero() {
            bounds.push(self.tail.mul(&r.pow_usize(self.coeffs.len())));
        }
        if max.is_zero() {
            return Err(if bounds.is_empty() { Error::ZeroSeries } else { Error::UncertifiedRadius });
        }
        if bounds.iter().any(|b| b >= &max) {
            return Err(Error::UncertifiedRadius);
        }
        Ok(Dominant { max, mu, nu })
    }

    /// Newton polygon: lower convex hull of `(n, v(a_n))` and the critical
    /// radii in `(0,1)` it determines.
    pub fn newton(&self) -> Result<NewtonData> {
        let pts: Vec<(usize, Q)> = (0..self.coeffs.len())
            .filter_map(|n| match self.coeff_mag(n) {
                CoeffMag::Exact(Mag::Finite(v)) => Some((n, v)),
                _ => None,
            })
            .collect();
        if pts.is_empty() {
            return Err(if self.is_exact_zero() { Error::ZeroSeries } else { Error::IndeterminateMag });
        }
        let hull = lower_hull(&pts);
        let mut radii = Vec::new();
        for w in hull.windows(2) {
            let (i, vi) = &w[0];
            let (j, vj) = &w[1];
            let rho = (vi - vj) / rational::qi((j - i) as i64);
            if rho <= Q::zero() {
                continue;
            }
            let radius = Mag::from_val(rho);
            let certified = self.dominant(&radius).map(|d| d.mu == *i && d.nu == *j).unwrap_or(false);
            radii.push(CriticalRadius { radius, mu: *i, nu: *j, count: j - i, certified });
        }
        Ok(NewtonData { vertices: hull, radii })
    }

    /// Zeros (with multiplicity) in a circle or disk centered at `0`.
    pub fn count_zeros(&self, region: &Region) -> Result<usize> {
        match region {
            Region::Circle(r) => {
                let d = self.dominant(r)?;
                Ok(d.nu - d.mu)
            }
            Region::ClosedDisk(r) => Ok(self.dominant(r)?.nu),
            Region::OpenDisk(r) => Ok(self.dominant(r)?.mu),
        }
    }

    /// Zeros in a disk (or circle) around `center`.
    pub fn count_zeros_near(&self, center: &Scalar, region: &Region) -> Result<usize> {
        self.translate(center)?.count_zeros(region)
    }

    /// `f(z0)`; terms beyond the stored part widen the truncation.
    pub fn eval(&self, z0: &Scalar) -> Result<Scalar> {
        let m0 = z0.mag()?;
        if m0 >= Mag::one() {
            return Err(Error::CenterOutsideDisk);
        }
        let mut acc = Scalar::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul_ref(z0).add_ref(a);
        }
        if let Mag::Finite(g) = &self.tail {
            if let Mag::Finite(v0) = &m0 {
                let order = g + v0 * rational::qi(self.coeffs.len() as i64);
                acc = acc.truncate(&order);
            }
        }
        Ok(acc)
    }

    /// Recentering: `f(z) = Σ b_m (z - z0)^m`.
    pub fn translate(&self, z0: &Scalar) -> Result<PowerSeries> {
        let m0 = z0.mag()?;
        if m0 >= Mag::one() {
            return Err(Error::CenterOutsideDisk);
        }
        if self.coeffs.is_empty() {
            return Ok(self.clone());
        }
        // Horner in the shifted variable: b <- b·(w + z0) + a_n
        let n = self.coeffs.len();
        let mut b: Vec<Scalar> = Vec::with_capacity(n);
        for a in self.coeffs.iter().rev() {
            let mut next = vec![Scalar::zero(); b.len() + 1];
            for (k, bk) in b.iter().enumerate() {
                next[k + 1] = next[k + 1].add_ref(bk);
                next[k] = next[k].add_ref(&bk.mul_ref(z0));
            }
            next[0] = next[0].add_ref(a);
            b = next;
        }
        if let (Mag::Finite(g), Mag::Finite(v0)) = (&self.tail, &m0) {
            // Σ_{n>N} C(n,m) a_n z0^(n-m) has magnitude <= tail·|z0|^(N+1-m)
            for (m, bm) in b.iter_mut().enumerate() {
                let order = g + v0 * rational::qi((n - m) as i64);
                *bm = bm.truncate(&order);
            }
        }
        let mut p = PowerSeries::new(b, self.tail.clone());
        p.trim();
        Ok(p)
    }

    /// Recentering keeping only the first `order` coefficients; the dropped
    /// ones are absorbed into the tail bound.
    pub fn translate_to_order(&self, z0: &Scalar, order: usize) -> Result<PowerSeries> {
        let full = self.translate(z0)?;
        if full.coeffs.len() <= order {
            return Ok(full);
        }
        let tail = full.coeffs[order..]
            .iter()
            .map(Scalar::mag_upper)
            .fold(full.tail.clone(), |acc, m| acc.max(m));
        Ok(PowerSeries::new(full.coeffs[..order].to_vec(), tail))
    }

    /// Sup-norm over the closed disk `D+(center, r)`.
    pub fn disk_norm(&self, center: &Scalar, r: &Mag) -> Result<Mag> {
        if r >= &Mag::one() {
            return Err(Error::Invalid("disk radius must be < 1".into()));
        }
        if r.is_zero() {
            return self.point_mag(center);
        }
        self.recenter(center)?.disk_norm(r)
    }

    /// `|f(z0)|`.
    pub fn point_mag(&self, z0: &Scalar) -> Result<Mag> {
        self.eval(z0)?.mag()
    }

    /// `|a_ν| R^μ` at `R = |center|`: the factor with `|f| = prefactor · Π|z - w|`
    /// over the zeros `w` on the circle through `center`.
    pub fn prefactor(&self, center: &Scalar) -> Result<Mag> {
        let radius = center.mag()?;
        let d = self.dominant(&radius)?;
        d.max.div(&radius.pow_usize(d.nu - d.mu))
    }

    fn check_circle_disk(center: &Scalar, r: &Mag) -> Result<Mag> {
        let radius = center.mag()?;
        if radius >= Mag::one() {
            return Err(Error::CenterOutsideDisk);
        }
        if r.is_zero() || r >= &radius {
            return Err(Error::DiskNotInCircle);
        }
        Ok(radius)
    }

    /// The local zero factor of the disk `D+(center, r) ⊂ C(0,|center|)`,
    /// computed coefficient-side as `disk_norm / prefactor`.
    pub fn xi(&self, center: &Scalar, r: &Mag) -> Result<Mag> {
        Self::check_circle_disk(center, r)?;
        self.recenter(center)?.xi(r)
    }

    /// The local zero factor computed from the distances of the circle zeros
    /// to `center`, read off the Newton data of the recentered series:
    /// `r^#{d <= r} · Π_{d > r} d`.
    pub fn xi_by_distances(&self, center: &Scalar, r: &Mag) -> Result<Mag> {
        let radius = Self::check_circle_disk(center, r)?;
        let df = self.dominant(&radius)?;
        if df.nu == df.mu {
            return Ok(Mag::one());
        }
        self.recenter(center)?.xi_by_distances(r)
    }

    /// Dominant data at `lo`, at every hull radius strictly between, and at
    /// `hi`, checked for consistency (`ν` at one point equals `μ` at the next,
    /// so no zeros hide between consecutive radii).
    fn certified_chain(&self, lo: &Mag, hi: &Mag) -> Result<Vec<(Mag, Dominant)>> {
        let nd = self.newton()?;
        let mut pts = vec![lo.clone()];
        for c in &nd.radii {
            if &c.radius > lo && &c.radius < hi {
                pts.push(c.radius.clone());
            }
        }
        pts.push(hi.clone());
        let mut out: Vec<(Mag, Dominant)> = Vec::with_capacity(pts.len());
        for p in pts {
            let d = self.dominant(&p)?;
            if let Some((_, prev)) = out.last() {
                if prev.nu != d.mu {
                    return Err(Error::UncertifiedRadius);
                }
            }
            out.push((p, d));
        }
        Ok(out)
    }

    /// Distances from `center` to the zeros on `C(0,|center|)`, as
    /// `(distance, multiplicity)` increasing; distance `0` means a zero at
    /// the center itself.
    pub fn circle_zero_distances(&self, center: &Scalar) -> Result<Vec<(Mag, usize)>> {
        let radius = center.mag()?;
        if radius.is_zero() || radius >= Mag::one() {
            return Err(Error::CenterOutsideDisk);
        }
        if self.dominant(&radius)?.nu == self.dominant(&radius)?.mu {
            return Ok(Vec::new());
        }
        self.recenter(center)?.circle_zero_distances()
    }

    /// `f` re-expanded around `center`, for repeated queries at many radii.
    pub fn recenter(&self, center: &Scalar) -> Result<Recentered<'_>> {
        Ok(Recentered { f: self, center: center.clone(), g: self.translate(center)? })
    }
}

/// A series together with its expansion around a fixed center; the
/// translation is the expensive step, so it is done once.
#[derive(Clone, Debug)]
pub struct Recentered<'a> {
    f: &'a PowerSeries,
    center: Scalar,
    g: PowerSeries,
}

impl Recentered<'_> {
    pub fn center(&self) -> &Scalar {
        &self.center
    }

    /// The expansion `g(x) = f(center + x)`.
    pub fn series(&self) -> &PowerSeries {
        &self.g
    }

    pub fn disk_norm(&self, r: &Mag) -> Result<Mag> {
        if r >= &Mag::one() {
            return Err(Error::Invalid("disk radius must be < 1".into()));
        }
        if r.is_zero() {
            return self.f.point_mag(&self.center);
        }
        Ok(self.g.dominant(r)?.max)
    }

    pub fn prefactor(&self) -> Result<Mag> {
        self.f.prefactor(&self.center)
    }

    pub fn count(&self, region: &Region) -> Result<usize> {
        self.g.count_zeros(region)
    }

    pub fn xi(&self, r: &Mag) -> Result<Mag> {
        PowerSeries::check_circle_disk(&self.center, r)?;
        self.disk_norm(r)?.div(&self.prefactor()?)
    }

    pub fn xi_by_distances(&self, r: &Mag) -> Result<Mag> {
        let radius = PowerSeries::check_circle_disk(&self.center, r)?;
        let df = self.f.dominant(&radius)?;
        if df.nu == df.mu {
            return Ok(Mag::one());
        }
        let chain = self.g.certified_chain(r, &radius)?;
        let mut value = r.pow_usize(chain.first().expect("nonempty").1.nu);
        for (d, dom) in &chain[1..] {
            let mut c = dom.nu - dom.mu;
            if d == &radius {
                // zeros inside D-(0,R) sit at distance exactly R from center
                c -= df.mu;
            }
            value = value.mul(&d.pow_usize(c));
        }
        Ok(value)
    }

    /// See [`PowerSeries::circle_zero_distances`].
    pub fn circle_zero_distances(&self) -> Result<Vec<(Mag, usize)>> {
        let radius = self.center.mag()?;
        if radius.is_zero() || radius >= Mag::one() {
            return Err(Error::CenterOutsideDisk);
        }
        let df = self.f.dominant(&radius)?;
        if df.nu == df.mu {
            return Ok(Vec::new());
        }
        let g = &self.g;
        let nd = g.newton()?;
        let n0 = nd.vertices.first().expect("nonempty").0;
        for n in 0..n0 {
            if !matches!(g.coeff_mag(n), CoeffMag::Exact(Mag::Zero)) {
                return Err(Error::UncertifiedRadius);
            }
        }
        let mut out = Vec::new();
        if n0 > 0 {
            out.push((Mag::Zero, n0));
        }
        let mut expect_mu = n0;
        for c in nd.radii.iter().filter(|c| c.radius < radius) {
            if !c.certified || c.mu != expect_mu {
                return Err(Error::UncertifiedRadius);
            }
            out.push((c.radius.clone(), c.count));
            expect_mu = c.nu;
        }
        let dr = g.dominant(&radius)?;
        if dr.mu != expect_mu {
            return Err(Error::UncertifiedRadius);
        }
        let at_r = (dr.nu - dr.mu)
            .checked_sub(df.mu)
            .ok_or_else(|| Error::VerificationFailed("inconsistent circle zero count".into()))?;
        if at_r > 0 {
            out.push((radius, at_r));
        }
        Ok(out)
    }
}

/// Lower convex hull of points sorted by `x`; collinear interior points are
/// dropped so each edge keeps only its extreme indices.
fn lower_hull(pts: &[(usize, Q)]) -> Vec<(usize, Q)> {
    let mut hull: Vec<(usize, Q)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // keep b only if the turn a -> b -> p is strictly convex
            let lhs = (&b.1 - &a.1) * rational::qi((p.0 - b.0) as i64);
            let rhs = (&p.1 - &b.1) * rational::qi((b.0 - a.0) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull
}

/// A function given by its value at the origin (or leading coefficient when
/// the origin is a zero) and its finite multiset of zeros in the disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroProfile {
    pub unit: Scalar,
    pub zeros: Vec<(Scalar, u32)>,
}

impl ZeroProfile {
    pub fn new(unit: Scalar, zeros: Vec<(Scalar, u32)>) -> ZeroProfile {
        ZeroProfile { unit, zeros }
    }

    pub fn unit_mag(&self) -> Result<Mag> {
        self.unit.mag()
    }

    pub fn origin_order(&self) -> u32 {
        self.zeros.iter().filter(|(w, _)| w.is_exact_zero()).map(|(_, m)| m).sum()
    }

    /// Circle radii and zero counts, increasing, excluding the origin.
    pub fn circles(&self) -> Result<Vec<(Mag, usize)>> {
        let mut out: Vec<(Mag, usize)> = Vec::new();
        for (w, m) in &self.zeros {
            let r = w.mag()?;
            if r.is_zero() {
                continue;
            }
            match out.iter_mut().find(|(s, _)| *s == r) {
                Some(e) => e.1 += *m as usize,
                None => out.push((r, *m as usize)),
            }
        }
        out.sort();
        Ok(out)
    }

    /// `unit · z^m0 · Π (1 - z/w)^m`, expanded.
    pub fn to_series(&self, order: &Q) -> Result<PowerSeries> {
        let mut p = PowerSeries::polynomial(vec![self.unit.clone()]);
        let mut origin = 0usize;
        for (w, m) in &self.zeros {
            if w.is_exact_zero() {
                origin += *m as usize;
                continue;
            }
            if w.mag()? >= Mag::one() {
                return Err(Error::CenterOutsideDisk);
            }
            let factor = PowerSeries::one_minus_over(w, order)?;
            for _ in 0..*m {
                p = p.mul(&factor);
            }
        }
        Ok(p.shift_up(origin))
    }

    /// `|f(z)|` from the zero data alone.
    pub fn circle_value(&self, z: &Scalar) -> Result<Mag> {
        let rz = z.mag()?;
        let circles = self.circles()?;
        let mut value = self.unit_mag()?.mul(&rz.pow_usize(self.origin_order() as usize));
        let mut inner = 0usize;
        for (r, m) in &circles {
            if r > &rz {
                break;
            }
            value = value.div(&r.pow_usize(*m))?;
            if r == &rz {
                value = value.mul(&rz.pow_usize(inner));
                for (w, mult) in &self.zeros {
                    if &w.mag()? == r {
                        let d = z.sub_ref(w).mag()?;
                        value = value.mul(&d.pow_usize(*mult as usize));
                    }
                }
                return Ok(value);
            }
            inner += m;
        }
        Ok(value.mul(&rz.pow_usize(inner)))
    }

    /// The local zero factor from its definition, using the zeros directly.
    pub fn xi(&self, center: &Scalar, r: &Mag) -> Result<Mag> {
        let radius = center.mag()?;
        if r.is_zero() || r >= &radius {
            return Err(Error::DiskNotInCircle);
        }
        let mut inside = 0usize;
        let mut far = Mag::one();
        let mut any = false;
        for (w, m) in &self.zeros {
            if w.mag()? != radius {
                continue;
            }
            any = true;
            let d = center.sub_ref(w).mag()?;
            if &d <= r {
                inside += *m as usize;
            } else {
                far = far.mul(&d.pow_usize(*m as usize));
            }
        }
        if !any {
            return Ok(Mag::one());
        }
        Ok(r.pow_usize(inside).mul(&far))
    }
}

impl Default for PowerSeries {
    fn default() -> Self {
        PowerSeries::one()
    }
}

/// Convenience: `Σ c_i z^i` with `t`-monomial coefficients `(coeff, exponent)`.
pub fn poly_from_monomials(terms: &[(Q, Q)]) -> PowerSeries {
    PowerSeries::polynomial(terms.iter().map(|(c, e)| Scalar::monomial(c.clone(), e.clone())).collect())
}
