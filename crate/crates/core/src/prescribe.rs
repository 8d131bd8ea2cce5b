//! Staged construction of polynomials with one simple zero in each of a
//! family of prescribed disks, plus interpolation and norm targeting.
//!
//! A stage takes `P₁` (zeros on the inner and middle circles), pins new
//! zeros `A₃` on the outer circles and an anchor on a separator circle
//! `C(0,S)`, and returns `P₂ = P₁ + z^(L+1)·Q`, `L = deg P₁`. Every stage is
//! audited against its Newton polygon before it is accepted.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, q, qi, Q};
use crate::series::{CoeffMag, NewtonData, PowerSeries, Region};
use crate::valfield::{sample_point, Mag, Scalar};

/// How often the working truncation is doubled before giving up.
const MAX_ESCALATIONS: usize = 6;

fn div(a: &Scalar, b: &Scalar, order: &Q) -> Result<Scalar> {
    match b.mag() {
        Ok(Mag::Zero) => Err(Error::DivisionByZero),
        Ok(_) => Ok(a.mul_ref(&b.inv(order)?)),
        Err(_) => Err(Error::IndeterminatePivot),
    }
}

fn check_distinct(nodes: &[Scalar]) -> Result<()> {
    for i in 0..nodes.len() {
        for j in 0..i {
            match nodes[i].certainly_ne(&nodes[j]) {
                Some(true) => {}
                Some(false) => return Err(Error::DuplicateNodes),
                None => return Err(Error::IndeterminatePivot),
            }
        }
    }
    Ok(())
}

/// Coefficients `b₀..b_{n-1}` of the polynomial through `(nodes[i], values[i])`,
/// by Newton divided differences at working truncation `order`.
pub fn vandermonde_solve(nodes: &[Scalar], values: &[Scalar], order: &Q) -> Result<Vec<Scalar>> {
    if nodes.len() != values.len() {
        return Err(Error::LengthMismatch(format!("{} nodes, {} values", nodes.len(), values.len())));
    }
    check_distinct(nodes)?;
    let n = nodes.len();
    let mut c: Vec<Scalar> = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = c[i].sub_ref(&c[i - 1]);
            let den = nodes[i].sub_ref(&nodes[i - j]);
            c[i] = div(&num, &den, order)?;
        }
    }
    // Newton form to monomial basis
    let mut p: Vec<Scalar> = Vec::new();
    for k in (0..n).rev() {
        let mut next = vec![Scalar::zero(); p.len() + 1];
        for (i, pi) in p.iter().enumerate() {
            next[i + 1] = next[i + 1].add_ref(pi);
            next[i] = next[i].sub_ref(&pi.mul_ref(&nodes[k]));
        }
        next[0] = next[0].add_ref(&c[k]);
        p = next;
    }
    Ok(p)
}

/// One accepted stage.
#[derive(Clone, Debug)]
pub struct Stage {
    pub p2: PowerSeries,
    /// The interpolant: `P₂ = P₁ + z^(deg P₁ + 1)·Q`.
    pub q: PowerSeries,
    pub newton: NewtonData,
}

fn mag_of(x: &Scalar) -> Result<Mag> {
    x.mag()
}

fn grouped_radii(points: &[Scalar]) -> Result<Vec<(Mag, usize)>> {
    let mut out: Vec<(Mag, usize)> = Vec::new();
    for a in points {
        let r = mag_of(a)?;
        match out.iter_mut().find(|(s, _)| *s == r) {
            Some(e) => e.1 += 1,
            None => out.push((r, 1)),
        }
    }
    out.sort();
    Ok(out)
}

/// Starting truncation: twice the largest exponent involved. Too coarse a
/// start only costs a failed certification and a doubling.
fn default_order(points: &[Scalar], extra: &[Mag]) -> Q {
    let mut largest = Q::one();
    for v in points.iter().filter_map(|a| a.mag().ok()).chain(extra.iter().cloned()) {
        if let Mag::Finite(v) = v {
            if v.abs() > largest {
                largest = v.abs();
            }
        }
    }
    qi(2) * largest
}

fn escalates(e: &Error) -> bool {
    matches!(
        e,
        Error::IndeterminateMag | Error::IndeterminatePivot | Error::UncertifiedRadius | Error::VerificationFailed(_)
    )
}

/// Runs `f` at increasing working truncations.
fn with_escalation<T>(start: Q, mut f: impl FnMut(&Q) -> Result<T>) -> Result<T> {
    let mut order = start;
    let mut last = Error::IndeterminatePivot;
    for _ in 0..=MAX_ESCALATIONS {
        match f(&order) {
            Ok(v) => return Ok(v),
            Err(e) if escalates(&e) => last = e,
            Err(e) => return Err(e),
        }
        order = order * qi(2);
    }
    Err(last)
}

/// One extension stage; the working truncation is chosen and escalated
/// automatically.
pub fn extend_stage(p1: &PowerSeries, a2: &[Scalar], a3: &[Scalar], s: &Mag) -> Result<Stage> {
    let mut pts: Vec<Scalar> = a2.to_vec();
    pts.extend(a3.iter().cloned());
    let mut extra = vec![s.clone()];
    extra.extend(p1.coeffs().iter().map(Scalar::mag_upper));
    with_escalation(default_order(&pts, &extra), |order| extend_stage_at(p1, a2, a3, s, order))
}

/// One extension stage at a fixed working truncation.
pub fn extend_stage_at(p1: &PowerSeries, a2: &[Scalar], a3: &[Scalar], s: &Mag, order: &Q) -> Result<Stage> {
    if !p1.is_polynomial() {
        return Err(Error::Invalid("stage input must be a polynomial".into()));
    }
    let l = p1.degree().ok_or(Error::ZeroSeries)?;
    if s.is_zero() || s >= &Mag::one() {
        return Err(Error::Invalid("separator must lie in (0,1)".into()));
    }
    let r2 = grouped_radii(a2)?;
    let r3 = grouped_radii(a3)?;
    if r2.iter().any(|(r, _)| r == s) || r3.iter().any(|(r, _)| r == s) {
        return Err(Error::SeparatorCollision);
    }
    if r2.iter().any(|(r, _)| r > s) || r3.iter().any(|(r, _)| r < s) {
        return Err(Error::Invalid("separator must split middle and outer zeros".into()));
    }
    let nd1 = p1.newton()?;
    if nd1.radii.iter().any(|c| &c.radius == s) {
        return Err(Error::SeparatorCollision);
    }
    if nd1.radii.iter().any(|c| &c.radius > s) {
        return Err(Error::Invalid("stage input has zeros beyond the separator".into()));
    }
    if nd1.radii.iter().any(|c| !c.certified) {
        return Err(Error::UncertifiedRadius);
    }

    let mut nodes: Vec<Scalar> = a2.to_vec();
    nodes.extend(a3.iter().cloned());
    nodes.push(sample_point(s));
    check_distinct(&nodes)?;

    // P₂ = V·H with V = Π(z - a) and H ≡ P₁/V mod z^(L+1)
    let v = nodes.iter().fold(PowerSeries::one(), |acc, a| acc.mul(&PowerSeries::linear(a)));
    let vc = v.coeffs();
    let w0 = vc[0].inv(order).map_err(|e| match e {
        Error::IndeterminateMag => Error::IndeterminatePivot,
        e => e,
    })?;
    let mut w: Vec<Scalar> = vec![w0.clone()];
    for k in 1..=l {
        let mut acc = Scalar::zero();
        for j in 1..=k.min(vc.len() - 1) {
            acc = acc.add_ref(&vc[j].mul_ref(&w[k - j]));
        }
        w.push(acc.mul_ref(&w0).neg_ref());
    }
    let mut h = vec![Scalar::zero(); l + 1];
    for (i, a) in p1.coeffs().iter().enumerate() {
        for (j, b) in w.iter().enumerate() {
            if i + j > l {
                break;
            }
            h[i + j] = h[i + j].add_ref(&a.mul_ref(b));
        }
    }
    let full = v.mul(&PowerSeries::polynomial(h));
    let q_coeffs: Vec<Scalar> = full.coeffs().iter().skip(l + 1).cloned().collect();
    let q = PowerSeries::polynomial(q_coeffs);
    let mut p2c: Vec<Scalar> = p1.coeffs().to_vec();
    p2c.extend(q.coeffs().iter().cloned());
    let p2 = PowerSeries::polynomial(p2c);

    for a in &nodes {
        if !p2.eval(a)?.vanishes_to_trunc() {
            return Err(Error::VerificationFailed("interpolation node is not a zero".into()));
        }
    }

    let nd2 = p2.newton()?;
    if nd2.radii.iter().any(|c| !c.certified) {
        return Err(Error::UncertifiedRadius);
    }
    let mut expected: Vec<(Mag, usize)> = nd1.counts();
    expected.push((s.clone(), a2.len() + 1));
    expected.extend(r3);
    if nd2.counts() != expected {
        return Err(Error::VerificationFailed(format!(
            "newton profile {:?} differs from {:?}",
            nd2.counts(),
            expected
        )));
    }
    // beyond deg P₁ the interpolant carries the zeros
    for c in nd2.radii.iter().filter(|c| c.mu > l) {
        if q.count_zeros(&Region::Circle(c.radius.clone()))? != c.count {
            return Err(Error::VerificationFailed("interpolant count differs at an outer radius".into()));
        }
    }
    Ok(Stage { p2, q, newton: nd2 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub center: Scalar,
    pub eps: Mag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub radius: Mag,
    /// Indices into the target list.
    pub targets: Vec<usize>,
    /// Tolerance used on this circle.
    pub delta: Mag,
}

impl Circle {
    pub fn rho(&self) -> Q {
        self.radius.val().expect("nonzero radius").clone()
    }

    pub fn count(&self) -> usize {
        self.targets.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prescription {
    targets: Vec<Target>,
    circles: Vec<Circle>,
}

/// `q ∈ (1/6)ℤ` with `2^(-q) <= eps` and `2^(-q) < radius`.
pub fn choose_delta(eps_val: &Q, rho: &Q) -> Q {
    let a = rational::ceil_to_grid(eps_val, 6);
    let b = rational::floor_to_grid(rho, 6) + q(1, 6);
    a.max(b)
}

impl Prescription {
    pub fn new(targets: Vec<Target>) -> Result<Prescription> {
        if targets.is_empty() {
            return Err(Error::Invalid("no targets".into()));
        }
        let mut radii = Vec::with_capacity(targets.len());
        for t in &targets {
            let r = t.center.mag()?;
            if r.is_zero() {
                return Err(Error::Invalid("target center at the origin".into()));
            }
            if r >= Mag::one() {
                return Err(Error::CenterOutsideDisk);
            }
            if t.eps.is_zero() {
                return Err(Error::Invalid("zero tolerance".into()));
            }
            radii.push(r);
        }
        for i in 0..targets.len() {
            for j in 0..i {
                let d = targets[i].center.sub_ref(&targets[j].center).mag()?;
                if d.is_zero() {
                    return Err(Error::DuplicateCenters);
                }
                if d <= targets[i].eps.clone().max(targets[j].eps.clone()) {
                    return Err(Error::Invalid(format!("target disks {j} and {i} intersect")));
                }
            }
        }
        let mut circles: Vec<Circle> = Vec::new();
        for (i, r) in radii.iter().enumerate() {
            match circles.iter_mut().find(|c| &c.radius == r) {
                Some(c) => c.targets.push(i),
                None => circles.push(Circle { radius: r.clone(), targets: vec![i], delta: Mag::one() }),
            }
        }
        circles.sort_by(|a, b| a.radius.cmp(&b.radius));
        for c in &mut circles {
            let eps_val = c
                .targets
                .iter()
                .map(|&i| targets[i].eps.val().expect("nonzero").clone())
                .max()
                .expect("nonempty");
            c.delta = Mag::from_val(choose_delta(&eps_val, &c.rho()));
        }
        Ok(Prescription { targets, circles })
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    /// `v(c)` for `c = Π |z_n|`.
    pub fn c_val(&self) -> Q {
        self.circles.iter().map(|c| c.rho() * qi(c.count() as i64)).sum()
    }

    pub fn centers_in(&self, circles: std::ops::Range<usize>) -> Vec<Scalar> {
        self.circles[circles]
            .iter()
            .flat_map(|c| c.targets.iter().map(|&i| self.targets[i].center.clone()))
            .collect()
    }

    /// Circle index and tolerance for a target.
    pub fn delta_of(&self, target: usize) -> &Mag {
        &self.circles.iter().find(|c| c.targets.contains(&target)).expect("target on a circle").delta
    }

    fn order_hint(&self) -> Q {
        let pts: Vec<Scalar> = self.targets.iter().map(|t| t.center.clone()).collect();
        default_order(&pts, &[])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagePlan {
    /// `N₁ < … < N_{K-1}`: circle counts at the end of each block but the last.
    pub breakpoints: Vec<usize>,
    /// Zero counts per block, `M₁..M_K`.
    pub block_sizes: Vec<usize>,
    /// `S₂..S_{K-1}`: separator after block `j` for `j = 2..K-1`.
    pub separators: Vec<Mag>,
}

impl StagePlan {
    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Circle index ranges of the blocks.
    pub fn blocks(&self, n_circles: usize) -> Vec<std::ops::Range<usize>> {
        let mut ends = self.breakpoints.clone();
        ends.push(n_circles);
        let mut start = 0;
        ends.iter()
            .map(|&e| {
                let r = start..e;
                start = e;
                r
            })
            .collect()
    }
}

/// The stage inequality for circle `l`: with `end` the first circle past
/// the following block,
/// `k_l ρ_l + Σ_{l<i<end} k_i (ρ_l - ρ_i) > k_l · v(δ_l)`.
fn circle_ok(p: &Prescription, l: usize, end: usize) -> bool {
    let cs = p.circles();
    let kl = qi(cs[l].count() as i64);
    let rho_l = cs[l].rho();
    let mut lhs = &kl * &rho_l;
    for c in &cs[l + 1..end] {
        lhs += qi(c.count() as i64) * (&rho_l - c.rho());
    }
    lhs > kl * cs[l].delta.val().expect("nonzero").clone()
}

fn blocks_ok(p: &Prescription, bps: &[usize], k: usize) -> bool {
    let mut ends = bps.to_vec();
    ends.push(p.circles().len());
    let mut start = 0;
    for n in 0..k.saturating_sub(2) {
        if !(start..ends[n]).all(|l| circle_ok(p, l, ends[n + 1])) {
            return false;
        }
        start = ends[n];
    }
    true
}

fn dfs(p: &Prescription, k: usize, bps: &mut Vec<usize>) -> bool {
    let c = p.circles().len();
    if bps.len() + 1 == k {
        return blocks_ok(p, bps, k);
    }
    let lo = bps.last().map_or(1, |b| b + 1);
    let hi = c - (k - 1 - bps.len());
    for b in lo..=hi {
        bps.push(b);
        // the block before the previous one is now fully determined
        let n = bps.len();
        let prune = n >= 2 && n - 2 < k.saturating_sub(2) && {
            let start = if n >= 3 { bps[n - 3] } else { 0 };
            !(start..bps[n - 2]).all(|l| circle_ok(p, l, bps[n - 1]))
        };
        if !prune && dfs(p, k, bps) {
            return true;
        }
        bps.pop();
    }
    false
}

const SEPARATOR_FRACTIONS: &[(i64, i64)] = &[
    (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (2, 5), (3, 5), (4, 5), (1, 6), (5, 6), (1, 7), (2, 7), (3, 7),
    (4, 7), (5, 7), (6, 7), (1, 8), (3, 8), (5, 8), (7, 8),
];

fn pick_separator(inner: &Q, outer: &Q, forbidden: &[Mag]) -> Result<Mag> {
    for &(n, d) in SEPARATOR_FRACTIONS {
        let s = Mag::from_val(outer + q(n, d) * (inner - outer));
        if !forbidden.contains(&s) {
            return Ok(s);
        }
    }
    Err(Error::SeparatorCollision)
}

fn block_sizes(p: &Prescription, bps: &[usize]) -> Vec<usize> {
    let mut ends = bps.to_vec();
    ends.push(p.circles().len());
    let mut start = 0;
    ends.iter()
        .map(|&e| {
            let m = p.circles()[start..e].iter().map(Circle::count).sum();
            start = e;
            m
        })
        .collect()
}

fn find_breakpoints(p: &Prescription, stages: usize) -> Result<Vec<usize>> {
    if stages < 2 {
        return Err(Error::Invalid("at least two stages are required".into()));
    }
    let k = stages.min(p.circles().len());
    let mut bps = Vec::new();
    if dfs(p, k, &mut bps) {
        Ok(bps)
    } else {
        Err(Error::InfeasibleHorizon)
    }
}

/// A stage plan: blocks chosen by depth-first search (smallest breakpoints
/// first), separators at the exponent midpoint or shifted off `forbidden`.
pub fn make_plan(p: &Prescription, stages: usize, forbidden: &[Mag]) -> Result<StagePlan> {
    let bps = find_breakpoints(p, stages)?;
    let k = bps.len() + 1;
    let mut separators = Vec::new();
    for j in 2..k {
        let inner = p.circles()[bps[j - 1] - 1].rho();
        let outer = p.circles()[bps[j - 1]].rho();
        separators.push(pick_separator(&inner, &outer, forbidden)?);
    }
    Ok(StagePlan { block_sizes: block_sizes(p, &bps), breakpoints: bps, separators })
}

/// Checks a plan against the prescription.
pub fn check_plan(p: &Prescription, plan: &StagePlan) -> Result<()> {
    let k = plan.num_blocks();
    let bad = |m: &str| Err(Error::Invalid(format!("stage plan: {m}")));
    if k == 0 || plan.breakpoints.len() + 1 != k || plan.separators.len() != k.saturating_sub(2) {
        return bad("inconsistent lengths");
    }
    let c = p.circles().len();
    if plan.breakpoints.windows(2).any(|w| w[0] >= w[1]) || plan.breakpoints.iter().any(|&b| b == 0 || b >= c) {
        return bad("breakpoints must increase within the circle range");
    }
    if block_sizes(p, &plan.breakpoints) != plan.block_sizes {
        return bad("block sizes do not match");
    }
    if !blocks_ok(p, &plan.breakpoints, k) {
        return Err(Error::InfeasibleHorizon);
    }
    for j in 2..k {
        let s = &plan.separators[j - 2];
        let inner = &p.circles()[plan.breakpoints[j - 1] - 1].radius;
        let outer = &p.circles()[plan.breakpoints[j - 1]].radius;
        if !(inner < s && s < outer) {
            return bad("separator outside its gap");
        }
    }
    Ok(())
}

/// `log₂ ‖f‖` of the plan's output: `Σ k_i ρ_i + Σ_j (M_j + 1) σ_j`.
pub fn plan_norm_exponent(p: &Prescription, plan: &StagePlan) -> Q {
    let mut e = p.c_val();
    for (j, s) in plan.separators.iter().enumerate() {
        e += qi(plan.block_sizes[j + 1] as i64 + 1) * s.val().expect("nonzero").clone();
    }
    e
}

/// The staged polynomial for `p` under `plan`, normalized to `f(0) = 1`.
pub fn prescribe(p: &Prescription, plan: &StagePlan) -> Result<PowerSeries> {
    Ok(prescribe_stages(p, plan)?.pop().expect("at least one stage"))
}

/// All intermediate stages (for tables); `stages[0]` is the initial product.
pub fn prescribe_stages(p: &Prescription, plan: &StagePlan) -> Result<Vec<PowerSeries>> {
    check_plan(p, plan)?;
    with_escalation(p.order_hint(), |order| {
        let all = build_all(p, plan, order)?;
        let report = verify_prescription(all.last().expect("at least one stage"), p)?;
        if report.all_pass {
            Ok(all)
        } else {
            Err(Error::VerificationFailed(report.summary()))
        }
    })
}

fn build_all(p: &Prescription, plan: &StagePlan, order: &Q) -> Result<Vec<PowerSeries>> {
    let blocks = plan.blocks(p.circles().len());
    let k = blocks.len();
    let first_end = if k >= 2 { blocks[1].end } else { blocks[0].end };
    let mut f = PowerSeries::one();
    for a in p.centers_in(0..first_end) {
        f = f.mul(&PowerSeries::one_minus_over(&a, order)?);
    }
    let mut out = vec![f.clone()];
    for n in 1..k.saturating_sub(1) {
        let a2 = p.centers_in(blocks[n].clone());
        let a3 = p.centers_in(blocks[n + 1].clone());
        f = extend_stage_at(&f, &a2, &a3, &plan.separators[n - 1], order)?.p2;
        out.push(f.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetCheck {
    pub index: usize,
    pub center: Scalar,
    pub delta: Mag,
    pub pass: bool,
    /// Zeros in `D⁻(center, δ)` when certified.
    pub zeros_in_disk: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleCheck {
    pub radius: Mag,
    pub expected: usize,
    pub found: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub targets: Vec<TargetCheck>,
    pub circles: Vec<CircleCheck>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        let tp = self.targets.iter().filter(|t| t.pass).count();
        let cp = self.circles.iter().filter(|c| c.pass).count();
        let head = if self.all_pass { "all PASS" } else { "FAIL" };
        format!(
            "{head}: targets {tp}/{} PASS, circles {cp}/{} PASS",
            self.targets.len(),
            self.circles.len()
        )
    }
}

/// Checks each target disk for a zero and each circle for its zero count.
pub fn verify_prescription(f: &PowerSeries, p: &Prescription) -> Result<VerifyReport> {
    let mut targets = Vec::new();
    for (i, t) in p.targets().iter().enumerate() {
        let delta = p.delta_of(i).clone();
        let g = f.translate(&t.center)?;
        let b0 = g.coeff(0).mag_upper();
        // a zero in D⁻(0,δ) of g iff |b₀| is beaten at radius δ
        let mut best = Mag::Zero;
        for m in 1..g.coeffs().len() {
            if let CoeffMag::Exact(a) = g.coeff_mag(m) {
                let v = a.mul(&delta.pow_usize(m));
                if v > best {
                    best = v;
                }
            }
        }
        let pass = b0 < best;
        let zeros_in_disk = g.count_zeros(&Region::OpenDisk(delta.clone())).ok();
        targets.push(TargetCheck { index: i, center: t.center.clone(), delta, pass, zeros_in_disk });
    }
    let mut circles = Vec::new();
    for c in p.circles() {
        let found = match f.count_zeros(&Region::Circle(c.radius.clone())) {
            Ok(n) => n,
            Err(Error::ZeroSeries) => 0,
            Err(e) => return Err(e),
        };
        circles.push(CircleCheck { radius: c.radius.clone(), expected: c.count(), found, pass: found == c.count() });
    }
    let all_pass = targets.iter().all(|t| t.pass) && circles.iter().all(|c| c.pass);
    Ok(VerifyReport { targets, circles, all_pass })
}

/// Output of the greedy norm-targeting procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSelection {
    /// `t_n` with `q_n(t_n) = t_n a_n + (1 - t_n) b_n`.
    pub t: Vec<Q>,
    /// The chosen values `q_n(t_n)`, each in the dense set.
    pub values: Vec<Q>,
    pub sum: Q,
}

fn denom_u64(x: &Q) -> Option<u64> {
    x.denom().to_u64()
}

/// Greedy choice of `t_n` so that `Σ q_n(t_n)` lands within `eps` of `target`
/// with every `q_n(t_n) ∈ {p/q : q <= dense_denom}`.
pub fn norm_target_select(bounds: &[(Q, Q)], target: &Q, dense_denom: u64, eps: &Q) -> Result<NormSelection> {
    if bounds.is_empty() {
        return Err(Error::Invalid("empty horizon".into()));
    }
    if bounds.iter().any(|(a, b)| !(a.is_positive() && a < b)) || !eps.is_positive() || dense_denom == 0 {
        return Err(Error::Invalid("need 0 < a_n < b_n, eps > 0, d >= 1".into()));
    }
    let h = bounds.len();
    let total_a: Q = bounds.iter().map(|(a, _)| a.clone()).sum();
    let total_b: Q = bounds.iter().map(|(_, b)| b.clone()).sum();
    if target < &total_a || target > &total_b {
        return Err(Error::TargetOutOfRange);
    }
    // suffix sums
    let mut suf_a = vec![Q::zero(); h + 1];
    let mut suf_b = vec![Q::zero(); h + 1];
    for k in (0..h).rev() {
        suf_a[k] = &suf_a[k + 1] + &bounds[k].0;
        suf_b[k] = &suf_b[k + 1] + &bounds[k].1;
    }
    let mut remaining = target.clone();
    let mut t = Vec::with_capacity(h);
    let mut values = Vec::with_capacity(h);
    for k in 0..h {
        let (a, b) = &bounds[k];
        let (lo, hi) = if k + 1 == h {
            (&remaining - eps, &remaining + eps)
        } else {
            let s = (&suf_b[k] - &remaining) / (&suf_b[k] - &suf_a[k]);
            let ideal = &s * a + (Q::one() - &s) * b;
            let slack = eps / qi(k as i64 + 1);
            let lo = (&ideal - &slack).max(&remaining - &suf_b[k + 1]);
            let hi = (&ideal + &slack).min(&remaining - &suf_a[k + 1]);
            (lo, hi)
        };
        let lo = lo.max(a.clone());
        let hi = hi.min(b.clone());
        if lo > hi {
            return Err(Error::TargetOutOfRange);
        }
        let x = rational::simplest_in(&lo, &hi);
        if denom_u64(&x).map_or(true, |d| d > dense_denom) {
            return Err(Error::DenseSetTooCoarse);
        }
        t.push((b - &x) / (b - a));
        remaining -= &x;
        values.push(x);
    }
    let sum = values.iter().sum();
    Ok(NormSelection { t, values, sum })
}

/// A plan whose output has `log₂ ‖f‖` within `eps` of `target_exponent`,
/// steering the separators with [`norm_target_select`].
pub fn make_plan_for_norm(
    p: &Prescription,
    stages: usize,
    forbidden: &[Mag],
    target_exponent: &Q,
    dense_denom: u64,
    eps: &Q,
) -> Result<StagePlan> {
    let mut plan = make_plan(p, stages, forbidden)?;
    let k = plan.num_blocks();
    if k < 3 {
        return if (plan_norm_exponent(p, &plan) - target_exponent).abs() <= *eps {
            Ok(plan)
        } else {
            Err(Error::TargetOutOfRange)
        };
    }
    let mut bounds = Vec::new();
    let mut weights = Vec::new();
    for j in 2..k {
        let w = qi(plan.block_sizes[j - 1] as i64 + 1);
        let inner = p.circles()[plan.breakpoints[j - 1] - 1].rho();
        let outer = p.circles()[plan.breakpoints[j - 1]].rho();
        let shrink = (&inner - &outer) / qi(8);
        bounds.push((&w * (&outer + &shrink), &w * (&inner - &shrink)));
        weights.push(w);
    }
    let rest = target_exponent - p.c_val();
    let sel = norm_target_select(&bounds, &rest, dense_denom, eps)?;
    plan.separators = sel
        .values
        .iter()
        .zip(&weights)
        .map(|(x, w)| Mag::from_val(x / w))
        .collect();
    if plan.separators.iter().any(|s| forbidden.contains(s)) {
        return Err(Error::SeparatorCollision);
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tq(n: i64, d: i64) -> Scalar {
        Scalar::t_pow(q(n, d))
    }

    fn m(n: i64, d: i64) -> Mag {
        Mag::from_val_frac(n, d)
    }

    fn target(c: Scalar, eps: Mag) -> Target {
        Target { center: c, eps }
    }

    #[test]
    fn vandermonde_examples() {
        let one = Scalar::one();
        let ord = qi(10);
        assert_eq!(vandermonde_solve(&[one.clone()], &[Scalar::from_int(5)], &ord).unwrap(), vec![Scalar::from_int(5)]);
        let r = vandermonde_solve(&[one.clone(), Scalar::from_int(-1)], &[one.clone(), one.clone()], &ord).unwrap();
        assert_eq!(r, vec![one.clone(), Scalar::zero()]);
        let r = vandermonde_solve(&[one.clone(), Scalar::from_int(2)], &[one.clone(), Scalar::from_int(2)], &ord).unwrap();
        assert_eq!(r, vec![Scalar::zero(), one.clone()]);
        assert_eq!(vandermonde_solve(&[one.clone(), one.clone()], &[one.clone(), one.clone()], &ord), Err(Error::DuplicateNodes));
    }

    fn p1() -> PowerSeries {
        PowerSeries::one_minus_over(&tq(1, 1), &qi(8))
            .unwrap()
            .mul(&PowerSeries::one_minus_over(&tq(1, 2), &qi(8)).unwrap())
    }

    #[test]
    fn extend_stage_example() {
        let st = extend_stage(&p1(), &[tq(1, 2)], &[tq(1, 3)], &m(5, 12)).unwrap();
        assert_eq!(st.p2.degree(), Some(5));
        assert_eq!(st.newton.counts(), vec![(m(1, 1), 1), (m(1, 2), 1), (m(5, 12), 2), (m(1, 3), 1)]);
        assert!(st.p2.eval(&tq(1, 2)).unwrap().is_exact_zero());
        assert!(st.p2.eval(&tq(1, 3)).unwrap().is_exact_zero());
        // P₂ agrees with P₁ below degree 3
        assert_eq!(&st.p2.coeffs()[..3], p1().coeffs());
    }

    #[test]
    fn extend_stage_minimal_and_collision() {
        let st = extend_stage(&p1(), &[tq(1, 2)], &[], &m(1, 3)).unwrap();
        assert_eq!(st.newton.counts().last().unwrap(), &(m(1, 3), 2));
        assert_eq!(extend_stage(&p1(), &[tq(1, 2)], &[], &m(1, 2)).unwrap_err(), Error::SeparatorCollision);
    }

    #[test]
    fn prescription_deltas() {
        let p = Prescription::new(vec![target(tq(1, 1), m(3, 1)), target(tq(1, 2), m(3, 1))]).unwrap();
        assert_eq!(p.circles().len(), 2);
        assert_eq!(p.circles()[0].delta, m(3, 1));
        // eps above the radius is clipped below it
        let p = Prescription::new(vec![target(tq(1, 1), m(0, 1))]).unwrap();
        assert_eq!(p.circles()[0].delta, m(7, 6));
        let dup = Prescription::new(vec![target(tq(1, 1), m(3, 1)), target(tq(1, 1), m(3, 1))]);
        assert_eq!(dup, Err(Error::DuplicateCenters));
    }

    fn three_circles(eps: Mag) -> Prescription {
        Prescription::new(vec![
            target(tq(1, 1), eps.clone()),
            target(tq(1, 2), eps.clone()),
            target(tq(1, 3), eps),
        ])
        .unwrap()
    }

    #[test]
    fn plan_examples() {
        // δ₁ = 2^(-7/6): 1 + 1/2 > 7/6
        let p = three_circles(m(7, 6));
        let plan = make_plan(&p, 3, &[]).unwrap();
        assert_eq!(plan.breakpoints, vec![1, 2]);
        assert_eq!(plan.block_sizes, vec![1, 1, 1]);
        assert_eq!(plan.separators, vec![m(5, 12)]);
        let shifted = make_plan(&p, 3, &[m(5, 12)]).unwrap();
        assert_ne!(shifted.separators[0], m(5, 12));
        // a tolerance far below the radius cannot survive the later stage
        assert_eq!(make_plan(&three_circles(m(6, 1)), 3, &[]), Err(Error::InfeasibleHorizon));
    }

    #[test]
    fn prescribe_examples() {
        let p = Prescription::new(vec![target(tq(1, 1), m(3, 1)), target(tq(1, 2), m(3, 1))]).unwrap();
        let plan = make_plan(&p, 2, &[]).unwrap();
        let f = prescribe(&p, &plan).unwrap();
        assert!(verify_prescription(&f, &p).unwrap().all_pass);
        let single = Prescription::new(vec![target(tq(1, 2), m(2, 1))]).unwrap();
        let f = prescribe(&single, &make_plan(&single, 2, &[]).unwrap()).unwrap();
        assert_eq!(f, PowerSeries::one_minus_over(&tq(1, 2), &qi(1)).unwrap());
        let p3 = three_circles(m(7, 6));
        let plan = make_plan(&p3, 3, &[m(5, 12)]).unwrap();
        let f = prescribe(&p3, &plan).unwrap();
        assert!(f.newton().unwrap().radii.iter().all(|c| c.radius != m(5, 12)));
        assert_eq!(f.gauss_norm().unwrap().value, Mag::from_val(-plan_norm_exponent(&p3, &plan)));
    }

    #[test]
    fn verify_failures() {
        let p = Prescription::new(vec![target(tq(1, 1), m(3, 1)), target(tq(1, 2), m(3, 1))]).unwrap();
        let r = verify_prescription(&PowerSeries::one(), &p).unwrap();
        assert!(r.targets.iter().all(|t| !t.pass) && r.circles.iter().all(|c| !c.pass));
        // zero displaced to distance 2^-2 > δ = 2^-3
        let moved = &tq(1, 2) + &tq(2, 1);
        let f = PowerSeries::one_minus_over(&tq(1, 1), &qi(8))
            .unwrap()
            .mul(&PowerSeries::one_minus_over(&moved, &qi(8)).unwrap());
        let r = verify_prescription(&f, &p).unwrap();
        assert!(r.targets[0].pass);
        assert!(!r.targets[1].pass);
        assert!(!r.all_pass);
    }

    #[test]
    fn norm_target_examples() {
        let bounds: Vec<(Q, Q)> = (1..=8).map(|n| (q(1, 1 << (n + 2)), q(1, 1 << n))).collect();
        let total: Q = bounds.iter().map(|b| b.1.clone()).sum();
        let sel = norm_target_select(&bounds, &total, 1 << 10, &q(1, 1 << 10)).unwrap();
        assert_eq!(sel.sum, total);
        assert!(sel.t.iter().all(Zero::is_zero));
        let bounds: Vec<(Q, Q)> = (1..=32).map(|n| (q(1, 2 * (n + 40)), q(1, n + 40))).collect();
        let eps = q(1, 1 << 10);
        let sel = norm_target_select(&bounds, &q(1, 3), 1 << 10, &eps).unwrap();
        assert!((&sel.sum - q(1, 3)).abs() <= eps);
        assert!(sel.values.iter().all(|v| *v.denom() <= num_bigint::BigInt::from(1 << 10)));
        assert_eq!(norm_target_select(&bounds, &q(1, 10), 1 << 10, &eps), Err(Error::TargetOutOfRange));
    }
}
