//! Exact JSON and CSV wire formats. Every rational travels as a `"num/den"`
//! string so reports re-parse to equal values.
//!
//! - Scalar: `{"terms":[{"q":"1/2","a":"1/1"}…],"trunc":null|"inf"|"num/den"}`
//!   (`q` exponent, `a` coefficient; `trunc` absent, null or `"inf"` = exact)
//! - Mag: `{"kind":"finite","q":"num/den"}` or `{"kind":"zero"}`
//! - PowerSeries: `{"coeffs":[Scalar…],"gauss_tail":Mag|null}` (null = polynomial)
//! - Prescription: `{"targets":[{"center":Scalar,"eps":Mag}…]}`
//! - DiskFamily: `{"centers":[Scalar…],"weights":[int…],"base_r":Mag}`

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::prescribe::{Prescription, StagePlan, Target, VerifyReport};
use crate::rational::{self, Q};
use crate::semlab::{CurveTable, DiskFamily, RegularityTable, StageReport};
use crate::series::{NewtonData, PowerSeries};
use crate::valfield::{Mag, Scalar};

fn q_str(x: &Q) -> String {
    rational::to_string(x)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermWire {
    pub q: String,
    pub a: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScalarWire {
    pub terms: Vec<TermWire>,
    #[serde(default)]
    pub trunc: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MagWire {
    Finite { q: String },
    Zero,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeriesWire {
    pub coeffs: Vec<ScalarWire>,
    #[serde(default)]
    pub gauss_tail: Option<MagWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TargetWire {
    pub center: ScalarWire,
    pub eps: MagWire,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrescriptionWire {
    pub targets: Vec<TargetWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FamilyWire {
    pub centers: Vec<ScalarWire>,
    pub weights: Vec<u32>,
    pub base_r: MagWire,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PlanWire {
    pub breakpoints: Vec<usize>,
    pub block_sizes: Vec<usize>,
    pub separators: Vec<MagWire>,
}

pub fn scalar_to_wire(x: &Scalar) -> ScalarWire {
    ScalarWire {
        terms: x.terms().iter().map(|(e, a)| TermWire { q: q_str(e), a: q_str(a) }).collect(),
        trunc: x.trunc().map(q_str),
    }
}

pub fn scalar_from_wire(w: &ScalarWire) -> Result<Scalar> {
    let mut terms = Vec::with_capacity(w.terms.len());
    for t in &w.terms {
        terms.push((rational::parse(&t.q)?, rational::parse(&t.a)?));
    }
    let trunc = match w.trunc.as_deref() {
        None | Some("inf") => None,
        Some(s) => Some(rational::parse(s)?),
    };
    Ok(Scalar::from_terms(terms, trunc))
}

pub fn mag_to_wire(m: &Mag) -> MagWire {
    match m {
        Mag::Zero => MagWire::Zero,
        Mag::Finite(v) => MagWire::Finite { q: q_str(v) },
    }
}

pub fn mag_from_wire(w: &MagWire) -> Result<Mag> {
    match w {
        MagWire::Zero => Ok(Mag::Zero),
        MagWire::Finite { q } => Ok(Mag::from_val(rational::parse(q)?)),
    }
}

pub fn series_to_wire(f: &PowerSeries) -> SeriesWire {
    SeriesWire {
        coeffs: f.coeffs().iter().map(scalar_to_wire).collect(),
        gauss_tail: if f.is_polynomial() { None } else { Some(mag_to_wire(f.tail())) },
    }
}

pub fn series_from_wire(w: &SeriesWire) -> Result<PowerSeries> {
    let coeffs = w.coeffs.iter().map(scalar_from_wire).collect::<Result<Vec<_>>>()?;
    let tail = match &w.gauss_tail {
        None => Mag::Zero,
        Some(m) => mag_from_wire(m)?,
    };
    Ok(PowerSeries::new(coeffs, tail))
}

pub fn prescription_to_wire(p: &Prescription) -> PrescriptionWire {
    PrescriptionWire {
        targets: p
            .targets()
            .iter()
            .map(|t| TargetWire { center: scalar_to_wire(&t.center), eps: mag_to_wire(&t.eps) })
            .collect(),
    }
}

pub fn prescription_from_wire(w: &PrescriptionWire) -> Result<Prescription> {
    let targets = w
        .targets
        .iter()
        .map(|t| Ok(Target { center: scalar_from_wire(&t.center)?, eps: mag_from_wire(&t.eps)? }))
        .collect::<Result<Vec<_>>>()?;
    Prescription::new(targets)
}

pub fn family_to_wire(f: &DiskFamily) -> FamilyWire {
    FamilyWire {
        centers: f.centers.iter().map(scalar_to_wire).collect(),
        weights: f.weights.clone(),
        base_r: mag_to_wire(&f.base_r),
    }
}

pub fn family_from_wire(w: &FamilyWire) -> Result<DiskFamily> {
    let centers = w.centers.iter().map(scalar_from_wire).collect::<Result<Vec<_>>>()?;
    DiskFamily::new(centers, w.weights.clone(), mag_from_wire(&w.base_r)?)
}

pub fn plan_to_wire(p: &StagePlan) -> PlanWire {
    PlanWire {
        breakpoints: p.breakpoints.clone(),
        block_sizes: p.block_sizes.clone(),
        separators: p.separators.iter().map(mag_to_wire).collect(),
    }
}

pub fn plan_from_wire(w: &PlanWire) -> Result<StagePlan> {
    Ok(StagePlan {
        breakpoints: w.breakpoints.clone(),
        block_sizes: w.block_sizes.clone(),
        separators: w.separators.iter().map(mag_from_wire).collect::<Result<Vec<_>>>()?,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(e.to_string()))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("wire types serialize")
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    scalar_from_wire(&parse_json(s)?)
}

pub fn parse_mag(s: &str) -> Result<Mag> {
    mag_from_wire(&parse_json(s)?)
}

pub fn parse_series(s: &str) -> Result<PowerSeries> {
    series_from_wire(&parse_json(s)?)
}

pub fn parse_prescription(s: &str) -> Result<Prescription> {
    prescription_from_wire(&parse_json(s)?)
}

pub fn parse_family(s: &str) -> Result<DiskFamily> {
    family_from_wire(&parse_json(s)?)
}

pub fn scalar_from_value(v: &Value) -> Result<Scalar> {
    scalar_from_wire(&from_value(v)?)
}

pub fn mag_from_value(v: &Value) -> Result<Mag> {
    mag_from_wire(&from_value(v)?)
}

pub fn series_from_value(v: &Value) -> Result<PowerSeries> {
    series_from_wire(&from_value(v)?)
}

pub fn prescription_from_value(v: &Value) -> Result<Prescription> {
    prescription_from_wire(&from_value(v)?)
}

pub fn family_from_value(v: &Value) -> Result<DiskFamily> {
    family_from_wire(&from_value(v)?)
}

pub fn plan_from_value(v: &Value) -> Result<StagePlan> {
    plan_from_wire(&from_value(v)?)
}

pub fn scalar_json(x: &Scalar) -> Value {
    to_value(&scalar_to_wire(x))
}

pub fn mag_json(m: &Mag) -> Value {
    to_value(&mag_to_wire(m))
}

pub fn series_json(f: &PowerSeries) -> Value {
    to_value(&series_to_wire(f))
}

pub fn prescription_json(p: &Prescription) -> Value {
    to_value(&prescription_to_wire(p))
}

pub fn family_json(f: &DiskFamily) -> Value {
    to_value(&family_to_wire(f))
}

pub fn plan_json(p: &StagePlan) -> Value {
    to_value(&plan_to_wire(p))
}

/// A magnitude as a bare exponent string (`"zero"` for `0`), used in tables.
pub fn mag_q(m: &Mag) -> String {
    match m {
        Mag::Zero => "zero".to_string(),
        Mag::Finite(v) => q_str(v),
    }
}

pub fn newton_json(nd: &NewtonData) -> Value {
    serde_json::json!({
        "vertices": nd.vertices.iter().map(|(n, v)| serde_json::json!({"n": n, "v": q_str(v)})).collect::<Vec<_>>(),
        "radii": nd.radii.iter().map(|c| serde_json::json!({
            "radius": mag_json(&c.radius),
            "mu": c.mu,
            "nu": c.nu,
            "count": c.count,
            "certified": c.certified,
        })).collect::<Vec<_>>(),
    })
}

/// Rows `radius_q,mu,nu,count`.
pub fn newton_csv(nd: &NewtonData) -> String {
    let mut out = String::from("radius_q,mu,nu,count\n");
    for c in &nd.radii {
        out.push_str(&format!("{},{},{},{}\n", mag_q(&c.radius), c.mu, c.nu, c.count));
    }
    out
}

pub fn verify_json(r: &VerifyReport) -> Value {
    serde_json::json!({
        "summary": r.summary(),
        "all_pass": r.all_pass,
        "targets": r.targets.iter().map(|t| serde_json::json!({
            "index": t.index,
            "center": scalar_json(&t.center),
            "delta": mag_json(&t.delta),
            "pass": t.pass,
            "zeros_in_disk": t.zeros_in_disk,
        })).collect::<Vec<_>>(),
        "circles": r.circles.iter().map(|c| serde_json::json!({
            "radius": mag_json(&c.radius),
            "expected": c.expected,
            "found": c.found,
            "pass": c.pass,
        })).collect::<Vec<_>>(),
    })
}

fn opt_mag(m: &Option<Mag>) -> Value {
    m.as_ref().map_or(Value::Null, mag_json)
}

pub fn stage_json(r: &StageReport) -> Value {
    serde_json::json!({
        "records": r.records.iter().map(|s| serde_json::json!({
            "n": s.n,
            "radius": mag_json(&s.radius),
            "zeta": mag_json(&s.zeta),
            "xi": mag_json(&s.xi),
            "prefactor": mag_json(&s.prefactor),
            "count": s.count,
        })).collect::<Vec<_>>(),
        "summary": {
            "zeta_min": opt_mag(&r.summary.zeta_min),
            "zeta_max": opt_mag(&r.summary.zeta_max),
            "xi_min": opt_mag(&r.summary.xi_min),
            "xi_max": opt_mag(&r.summary.xi_max),
            "zeta_nondecreasing": r.summary.zeta_nondecreasing,
            "zeta_nonincreasing": r.summary.zeta_nonincreasing,
        },
    })
}

/// Rows `n,zeta_q,xi_q,prefactor_q,count`.
pub fn stage_csv(r: &StageReport) -> String {
    let mut out = String::from("n,zeta_q,xi_q,prefactor_q,count\n");
    for s in &r.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.n,
            mag_q(&s.zeta),
            mag_q(&s.xi),
            mag_q(&s.prefactor),
            s.count
        ));
    }
    out
}

pub fn curve_json(c: &CurveTable) -> Value {
    serde_json::json!({
        "grid": c.grid.iter().map(mag_json).collect::<Vec<_>>(),
        "columns": c.columns.iter().map(stage_json).collect::<Vec<_>>(),
    })
}

/// Rows `r_q,n,zeta_q,xi_q,prefactor_q,count`, grid-major.
pub fn curve_csv(c: &CurveTable) -> String {
    let mut out = String::from("r_q,n,zeta_q,xi_q,prefactor_q,count\n");
    for (r, col) in c.grid.iter().zip(&c.columns) {
        for s in &col.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                mag_q(r),
                s.n,
                mag_q(&s.zeta),
                mag_q(&s.xi),
                mag_q(&s.prefactor),
                s.count
            ));
        }
    }
    out
}

pub fn regularity_json(t: &RegularityTable) -> Value {
    serde_json::json!({
        "products": t.products.iter().map(mag_json).collect::<Vec<_>>(),
        "running_inf": t.running_inf.iter().map(mag_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn scalar_roundtrip() {
        let x = Scalar::from_terms(vec![(q(1, 2), q(3, 1)), (q(2, 1), q(-1, 4))], Some(q(5, 1)));
        let s = serde_json::to_string(&scalar_json(&x)).unwrap();
        assert_eq!(parse_scalar(&s).unwrap(), x);
        let exact = parse_scalar(r#"{"terms":[{"q":"1/2","a":"1"}],"trunc":"inf"}"#).unwrap();
        assert_eq!(exact, Scalar::t_pow(q(1, 2)));
    }

    #[test]
    fn mag_and_series_roundtrip() {
        assert_eq!(parse_mag(r#"{"kind":"finite","q":"-3/2"}"#).unwrap(), Mag::from_val_frac(-3, 2));
        assert_eq!(parse_mag(r#"{"kind":"zero"}"#).unwrap(), Mag::Zero);
        let f = PowerSeries::new(vec![Scalar::one(), Scalar::t_pow(q(1, 3))], Mag::from_val_frac(2, 1));
        let s = serde_json::to_string(&series_json(&f)).unwrap();
        assert_eq!(parse_series(&s).unwrap(), f);
        let poly = parse_series(r#"{"coeffs":[{"terms":[{"q":"0/1","a":"1/1"}]}],"gauss_tail":null}"#).unwrap();
        assert!(poly.is_polynomial());
        assert!(parse_series("{not json").is_err());
    }

    #[test]
    fn newton_rows() {
        let f = crate::series::ZeroProfile::new(
            Scalar::one(),
            vec![(Scalar::t_pow(q(1, 1)), 1), (Scalar::t_pow(q(1, 2)), 1)],
        )
        .to_series(&q(8, 1))
        .unwrap();
        let csv = newton_csv(&f.newton().unwrap());
        assert_eq!(csv, "radius_q,mu,nu,count\n1/1,0,1,1\n1/2,1,2,1\n");
    }
}
