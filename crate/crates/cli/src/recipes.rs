//! Scenario recipes: stage tables printed for inspection. Only per-stage
//! exact identities are asserted (`ζ = prefactor·ξ`, the two `ξ` routes,
//! monotonicity in the radius, the solver round trip); trends are printed.

use nonarch::json::{mag_json, mag_q};
use nonarch::rational::{q, qi};
use nonarch::semlab::{regularity_products, solve_radius, stage_values_at};
use nonarch::{Mag, PowerSeries, Scalar};
use serde_json::{json, Value};

use crate::{CliError, RecipeName};

/// Centers of a clustered fixture: circle `i` (1-based) carries `i + 1`
/// points at pairwise distance `2^-dist(i)`.
struct Cluster {
    centers: Vec<Scalar>,
    circle: Vec<usize>,
}

fn cluster(horizon: usize, rho: impl Fn(i64) -> nonarch::Q, dist: impl Fn(i64) -> nonarch::Q) -> Cluster {
    let mut centers = Vec::new();
    let mut circle = Vec::new();
    for i in 1..=horizon as i64 {
        for j in 0..=i {
            centers.push(&Scalar::t_pow(rho(i)) + &Scalar::monomial(qi(j), dist(i)));
            circle.push(i as usize);
        }
    }
    Cluster { centers, circle }
}

fn product_of_linear(zeros: &[Scalar]) -> PowerSeries {
    zeros.iter().fold(PowerSeries::one(), |acc, w| acc.mul(&PowerSeries::linear(w)))
}

fn check_monotone(small: &[Mag], large: &[Mag]) -> Result<(), CliError> {
    if small.iter().zip(large).any(|(a, b)| a > b) {
        return Err(CliError::Invariant("zeta decreased when the radius grew".into()));
    }
    Ok(())
}

/// Zeros displaced from each center by `2^-(2/i + 1)`, strictly inside
/// every disk used below.
fn displaced_zeros(c: &Cluster) -> Vec<Scalar> {
    c.centers
        .iter()
        .zip(&c.circle)
        .map(|(z, &i)| z + &Scalar::t_pow(q(2, i as i64) + qi(1)))
        .collect()
}

fn two_schedules(
    f: &PowerSeries,
    c: &Cluster,
    r: &[Mag],
    s: &[Mag],
    weights: &[u32],
) -> Result<Vec<Value>, CliError> {
    let at_r = stage_values_at(f, &c.centers, r)?;
    let at_s = stage_values_at(f, &c.centers, s)?;
    let zr: Vec<Mag> = at_r.records.iter().map(|x| x.zeta.clone()).collect();
    let zs: Vec<Mag> = at_s.records.iter().map(|x| x.zeta.clone()).collect();
    check_monotone(&zs, &zr)?;
    let mut rows = Vec::new();
    for (n, (a, b)) in at_r.records.iter().zip(&at_s.records).enumerate() {
        let k = weights[n] as usize;
        rows.push(json!({
            "n": n,
            "circle": c.circle[n],
            "k": k,
            "r_pow_k": mag_q(&r[n].pow_usize(k)),
            "s_pow_k": mag_q(&s[n].pow_usize(k)),
            "zeta_r": mag_q(&a.zeta),
            "zeta_s": mag_q(&b.zeta),
            "xi_r": mag_q(&a.xi),
            "xi_s": mag_q(&b.xi),
            "count_r": a.count,
            "count_s": b.count,
        }));
    }
    Ok(rows)
}

/// Clusters of `i + 1` points at distance `2^(-1/i)` on `C(0, 2^(-1/(2i)))`,
/// one zero near each point; two schedules with `rₙ^(kₙ), sₙ^(kₙ) → 1`.
fn lucile(horizon: usize) -> Result<Value, CliError> {
    let c = cluster(horizon, |i| q(1, 2 * i), |i| q(1, i));
    let f = product_of_linear(&displaced_zeros(&c));
    let weights: Vec<u32> = c.circle.iter().map(|&i| i as u32).collect();
    let r: Vec<Mag> = c.circle.iter().map(|&i| Mag::from_val(q(1, i as i64))).collect();
    let s: Vec<Mag> = c.circle.iter().map(|&i| Mag::from_val(q(3, 2 * i as i64))).collect();
    let rows = two_schedules(&f, &c, &r, &s, &weights)?;
    Ok(json!({ "rows": rows }))
}

/// `Mᵢ = i + 1` points per circle at distance `M^(1/(Mᵢ-1))`, `M = 2^-1`;
/// `rₙ` that distance and `sₙ = rₙ²`.
fn noterrias(horizon: usize) -> Result<Value, CliError> {
    let c = cluster(horizon, |i| q(1, 2 * i), |i| q(1, i));
    let f = product_of_linear(&displaced_zeros(&c));
    let weights = vec![1u32; c.centers.len()];
    let r: Vec<Mag> = c.circle.iter().map(|&i| Mag::from_val(q(1, i as i64))).collect();
    let s: Vec<Mag> = c.circle.iter().map(|&i| Mag::from_val(q(2, i as i64))).collect();
    let rows = two_schedules(&f, &c, &r, &s, &weights)?;
    Ok(json!({ "m": mag_json(&Mag::from_val(qi(1))), "rows": rows }))
}

/// A non-regular family: `i + 1` points at fixed distance `2^(-1/2)` on each
/// circle, zeros at the centers, disks of radius `2^-1`.
fn gertrudis(horizon: usize) -> Result<Value, CliError> {
    let c = cluster(horizon, |i| q(1, 2 * i + 2), |_| q(1, 2));
    let f = product_of_linear(&c.centers);
    let r = vec![Mag::from_val(qi(1)); c.centers.len()];
    let rep = stage_values_at(&f, &c.centers, &r)?;
    let all = regularity_products(&c.centers, &vec![1; c.centers.len()], c.centers.len())?;
    let mut rows = Vec::new();
    for (n, rec) in rep.records.iter().enumerate() {
        let same: Vec<usize> = (0..c.centers.len()).filter(|&m| c.circle[m] == c.circle[n]).collect();
        let idx = same.iter().position(|&m| m == n).expect("own circle");
        let cluster_centers: Vec<Scalar> = same.iter().map(|&m| c.centers[m].clone()).collect();
        let on_circle = regularity_products(&cluster_centers, &vec![1; same.len()], same.len())?;
        rows.push(json!({
            "n": n,
            "circle": c.circle[n],
            "xi": mag_q(&rec.xi),
            "xi_over_r": mag_q(&rec.xi.div(&r[n])?),
            "circle_product": mag_q(&on_circle.products[idx]),
            "family_product": mag_q(&all.products[n]),
            "zeta": mag_q(&rec.zeta),
            "point_mag": mag_q(&f.point_mag(&c.centers[n])?),
        }));
    }
    Ok(json!({ "rows": rows }))
}

/// For each center, the radius with `ξ = τ`, and the round trip.
fn liberban(horizon: usize, f: Option<PowerSeries>, centers: Option<Vec<Scalar>>, target: Mag) -> Result<Value, CliError> {
    let (f, centers) = match (f, centers) {
        (Some(f), Some(c)) => (f, c),
        (None, None) => {
            let centers: Vec<Scalar> = (1..=horizon as i64).map(|n| Scalar::t_pow(q(1, n + 1))).collect();
            let mut zeros = Vec::new();
            for (n, z) in centers.iter().enumerate() {
                zeros.push(z.clone());
                zeros.push(z + &Scalar::t_pow(q(1, n as i64 + 2) + qi(1)));
            }
            (product_of_linear(&zeros), centers)
        }
        _ => return Err(CliError::Input("liberban-chain needs both function and centers".into())),
    };
    let mut rows = Vec::new();
    for (n, z) in centers.iter().enumerate() {
        let s = solve_radius(&f, z, &target)?;
        let xi = f.xi(z, &s)?;
        if xi != target {
            return Err(CliError::Invariant(format!("stage {n}: xi at the solved radius misses the target")));
        }
        rows.push(json!({
            "n": n,
            "s": mag_q(&s),
            "xi": mag_q(&xi),
            "zeta": mag_q(&f.disk_norm(z, &s)?),
        }));
    }
    Ok(json!({ "target": mag_json(&target), "rows": rows }))
}

pub fn run(name: RecipeName, horizon: usize, input: Option<&Value>) -> Result<Value, CliError> {
    let body = match name {
        RecipeName::LucileInsensitivity => lucile(horizon)?,
        RecipeName::Noterrias => noterrias(horizon)?,
        RecipeName::GertrudisCollapse => gertrudis(horizon)?,
        RecipeName::LiberbanChain => {
            let f = input
                .and_then(|v| v.get("function"))
                .map(nonarch::json::series_from_value)
                .transpose()?;
            let centers = input
                .and_then(|v| v.get("centers"))
                .map(|c| match c.as_array() {
                    Some(a) => a.iter().map(nonarch::json::scalar_from_value).collect(),
                    None => Err(nonarch::Error::Parse("centers must be an array".into())),
                })
                .transpose()?;
            let target = match input.and_then(|v| v.get("target")) {
                Some(t) => nonarch::json::mag_from_value(t)?,
                None => Mag::from_val(qi(3)),
            };
            liberban(horizon, f, centers, target)?
        }
    };
    let mut out = json!({ "recipe": name.as_str(), "horizon": horizon });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(out)
}

/// Flat CSV of a recipe's rows (columns from the first row).
pub fn rows_csv(report: &Value) -> String {
    let rows = report.get("rows").and_then(Value::as_array).cloned().unwrap_or_default();
    let Some(Value::Object(first)) = rows.first() else {
        return String::new();
    };
    let cols: Vec<String> = first.keys().cloned().collect();
    let mut out = cols.join(",");
    out.push('\n');
    for r in &rows {
        let vals: Vec<String> = cols
            .iter()
            .map(|c| match r.get(c) {
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None => String::new(),
            })
            .collect();
        out.push_str(&vals.join(","));
        out.push('\n');
    }
    out
}
