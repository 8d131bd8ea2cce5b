//! Batch front end: read a JSON request, run one library operation, print an
//! exact JSON or CSV report. Exit codes: 0 ok, 1 invariant failure, 2 bad input.

pub mod gen;
mod recipes;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nonarch::json::{self as wire, mag_json, mag_q, scalar_json, series_json};
use nonarch::prescribe::{self, make_plan, make_plan_for_norm, verify_prescription, Prescription};
use nonarch::semlab::{curve, solve_radius, stage_values};
use nonarch::{Error, Mag, PowerSeries, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug, Clone)]
#[command(name = "nonarch", about = "Exact computations with bounded analytic functions on the nonarchimedean unit disk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON input file ("-" for stdin)
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// report destination (stdout when absent)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 3)]
    pub stages: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub horizon: usize,
    /// generate a random instance instead of reading one
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Newton polygon: critical radii with μ, ν and zero counts
    Newton,
    /// Gauss norm, or the sup norm on a disk given center and radius
    Norm,
    /// ζ on one disk, or the stage table of a disk family
    Zeta,
    /// ξ on one disk, by coefficients and by zero distances
    Xi,
    /// Build a function with prescribed approximate zeros
    Prescribe,
    /// Check a function against a prescription
    Verify,
    /// Stage tables over a grid of base radii
    Semcurve,
    /// Radius with ξ equal to a target
    SolveRadius,
    /// Scenario tables
    Recipe {
        #[arg(value_enum)]
        name: RecipeName,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecipeName {
    LucileInsensitivity,
    Noterrias,
    GertrudisCollapse,
    LiberbanChain,
}

impl RecipeName {
    pub fn as_str(self) -> &'static str {
        match self {
            RecipeName::LucileInsensitivity => "lucile-insensitivity",
            RecipeName::Noterrias => "noterrias",
            RecipeName::GertrudisCollapse => "gertrudis-collapse",
            RecipeName::LiberbanChain => "liberban-chain",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Invariant(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 1,
            CliError::Lib(e) => match e {
                Error::Parse(_)
                | Error::Invalid(_)
                | Error::CenterOutsideDisk
                | Error::DiskNotInCircle
                | Error::DuplicateNodes
                | Error::DuplicateCenters
                | Error::LengthMismatch(_)
                | Error::ZeroSeries
                | Error::InfeasibleHorizon
                | Error::TargetOutOfRange
                | Error::TargetNotInValueGroup
                | Error::DenseSetTooCoarse
                | Error::SeparatorCollision => 2,
                _ => 1,
            },
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Input(_) => "SchemaError".into(),
            CliError::Invariant(_) => "InvariantFailure".into(),
            CliError::Lib(e) => match e {
                Error::Parse(_) => "SchemaError".into(),
                other => format!("{other:?}").split('(').next().unwrap_or("Error").to_string(),
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m) | CliError::Invariant(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

/// What to print and how to exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

/// A report plus an optional CSV rendering and an exit code for reports
/// that carry a failed check (verify) rather than an error.
struct Report {
    json: Value,
    csv: Option<String>,
    code: i32,
}

impl Report {
    fn ok(json: Value, csv: Option<String>) -> Self {
        Report { json, csv, code: 0 }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(r) => {
            let output = match (cli.format, r.csv) {
                (Format::Csv, Some(csv)) => csv,
                _ => pretty(&r.json),
            };
            Outcome { code: r.code, output }
        }
        Err(e) => {
            let report = json!({ "error": { "kind": e.kind(), "message": e.message() } });
            let output = match cli.format {
                Format::Csv => format!("error,message\n{},{:?}\n", e.kind(), e.message()),
                Format::Json => pretty(&report),
            };
            Outcome { code: e.code(), output }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn read_input(cli: &Cli) -> Result<Option<Value>, CliError> {
    let Some(path) = &cli.input else {
        return Ok(None);
    };
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Input(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
}

fn need_input(cli: &Cli) -> Result<Value, CliError> {
    read_input(cli)?.ok_or_else(|| CliError::Input("--input is required".into()))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| CliError::Input(format!("missing field \"{key}\"")))
}

/// The function of an input: either `{"function": Series}` or a bare Series.
fn function_of(v: &Value) -> Result<PowerSeries, CliError> {
    Ok(wire::series_from_value(v.get("function").unwrap_or(v))?)
}

fn scalars(v: &Value) -> Result<Vec<Scalar>, CliError> {
    let arr = v.as_array().ok_or_else(|| CliError::Input("expected an array of scalars".into()))?;
    Ok(arr.iter().map(wire::scalar_from_value).collect::<Result<_, _>>()?)
}

fn mags(v: &Value) -> Result<Vec<Mag>, CliError> {
    let arr = v.as_array().ok_or_else(|| CliError::Input("expected an array of magnitudes".into()))?;
    Ok(arr.iter().map(wire::mag_from_value).collect::<Result<_, _>>()?)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Newton => newton(cli),
        Command::Norm => norm(cli),
        Command::Zeta => zeta(cli),
        Command::Xi => xi(cli),
        Command::Prescribe => prescribe_cmd(cli),
        Command::Verify => verify(cli),
        Command::Semcurve => semcurve(cli),
        Command::SolveRadius => solve(cli),
        Command::Recipe { name } => {
            let input = read_input(cli)?;
            let v = recipes::run(*name, cli.horizon, input.as_ref())?;
            let csv = recipes::rows_csv(&v);
            Ok(Report::ok(v, Some(csv)))
        }
    }
}

fn newton(cli: &Cli) -> Result<Report, CliError> {
    let (f, generated) = match (read_input(cli)?, cli.seed) {
        (Some(v), _) => (function_of(&v)?, false),
        (None, Some(seed)) => (gen::sample(&mut rng(seed), 8).series, true),
        (None, None) => return Err(CliError::Input("--input or --seed is required".into())),
    };
    let nd = f.newton()?;
    let mut out = wire::newton_json(&nd);
    out["gauss_norm"] = mag_json(&f.gauss_norm()?.value);
    if generated {
        out["function"] = series_json(&f);
    }
    Ok(Report::ok(out, Some(wire::newton_csv(&nd))))
}

fn norm(cli: &Cli) -> Result<Report, CliError> {
    let v = need_input(cli)?;
    let f = function_of(&v)?;
    let value = match (v.get("center"), v.get("radius")) {
        (Some(c), Some(r)) => f.disk_norm(&wire::scalar_from_value(c)?, &wire::mag_from_value(r)?)?,
        (None, None) => {
            let g = f.gauss_norm()?;
            if !g.certified {
                return Err(Error::UncertifiedRadius.into());
            }
            g.value
        }
        _ => return Err(CliError::Input("give both center and radius, or neither".into())),
    };
    let csv = format!("norm_q\n{}\n", mag_q(&value));
    Ok(Report::ok(json!({ "norm": mag_json(&value) }), Some(csv)))
}

fn zeta(cli: &Cli) -> Result<Report, CliError> {
    let v = need_input(cli)?;
    let f = function_of(&v)?;
    if let Some(fam) = v.get("family") {
        let fam = wire::family_from_value(fam)?;
        let rep = stage_values(&f, &fam)?;
        return Ok(Report::ok(wire::stage_json(&rep), Some(wire::stage_csv(&rep))));
    }
    let c = wire::scalar_from_value(field(&v, "center")?)?;
    let r = wire::mag_from_value(field(&v, "radius")?)?;
    let z = f.disk_norm(&c, &r)?;
    let n = f.count_zeros_near(&c, &nonarch::Region::ClosedDisk(r.clone()))?;
    let csv = format!("zeta_q,count\n{},{}\n", mag_q(&z), n);
    Ok(Report::ok(json!({ "zeta": mag_json(&z), "count": n }), Some(csv)))
}

fn xi(cli: &Cli) -> Result<Report, CliError> {
    let v = need_input(cli)?;
    let f = function_of(&v)?;
    let c = wire::scalar_from_value(field(&v, "center")?)?;
    let r = wire::mag_from_value(field(&v, "radius")?)?;
    let x = f.xi(&c, &r)?;
    let by_dist = f.xi_by_distances(&c, &r)?;
    if x != by_dist {
        return Err(CliError::Invariant(format!(
            "xi by coefficients {} differs from xi by zero distances {}",
            mag_q(&x),
            mag_q(&by_dist)
        )));
    }
    let pre = f.prefactor(&c)?;
    let z = f.disk_norm(&c, &r)?;
    if pre.mul(&x) != z {
        return Err(CliError::Invariant("zeta differs from prefactor times xi".into()));
    }
    let csv = format!("xi_q,prefactor_q,zeta_q\n{},{},{}\n", mag_q(&x), mag_q(&pre), mag_q(&z));
    Ok(Report::ok(
        json!({ "xi": mag_json(&x), "prefactor": mag_json(&pre), "zeta": mag_json(&z) }),
        Some(csv),
    ))
}

fn prescribe_cmd(cli: &Cli) -> Result<Report, CliError> {
    let (p, forbidden, norm_target) = match (read_input(cli)?, cli.seed) {
        (Some(v), _) => {
            let p = wire::prescription_from_value(&v)?;
            let forbidden = match v.get("forbidden") {
                Some(f) => mags(f)?,
                None => Vec::new(),
            };
            (p, forbidden, v.get("norm_target").cloned())
        }
        (None, Some(seed)) => (gen::prescription(&mut rng(seed), cli.stages).0, Vec::new(), None),
        (None, None) => return Err(CliError::Input("--input or --seed is required".into())),
    };
    let plan = match norm_target {
        None => make_plan(&p, cli.stages, &forbidden)?,
        Some(nt) => {
            let exponent = rational_field(&nt, "exponent")?;
            let eps = rational_field(&nt, "eps")?;
            let d = field(&nt, "d")?
                .as_u64()
                .ok_or_else(|| CliError::Input("norm_target.d must be a positive integer".into()))?;
            make_plan_for_norm(&p, cli.stages, &forbidden, &exponent, d, &eps)?
        }
    };
    let f = prescribe::prescribe(&p, &plan)?;
    let rep = verify_prescription(&f, &p)?;
    let norm = f.gauss_norm()?.value;
    let out = json!({
        "prescription": wire::prescription_json(&p),
        "plan": wire::plan_json(&plan),
        "function": series_json(&f),
        "norm": mag_json(&norm),
        "verify": wire::verify_json(&rep),
    });
    let code = if rep.all_pass { 0 } else { 1 };
    Ok(Report { json: out, csv: Some(verify_csv(&rep)), code })
}

fn rational_field(v: &Value, key: &str) -> Result<nonarch::Q, CliError> {
    let s = field(v, key)?
        .as_str()
        .ok_or_else(|| CliError::Input(format!("\"{key}\" must be a \"num/den\" string")))?;
    Ok(nonarch::rational::parse(s)?)
}

fn verify_csv(rep: &prescribe::VerifyReport) -> String {
    let mut out = String::from("kind,index,radius_q,expected,found,pass\n");
    for t in &rep.targets {
        out.push_str(&format!("target,{},{},1,{},{}\n", t.index, mag_q(&t.delta), t.zeros_in_disk.map_or("?".to_string(), |n| n.to_string()), t.pass));
    }
    for (i, c) in rep.circles.iter().enumerate() {
        out.push_str(&format!("circle,{},{},{},{},{}\n", i, mag_q(&c.radius), c.expected, c.found, c.pass));
    }
    out.push_str(&format!("summary,,,,,{}\n", rep.summary()));
    out
}

fn verify(cli: &Cli) -> Result<Report, CliError> {
    let v = need_input(cli)?;
    let f = wire::series_from_value(field(&v, "function")?)?;
    let p: Prescription = wire::prescription_from_value(field(&v, "prescription")?)?;
    let rep = verify_prescription(&f, &p)?;
    let code = if rep.all_pass { 0 } else { 1 };
    Ok(Report { json: wire::verify_json(&rep), csv: Some(verify_csv(&rep)), code })
}

fn weights(v: &Value) -> Result<Vec<u32>, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("weights: {e}")))
}

fn semcurve(cli: &Cli) -> Result<Report, CliError> {
    let v = need_input(cli)?;
    let f = function_of(&v)?;
    let centers = scalars(field(&v, "centers")?)?;
    let w = weights(field(&v, "weights")?)?;
    let grid = mags(field(&v, "grid")?)?;
    let table = curve(&f, &centers, &w, &grid)?;
    Ok(Report::ok(wire::curve_json(&table), Some(wire::curve_csv(&table))))
}

fn solve(cli: &Cli) -> Result<Report, CliError> {
    let v = need_input(cli)?;
    let f = function_of(&v)?;
    let c = wire::scalar_from_value(field(&v, "center")?)?;
    let target = wire::mag_from_value(field(&v, "target")?)?;
    let s = solve_radius(&f, &c, &target)?;
    let x = f.xi(&c, &s)?;
    if x != target {
        return Err(CliError::Invariant("xi at the solved radius misses the target".into()));
    }
    let csv = format!("s_q,xi_q\n{},{}\n", mag_q(&s), mag_q(&x));
    Ok(Report::ok(
        json!({ "center": scalar_json(&c), "s": mag_json(&s), "xi": mag_json(&x) }),
        Some(csv),
    ))
}
