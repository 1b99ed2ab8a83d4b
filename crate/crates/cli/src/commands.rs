//! Subcommands. Each returns the text to print and an exit code.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use toric_manin::analytic::{denef_density, euler_product, primes_up_to, LocalDensityQuery, RationalConeFunction};
use toric_manin::clemens::{adelic_picard, analytic_obstruction, clemens_complex, AdelicFaceSpec};
use toric_manin::counter::{
    enumerate_affine, enumerate_cox, fit_asymptotics, read_records_csv, write_records_csv, CountOptions, CountRecord, CoxModel, FitResult,
    Region,
};
use toric_manin::fan::PlaceKind;
use toric_manin::invariants::{fujita_a, predict_growth, GrowthPrediction};
use toric_manin::polycore::rational_to_f64;

use crate::error::CliError;
use crate::input;
use crate::report::{pairs, Table};
use crate::verify::{self, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "toric-manin", version, about = "Invariants, local densities and point counts for integral points on toric varieties")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct FanArgs {
    /// Fan file, or the name of a bundled fan (p1, p2, a2, p1xp1, bl2p2, quadric_cone).
    #[arg(long)]
    pub fan: String,
    /// Boundary rays, e.g. 2,3,4. Defaults to the fan file's boundary.
    #[arg(long)]
    pub boundary: Option<String>,
    /// Clemens face per archimedean place: NAME[:real|:complex]=IDXLIST. Repeatable.
    #[arg(long = "face")]
    pub faces: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a fan.
    Validate {
        #[arg(long)]
        fan: String,
    },
    /// List the Clemens complex of the boundary and the obstruction status of each face.
    Clemens(FanArgs),
    /// Predict a, b and rigidity for a face choice (every face when none is given).
    Predict {
        #[command(flatten)]
        fan: FanArgs,
        /// Class as ray coefficients; the log-anticanonical class by default.
        #[arg(long, allow_hyphen_values = true)]
        class: Option<String>,
    },
    /// Evaluate the cone function of the effective cone of Pic(X; A).
    Xfun {
        #[command(flatten)]
        fan: FanArgs,
        /// Point in Picard coordinates; -K by default.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        class: Option<String>,
    },
    /// Local densities at the given primes.
    Density {
        #[arg(long)]
        fan: String,
        #[arg(long, default_value = "2,3,5")]
        primes: String,
        /// Shift per ray (or per orbit with --action); a single value is broadcast.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
        /// Use the group action stored in the fan file.
        #[arg(long)]
        action: bool,
    },
    /// Truncated Euler product of the local densities.
    Euler {
        #[arg(long)]
        fan: String,
        /// Largest prime included.
        #[arg(long, default_value_t = 1000)]
        primes: u64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        action: bool,
    },
    /// Count integral points, fit the growth, and compare against an expectation.
    Count(CountArgs),
    /// Fit records from a CSV file.
    Fit {
        #[arg(long)]
        records: String,
        /// Expected a,b; sets the exit code from the verdict.
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        region: Option<String>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Only these criteria, e.g. 1,5,7.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Fan file or bundled fan; counts in Cox coordinates of U.
    #[arg(long, conflicts_with = "model")]
    pub fan: Option<String>,
    /// Affine model file, or `quadric`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long = "face")]
    pub faces: Vec<String>,
    /// Class as ray coefficients; the log-anticanonical class by default.
    #[arg(long, allow_hyphen_values = true)]
    pub class: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    pub tmax: u64,
    /// `geometric` or a strictly increasing list of bounds.
    #[arg(long)]
    pub schedule: Option<String>,
    /// NAME=CONSTRAINT;... or, with --model, the name of a region declared in the model.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also count points of U outside the torus.
    #[arg(long)]
    pub include_boundary: bool,
    /// CSV output path for the records.
    #[arg(long)]
    pub out: Option<String>,
    /// Expected a,b. With --fan the prediction for the face choice is used when omitted.
    #[arg(long)]
    pub expect: Option<String>,
    /// Skip the fit.
    #[arg(long)]
    pub no_fit: bool,
}

pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { fan } => validate(fan, fmt),
        Command::Clemens(a) => clemens(a, fmt),
        Command::Predict { fan, class } => predict(fan, class.as_deref(), fmt),
        Command::Xfun { fan, at, class } => xfun(fan, at.as_deref(), class.as_deref(), fmt),
        Command::Density { fan, primes, z, action } => density(fan, primes, z, *action, fmt),
        Command::Euler { fan, primes, z, action } => euler(fan, *primes, z, *action, fmt),
        Command::Count(a) => count(a, fmt),
        Command::Fit { records, expect, region } => fit(records, expect.as_deref(), region.as_deref(), fmt),
        Command::Verify { seed, workers, only } => run_verify(*seed, *workers, only.as_deref(), fmt),
    }
}

fn emit(fmt: Format, json: Value, table: String) -> String {
    match fmt {
        Format::Json => serde_json::to_string_pretty(&json).expect("serializable"),
        Format::Table => table,
    }
}

fn validate(fan: &str, fmt: Format) -> Result<Outcome, CliError> {
    let file = input::load_fan(fan)?;
    let f = &file.fan;
    let j = json!({
        "valid": true,
        "rays": f.ray_count(),
        "max_cones": f.max_cones().len(),
        "lattice_rank": f.lattice_rank(),
        "smooth": f.is_smooth(),
        "complete": f.is_complete(),
        "group_order": file.action.as_ref().map(|a| a.order()),
        "boundary_rays": file.boundary_rays,
    });
    let t = pairs(&[
        ("status", "ok".into()),
        ("rays", f.ray_count().to_string()),
        ("maximal cones", f.max_cones().len().to_string()),
        ("smooth", f.is_smooth().to_string()),
        ("complete", f.is_complete().to_string()),
        ("group order", file.action.as_ref().map_or("1".into(), |a| a.order().to_string())),
    ]);
    Ok(Outcome::ok(emit(fmt, j, t)))
}

fn clemens(a: &FanArgs, fmt: Format) -> Result<Outcome, CliError> {
    let file = input::load_fan(&a.fan)?;
    let (boundary, _) = input::configuration(&file, a.boundary.as_deref(), &a.faces)?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["face", "dim", "obstructed", "witness"]);
    for face in clemens_complex(&file.fan, &boundary) {
        let spec = AdelicFaceSpec::single(PlaceKind::Real, &face.rays);
        let rep = analytic_obstruction(&file.fan, &boundary, &spec)?;
        let witness = rep.witness.as_ref().map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        table.row(vec![
            format!("{:?}", face.rays),
            face.dim().to_string(),
            rep.obstructed.to_string(),
            witness.clone().unwrap_or_default(),
        ]);
        rows.push(json!({"rays": face.rays, "dim": face.dim(), "obstructed": rep.obstructed, "witness": witness}));
    }
    Ok(Outcome::ok(emit(fmt, json!({ "boundary": boundary, "faces": rows }), table.render())))
}

fn class_arg(text: Option<&str>) -> Result<Option<Vec<BigInt>>, CliError> {
    text.map(|t| input::int_list(t).map(|v| v.into_iter().map(BigInt::from).collect()))
        .transpose()
}

fn prediction_row(label: String, p: &GrowthPrediction) -> Vec<String> {
    if p.obstructed {
        let w = p.witness.as_ref().map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        return vec![label, "obstructed".into(), "-".into(), "-".into(), "-".into(), p.rank.to_string(), format!("witness ({})", w.unwrap_or_default())];
    }
    vec![
        label,
        "ok".into(),
        p.a.clone().unwrap_or_default(),
        p.b.map_or(String::new(), |b| b.to_string()),
        p.rigid.map_or(String::new(), |r| r.to_string()),
        p.rank.to_string(),
        p.c_a.to_string(),
    ]
}

fn predict(a: &FanArgs, class: Option<&str>, fmt: Format) -> Result<Outcome, CliError> {
    let file = input::load_fan(&a.fan)?;
    let (boundary, spec) = input::configuration(&file, a.boundary.as_deref(), &a.faces)?;
    let lambda = class_arg(class)?;
    let specs: Vec<AdelicFaceSpec> = if spec.places.is_empty() && !boundary.is_empty() && a.faces.is_empty() {
        clemens_complex(&file.fan, &boundary)
            .into_iter()
            .map(|f| AdelicFaceSpec::single(PlaceKind::Real, &f.rays))
            .collect()
    } else {
        vec![spec]
    };
    let mut table = Table::new(&["face", "status", "a", "b", "rigid", "rank", "c_A"]);
    let mut out = Vec::new();
    for s in &specs {
        let p = predict_growth(&file.fan, &boundary, s, lambda.as_deref())?;
        let label = s
            .places
            .iter()
            .map(|pl| format!("{}={:?}", pl.name, pl.face_rays))
            .collect::<Vec<_>>()
            .join(" ");
        let label = if label.is_empty() { "(none)".to_string() } else { label };
        table.row(prediction_row(label.clone(), &p));
        out.push(json!({ "face": label, "prediction": p }));
    }
    Ok(Outcome::ok(emit(fmt, json!(out), table.render())))
}

fn xfun(a: &FanArgs, at: Option<&str>, class: Option<&str>, fmt: Format) -> Result<Outcome, CliError> {
    let file = input::load_fan(&a.fan)?;
    let (boundary, spec) = input::configuration(&file, a.boundary.as_deref(), &a.faces)?;
    let ap = adelic_picard(&file.fan, &boundary, &spec)?;
    let torsion: BigInt = ap.torsion().iter().product();
    let x = RationalConeFunction::of_cone(&ap.eff, &torsion)?;
    let s: Vec<BigRational> = match at {
        Some(t) => input::rational_list(t)?,
        None => ap.minus_k().free_rational(),
    };
    if s.len() != ap.free_rank() {
        return Err(CliError::Invalid(format!("point has {} coordinates, Pic(X; A) has rank {}", s.len(), ap.free_rank())));
    }
    let value = x.eval(&s)?;
    let l = match class_arg(class)? {
        Some(v) => ap.class_of_lambda(&v)?,
        None => ap.minus_k(),
    };
    let pole = match fujita_a(&ap, &l) {
        Ok(a_inv) => {
            let k = ap.minus_k().free_rational();
            let ell: Vec<BigRational> = l.free_rational().iter().zip(&k).map(|(li, ki)| &a_inv * li - ki).collect();
            Some((a_inv, x.pole_order_at(&ell)))
        }
        Err(_) => None,
    };
    let j = json!({
        "at": s.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "value": value.to_string(),
        "approx": rational_to_f64(&value),
        "terms": x.terms.len(),
        "a": pole.as_ref().map(|p| p.0.to_string()),
        "pole_order": pole.as_ref().map(|p| p.1),
    });
    let t = pairs(&[
        ("at", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
        ("value", format!("{value} ({:.6e})", rational_to_f64(&value))),
        ("simplicial terms", x.terms.len().to_string()),
        ("pole at a L + K", pole.map_or("-".into(), |(a, o)| format!("order {o} (a = {a})"))),
    ]);
    Ok(Outcome::ok(emit(fmt, j, t)))
}

fn shifts(text: &str, n: usize) -> Result<Vec<BigRational>, CliError> {
    let z = input::rational_list(text)?;
    match z.len() {
        1 => Ok(vec![z[0].clone(); n]),
        k if k == n => Ok(z),
        k => Err(CliError::Invalid(format!("{k} shifts given, expected 1 or {n}"))),
    }
}

fn density(fan: &str, primes: &str, z: &str, action: bool, fmt: Format) -> Result<Outcome, CliError> {
    let file = input::load_fan(fan)?;
    let act = if action { file.action.clone() } else { None };
    let n = act.as_ref().map_or(file.fan.ray_count(), |a| a.ray_orbits().len());
    let z = shifts(z, n)?;
    let mut table = Table::new(&["p", "density", "value"]);
    let mut out = Vec::new();
    for p in input::int_list(primes)? {
        if p < 2 {
            return Err(CliError::Invalid(format!("bad prime {p}")));
        }
        let v = denef_density(&LocalDensityQuery {
            fan: file.fan.clone(),
            action: act.clone(),
            q: p as u64,
            z: z.clone(),
        })?;
        let exact = v.exact().map(|x| x.to_string());
        table.row(vec![p.to_string(), exact.clone().unwrap_or_else(|| "-".into()), format!("{:.15}", v.to_f64())]);
        out.push(json!({ "p": p, "exact": exact, "value": v.to_f64() }));
    }
    Ok(Outcome::ok(emit(fmt, json!(out), table.render())))
}

fn euler(fan: &str, bound: u64, z: &str, action: bool, fmt: Format) -> Result<Outcome, CliError> {
    let file = input::load_fan(fan)?;
    let act = if action { file.action.clone() } else { None };
    let n = act.as_ref().map_or(file.fan.ray_count(), |a| a.ray_orbits().len());
    let z = shifts(z, n)?;
    let e = euler_product(&file.fan, act.as_ref(), &z, bound)?;
    let j = json!({ "bound": bound, "primes": primes_up_to(bound).len(), "raw": e.raw, "normalized": e.normalized });
    let t = pairs(&[
        ("primes up to", bound.to_string()),
        ("raw product", format!("{:.12}", e.raw)),
        ("normalized", format!("{:.12}", e.normalized)),
    ]);
    Ok(Outcome::ok(emit(fmt, j, t)))
}

fn expectation(text: &str) -> Result<(f64, f64), CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            toric_manin::polycore::parse_rational(s)
                .map(|r| rational_to_f64(&r))
                .ok_or_else(|| CliError::Invalid(format!("bad expectation `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Invalid("expectation must be a,b".into())),
    }
}

/// PASS iff |a_hat - a| <= 0.05 and |b_hat - b| <= 0.2.
pub fn verdict(fit: &FitResult, a: f64, b: f64) -> bool {
    (fit.a_hat - a).abs() <= 0.05 && (fit.b_hat - b).abs() <= 0.2
}

fn fit_report(records: &[CountRecord], expect: Option<(f64, f64)>, fmt: Format, csv_inline: Option<String>) -> Result<Outcome, CliError> {
    let fit = match fit_asymptotics(records) {
        Ok(f) => Some(f),
        Err(e) if expect.is_none() => {
            let mut text = csv_inline.unwrap_or_default();
            text.push_str(&format!("fit skipped: {e}"));
            return Ok(Outcome::ok(text));
        }
        Err(e) => return Err(e.into()),
    };
    let fit = fit.expect("fit computed");
    let pass = expect.map(|(a, b)| verdict(&fit, a, b));
    let mut table = Table::new(&["T", "N"]);
    for r in records {
        table.row(vec![r.t.to_string(), r.n.to_string()]);
    }
    let mut lines = vec![
        ("a_hat", format!("{:.4}", fit.a_hat)),
        ("b_hat", format!("{:.4}", fit.b_hat)),
        ("c_hat", format!("{:.4}", fit.c_hat)),
        ("residual", format!("{:.2e}", fit.residual)),
        ("checkpoints", fit.checkpoints.to_string()),
    ];
    if let (Some((a, b)), Some(p)) = (expect, pass) {
        lines.push(("expected", format!("a = {a}, b = {b}")));
        lines.push(("verdict", if p { "PASS".into() } else { "FAIL".into() }));
    }
    let j = json!({
        "records": records,
        "fit": fit,
        "expected": expect.map(|(a, b)| json!({"a": a, "b": b})),
        "verdict": pass.map(|p| if p { "PASS" } else { "FAIL" }),
    });
    let mut text = String::new();
    if let Some(csv) = csv_inline {
        text.push_str(&csv);
        text.push('\n');
    }
    text.push_str(&table.render());
    text.push_str("\n\n");
    text.push_str(&pairs(&lines));
    Ok(Outcome {
        text: emit(fmt, j, text),
        code: if pass == Some(false) { 3 } else { 0 },
    })
}

fn count(a: &CountArgs, fmt: Format) -> Result<Outcome, CliError> {
    let ts = input::schedule(a.schedule.as_deref(), a.tmax)?;
    let opts = CountOptions {
        workers: a.workers.unwrap_or_else(|| CountOptions::default().workers),
        include_boundary: a.include_boundary,
    };
    let mut expect = a.expect.as_deref().map(expectation).transpose()?;
    let records = match (&a.fan, &a.model) {
        (Some(fan), None) => {
            let file = input::load_fan(fan)?;
            let (boundary, spec) = input::configuration(&file, a.boundary.as_deref(), &a.faces)?;
            let lambda: Vec<i64> = match &a.class {
                Some(c) => input::int_list(c)?,
                None => (0..file.fan.ray_count()).map(|i| i64::from(!boundary.contains(&i))).collect(),
            };
            let model = CoxModel::new(fan, &file.fan, &boundary, &lambda)?;
            let region = match &a.region {
                Some(r) => Region::parse_named(r, &model.var_names())?,
                None => Region::all(),
            };
            if expect.is_none() && !a.no_fit {
                let big: Vec<BigInt> = lambda.iter().map(|&x| BigInt::from(x)).collect();
                let p = predict_growth(&file.fan, &boundary, &spec, Some(&big))?;
                if let (Some(ar), Some(b)) = (p.a_rational(), p.b) {
                    if !ar.is_zero() {
                        expect = Some((rational_to_f64(&ar), b as f64));
                    }
                }
            }
            enumerate_cox(&model, &ts, &region, &opts)?
        }
        (None, Some(m)) => {
            let model = input::load_model(m)?;
            let region = match &a.region {
                Some(r) if r.contains('<') || r.contains('>') => Region::parse_named(r, model.vars())?,
                Some(name) => model.region(name)?,
                None => Region::all(),
            };
            enumerate_affine(&model, &ts, &region, &opts)?
        }
        _ => return Err(CliError::Invalid("exactly one of --fan or --model is required".into())),
    };
    let mut buf = Vec::new();
    write_records_csv(&mut buf, &records).map_err(|e| CliError::Compute(e.to_string()))?;
    let csv_inline = match &a.out {
        Some(path) => {
            std::fs::File::create(path)?.write_all(&buf)?;
            None
        }
        None if fmt == Format::Table => Some(String::from_utf8(buf).expect("csv is utf-8")),
        None => None,
    };
    if a.no_fit {
        let text = csv_inline.unwrap_or_else(|| format!("{} records written", records.len()));
        return Ok(Outcome::ok(emit(fmt, json!({ "records": records }), text)));
    }
    fit_report(&records, expect, fmt, csv_inline)
}

fn fit(path: &str, expect: Option<&str>, region: Option<&str>, fmt: Format) -> Result<Outcome, CliError> {
    let file = std::fs::File::open(path)?;
    let mut records = read_records_csv(file).map_err(|e| CliError::Invalid(e.to_string()))?;
    if let Some(r) = region {
        records.retain(|x| x.region_id == r);
    }
    let expect = expect.map(expectation).transpose()?;
    fit_report(&records, expect, fmt, None)
}

fn run_verify(seed: u64, workers: Option<usize>, only: Option<&str>, fmt: Format) -> Result<Outcome, CliError> {
    let cfg = VerifyConfig {
        seed,
        workers: workers.unwrap_or_else(|| VerifyConfig::default().workers),
    };
    let which: Vec<u8> = match only {
        Some(list) => input::index_list(list)?.into_iter().map(|x| x as u8).collect(),
        None => verify::CRITERIA.to_vec(),
    };
    let reports: Vec<_> = which.iter().map(|&n| verify::run(n, &cfg)).collect();
    let all = reports.iter().all(|r| r.pass());
    let text = reports.iter().map(|r| r.line()).collect::<Vec<_>>().join("\n");
    Ok(Outcome {
        text: emit(fmt, json!(reports), text),
        code: if all { 0 } else { 3 },
    })
}
