//! `asyminf`: batch front end over the core crate.
//!
//! Exit codes: 0 success, 2 parse error, 3 numerical failure, 4 a
//! certificate (or reproduction case) that fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asyminf::asymptotics::{estimate_with, trace_csv, EstimateOptions, EstimatorParams};
use asyminf::certificates::{
    error_bound_certificate, existence_certificate, optimality_at_infinity_check, ray_existence_check, Certificate, ProblemSpec,
    Status,
};
use asyminf::geometry::{recession_cone, ConeUnion, Direction, GenCone};
use asyminf::poly_infinity::{dir_normal_cone_at_infinity, normal_cone_at_infinity, recession_sweep, swept_union};
use asyminf::reproduce::{reproduce_examples, CaseStatus};
use asyminf::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const SCHEMA: u64 = 1;

#[derive(Parser)]
#[command(name = "asyminf", version, about = "Normal cones, subdifferentials and certificates at infinity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recession cone of `omega`.
    Asymcone(Common),
    /// Normal cone at infinity of `omega`, in one direction or swept.
    NconeInf(Common),
    /// Directional subdifferential estimate of `f`.
    SubdiffInf(Common),
    /// Run one certificate.
    Certify {
        #[arg(value_enum)]
        theorem: Theorem,
        /// Base point of the ray, for `ray` (default: the origin).
        #[arg(long)]
        xbar: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the worked examples.
    Reproduce(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Optimality,
    Existence,
    Ray,
    Errorbound,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma separated, e.g. "1,0"; normalized.
    #[arg(long)]
    direction: Option<String>,
    /// Direction grid resolution for sweeps and certificates.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rungs: Option<usize>,
    /// Output file (a directory for `reproduce`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

enum Failure {
    Parse(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidInput(_) => Failure::Parse(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Output plus whether it reports a failing certificate.
struct Report {
    body: String,
    failed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(failed) => ExitCode::from(if failed { 4 } else { 0 }),
        Err(Failure::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> CliResult<bool> {
    let (report, common) = match cmd {
        Command::Asymcone(c) => (asymcone(&c)?, c),
        Command::NconeInf(c) => (ncone_inf(&c)?, c),
        Command::SubdiffInf(c) => (subdiff_inf(&c)?, c),
        Command::Certify { theorem, xbar, common } => (certify(theorem, xbar.as_deref(), &common)?, common),
        Command::Reproduce(c) => return reproduce(&c),
    };
    emit(&report.body, common.out.as_deref())?;
    Ok(report.failed)
}

fn emit(body: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn params(c: &Common) -> CliResult<EstimatorParams> {
    let mut p = EstimatorParams::default();
    if let Some(s) = c.seed {
        p.seed = s;
    }
    if let Some(d) = c.delta {
        p.delta = d;
    }
    if let Some(k) = c.rungs {
        p.rungs = k;
    }
    p.validate()?;
    Ok(p)
}

fn parse_vector(s: &str, flag: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Parse(format!("{flag}: cannot parse {t:?} as a number"))))
        .collect()
}

fn direction(c: &Common, n: usize) -> CliResult<Option<Direction>> {
    let Some(s) = &c.direction else { return Ok(None) };
    let v = parse_vector(s, "--direction")?;
    if v.len() != n {
        return Err(Failure::Parse(format!("--direction has {} coordinates, the problem has {n}", v.len())));
    }
    Ok(Some(Direction::new(&v)?))
}

fn need_direction(c: &Common, n: usize) -> CliResult<Direction> {
    direction(c, n)?.ok_or_else(|| Failure::Parse("--direction is required for this command".into()))
}

/// Reads a problem document: a `ProblemSpec` object with `"schema": 1`.
fn load(c: &Common) -> CliResult<ProblemSpec> {
    let path = c.input.as_ref().ok_or_else(|| Failure::Parse("--input is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())))?;
    let obj = v.as_object_mut().ok_or_else(|| Failure::Parse("$: expected an object".into()))?;
    match obj.remove("schema") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA) => {}
        Some(other) => return Err(Failure::Parse(format!("$.schema: unsupported version {other}"))),
        None => return Err(Failure::Parse("$.schema: missing (expected 1)".into())),
    }
    Ok(ProblemSpec::from_value(&v, "$")?)
}

fn json_doc(command: &str, mut body: Value) -> String {
    if let Some(o) = body.as_object_mut() {
        o.insert("schema".into(), json!(SCHEMA));
        o.insert("command".into(), json!(command));
    }
    let mut s = serde_json::to_string_pretty(&body).expect("serializable");
    s.push('\n');
    s
}

fn coords(v: &[f64]) -> String {
    v.iter().map(|c| format!("{c:e}")).collect::<Vec<_>>().join(" ")
}

fn cone_rows(out: &mut String, label: &str, piece: usize, c: &GenCone) {
    for g in &c.generators {
        out.push_str(&format!("{label},{piece},generator,{}\n", coords(g)));
    }
    for l in &c.lineality {
        out.push_str(&format!("{label},{piece},lineality,{}\n", coords(l)));
    }
    if c.is_zero() {
        out.push_str(&format!("{label},{piece},zero,\n"));
    }
}

fn union_rows(out: &mut String, label: &str, u: &ConeUnion) {
    for (i, p) in u.pieces.iter().enumerate() {
        cone_rows(out, label, i, p);
    }
}

fn asymcone(c: &Common) -> CliResult<Report> {
    let ps = load(c)?;
    let cone = recession_cone(&ps.omega)?;
    let body = match c.format {
        Format::Json => json_doc("asymcone", json!({"dim": ps.dim(), "recession_cone": cone})),
        Format::Csv => {
            let mut s = String::from("cone,piece,kind,coords\n");
            cone_rows(&mut s, "recession", 0, &cone);
            s
        }
    };
    Ok(Report { body, failed: false })
}

fn ncone_inf(c: &Common) -> CliResult<Report> {
    let ps = load(c)?;
    let p = params(c)?;
    let n = ps.dim();
    let (label, value, union) = match direction(c, n)? {
        Some(u) => {
            let cone = dir_normal_cone_at_infinity(&ps.omega, &u)?;
            ("directional", json!({"direction": u, "cone": cone}), cone)
        }
        None => {
            let dirs = recession_sweep(&ps.omega, c.grid, p.seed)?;
            let swept = swept_union(&ps.omega, &dirs)?;
            let full = normal_cone_at_infinity(&ps.omega)?;
            ("swept", json!({"grid": c.grid, "directions": dirs.len(), "swept_union": swept, "cone": full}), full)
        }
    };
    let body = match c.format {
        Format::Json => json_doc("ncone-inf", json!({"mode": label, "result": value})),
        Format::Csv => {
            let mut s = String::from("cone,piece,kind,coords\n");
            union_rows(&mut s, label, &union);
            s
        }
    };
    Ok(Report { body, failed: false })
}

fn subdiff_inf(c: &Common) -> CliResult<Report> {
    let ps = load(c)?;
    let f = ps.objective()?;
    let u = need_direction(c, ps.dim())?;
    let p = params(c)?;
    let opts = EstimateOptions { trace: c.format == Format::Csv, ..Default::default() };
    let (approx, trace) = estimate_with(f, &u, &p, &opts)?;
    let body = match c.format {
        Format::Json => json_doc("subdiff-inf", json!({"estimate": approx, "params": p})),
        Format::Csv => trace_csv(&trace),
    };
    Ok(Report { body, failed: false })
}

fn certify(t: Theorem, xbar: Option<&str>, c: &Common) -> CliResult<Report> {
    let ps = load(c)?;
    let p = params(c)?;
    let n = ps.dim();
    let cert: Certificate = match t {
        Theorem::Optimality => optimality_at_infinity_check(&ps, &need_direction(c, n)?, &p)?,
        Theorem::Existence => existence_certificate(&ps, c.grid, &p)?,
        Theorem::Ray => {
            let x = match xbar {
                Some(s) => parse_vector(s, "--xbar")?,
                None => vec![0.0; n],
            };
            if x.len() != n {
                return Err(Failure::Parse(format!("--xbar has {} coordinates, the problem has {n}", x.len())));
            }
            ray_existence_check(&ps, &x, &need_direction(c, n)?, &p)?
        }
        Theorem::Errorbound => {
            if ps.g.is_empty() {
                return Err(Failure::Parse("$.g: errorbound needs at least one constraint".into()));
            }
            error_bound_certificate(&ps.g, &ps.omega, c.grid, &p)?
        }
    };
    let failed = cert.status == Status::Fails;
    let body = match c.format {
        Format::Json => json_doc("certify", serde_json::to_value(&cert).expect("serializable")),
        Format::Csv => {
            let mut s = String::from("theorem,status,u,qualification,condition,stability\n");
            let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
            for d in &cert.directions {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    cert.theorem,
                    json!(cert.status).as_str().unwrap_or(""),
                    coords(d.u.coords()),
                    opt(d.qualification),
                    opt(d.condition),
                    d.stability
                ));
            }
            s
        }
    };
    Ok(Report { body, failed })
}

/// One JSON document per case plus `bundle.json` when `--out` names a
/// directory; the whole bundle on stdout otherwise.
fn reproduce(c: &Common) -> CliResult<bool> {
    if c.input.is_some() || c.direction.is_some() {
        return Err(Failure::Parse("reproduce takes no --input or --direction".into()));
    }
    let p = params(c)?;
    let bundle = reproduce_examples(&p)?;
    let pretty = |v: &Value| {
        let mut s = serde_json::to_string_pretty(v).expect("serializable");
        s.push('\n');
        s
    };
    let whole = serde_json::to_value(&bundle).expect("serializable");
    let body = match c.format {
        Format::Json => pretty(&whole),
        Format::Csv => {
            let mut s = String::from("id,status,blocking\n");
            for k in &bundle.cases {
                s.push_str(&format!("{},{},{}\n", k.id, json!(k.status).as_str().unwrap_or(""), k.blocking));
            }
            s
        }
    };
    match &c.out {
        Some(dir) => {
            let io = |e: std::io::Error| Failure::Numerical(format!("cannot write under {}: {e}", dir.display()));
            fs::create_dir_all(dir).map_err(io)?;
            for k in &bundle.cases {
                let doc = json!({"schema": SCHEMA, "seed": bundle.seed, "case": k});
                fs::write(dir.join(format!("{}.json", k.id)), pretty(&doc)).map_err(io)?;
            }
            let name = if c.format == Format::Csv { "bundle.csv" } else { "bundle.json" };
            fs::write(dir.join(name), body).map_err(io)?;
        }
        None => print!("{body}"),
    }
    for k in &bundle.cases {
        if k.status == CaseStatus::Flagged {
            eprintln!("note: {} flagged (non-blocking): {}", k.id, k.note);
        }
    }
    Ok(!bundle.ok)
}
