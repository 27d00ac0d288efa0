//! The `k3c` command line.
//!
//! Results go to stdout (or `--out`) as JSON, a short summary goes to
//! stderr. Exit status is 0 on success, 1 on domain or input errors and 2 on
//! usage errors; failures also print `{"error": {code, message, location}}`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::collapse::{self, CollapseError, CollapseInput};
use crate::lattice::{self, Lattice, LatticeError, LatticeVector, RationalSubspace};
use crate::metric::{self, FiniteMetricSpace, FlatTorus, GhOptions, MetricError, TorusGrid};
use crate::period_domain::{self, DegenerationError, DEFAULT_M_MAX};
use crate::weierstrass::{self, MeshOptions, WeierstrassError, WeierstrassFamily};

/// Tolerance names accepted by `--tol.<name>`.
const TOLERANCES: [(&str, f64); 2] = [
    ("cluster", weierstrass::DEFAULT_CLUSTER_TOLERANCE),
    ("metric", metric::METRIC_TOLERANCE),
];

#[derive(Parser, Debug)]
#[command(name = "k3c", version, about = "Collapsing K3 surfaces at desk scale")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Named tolerance, written `--tol.<name> <value>`.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", hide = true)]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice arithmetic.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Monodromy of one-parameter degenerations.
    #[command(subcommand)]
    Degenerate(DegenerateCommand),
    /// Elliptic fibrations in Weierstrass form.
    #[command(subcommand)]
    Fibration(FibrationCommand),
    /// Sampled flat torus, optionally modulo -1.
    Torus {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long)]
        mod_minus_one: bool,
    },
    /// Gromov-Hausdorff bounds between two metric spaces.
    Gh {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
    /// Limit metric spaces and continuity probes.
    #[command(subcommand)]
    Collapse(CollapseCommand),
}

#[derive(Args, Debug)]
struct LatticeSource {
    /// Lattice JSON file; defaults to the K3 lattice.
    #[arg(long, conflicts_with = "degree")]
    lattice: Option<PathBuf>,
    /// Use the polarized lattice of square 2d.
    #[arg(long)]
    degree: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum LatticeCommand {
    /// Signature, rank and determinant of a lattice file.
    Signature { file: PathBuf },
    /// Print the K3 lattice, or the polarized lattice with --degree.
    Build {
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Form on e^perp / e for a primitive isotropic e.
    Quotient {
        /// Integer vector, e.g. `[1,0,0,0]` or `1,0,0,0`.
        #[arg(long)]
        iso: String,
        #[command(flatten)]
        source: LatticeSource,
    },
    /// Boundary stratum of an isotropic subspace.
    Classify {
        /// JSON `{"basis": [["p/q", ...], ...]}`.
        #[arg(long)]
        subspace: PathBuf,
        #[command(flatten)]
        source: LatticeSource,
    },
}

#[derive(Subcommand, Debug)]
enum DegenerateCommand {
    /// Type and boundary stratum of a monodromy matrix.
    Classify {
        /// JSON `{"T": [[...]]}`, optionally with a `"lattice"` entry.
        #[arg(long)]
        monodromy: PathBuf,
        #[command(flatten)]
        source: LatticeSource,
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: u64,
    },
}

#[derive(Subcommand, Debug)]
enum FibrationCommand {
    /// Singular fibers and their Kodaira types.
    Analyze { file: PathBuf },
    /// Special Kähler metric on the base, sampled at landmarks.
    Mesh {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        res: usize,
        #[arg(long, default_value_t = 1e-3)]
        puncture: f64,
        #[arg(long, default_value_t = 64)]
        landmarks: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CollapseCommand {
    /// Diameter-one metric space of a collapse input.
    Phi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 150)]
        res: usize,
        #[arg(long, default_value_t = 1e-3)]
        puncture: f64,
    },
    /// Same-carrier distances along a path.
    Probe {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 150)]
        res: usize,
        #[arg(long, default_value_t = 1e-3)]
        puncture: f64,
    },
    /// Bounds to the unit segment along the two-cluster family (exploratory).
    Type2 {
        /// Comma separated parameters.
        #[arg(long, default_value = "0.6,0.4,0.2")]
        eps: String,
        #[arg(long, default_value_t = 60)]
        res: usize,
        #[arg(long, default_value_t = 1e-3)]
        puncture: f64,
        #[arg(long, default_value_t = 33)]
        segment: usize,
        #[arg(long, default_value_t = 20)]
        iters: usize,
    },
}

/// Path file of `collapse probe`.
#[derive(Deserialize, Serialize, Debug)]
#[serde(untagged)]
enum PathFile {
    Interpolate {
        from: CollapseInput,
        to: CollapseInput,
        steps: usize,
    },
    Points {
        points: Vec<CollapseInput>,
        #[serde(default)]
        t: Option<Vec<f64>>,
    },
}

#[derive(Deserialize)]
struct MonodromyFile {
    #[serde(rename = "T")]
    t: Vec<Vec<i64>>,
    #[serde(default)]
    lattice: Option<Lattice>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SubspaceFile {
    Wrapped(RationalSubspace),
    Bare(#[serde(with = "crate::json::rational_rows")] Vec<Vec<num_rational::BigRational>>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GramFile {
    Torus(FlatTorus),
    Bare(Vec<Vec<f64>>),
}

#[derive(Debug)]
struct CliError {
    code: &'static str,
    message: String,
    location: Option<String>,
    exit: i32,
}

impl CliError {
    fn domain(code: &'static str, message: impl ToString) -> Self {
        CliError {
            code,
            message: message.to_string(),
            location: None,
            exit: 1,
        }
    }

    fn usage(message: impl ToString) -> Self {
        CliError {
            code: "usage",
            message: message.to_string(),
            location: None,
            exit: 2,
        }
    }

    fn at(mut self, location: impl ToString) -> Self {
        self.location = Some(location.to_string());
        self
    }

    fn to_json(&self) -> Value {
        json!({"error": {"code": self.code, "message": self.message, "location": self.location}})
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::domain("lattice", e)
    }
}

impl From<DegenerationError> for CliError {
    fn from(e: DegenerationError) -> Self {
        CliError::domain("degeneration", e)
    }
}

impl From<WeierstrassError> for CliError {
    fn from(e: WeierstrassError) -> Self {
        CliError::domain("fibration", e)
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::domain("metric", e)
    }
}

impl From<CollapseError> for CliError {
    fn from(e: CollapseError) -> Self {
        CliError::domain("collapse", e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Output {
    value: Value,
    summary: String,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::domain("io", e).at(path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        let loc = format!("{}:{}:{}", path.display(), e.line(), e.column());
        CliError::domain("parse", e).at(loc)
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

/// Turns `--tol.name value` and `--tol.name=value` into `--tol name=value`.
fn rewrite_tolerance_flags(args: Vec<OsString>) -> Vec<OsString> {
    let mut out = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(s) = arg.to_str() else {
            out.push(arg);
            continue;
        };
        if let Some(rest) = s.strip_prefix("--tol.") {
            out.push("--tol".into());
            if rest.contains('=') {
                out.push(rest.into());
            } else {
                let value = iter
                    .next()
                    .and_then(|v| v.into_string().ok())
                    .unwrap_or_default();
                out.push(format!("{rest}={value}").into());
            }
        } else {
            out.push(arg);
        }
    }
    out
}

fn tolerances(raw: &[String]) -> CliResult<BTreeMap<&'static str, f64>> {
    let mut map: BTreeMap<&'static str, f64> = TOLERANCES.iter().copied().collect();
    for entry in raw {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("tolerance {entry:?} needs a value")))?;
        let key = TOLERANCES
            .iter()
            .map(|(k, _)| *k)
            .find(|k| *k == name)
            .ok_or_else(|| CliError::usage(format!("unknown tolerance {name:?}")))?;
        let v: f64 = value.parse().map_err(|_| {
            CliError::usage(format!("tolerance {name} = {value:?} is not a number"))
        })?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::usage(format!(
                "tolerance {name} must be positive"
            )));
        }
        map.insert(key, v);
    }
    Ok(map)
}

fn parse_int_vector(s: &str) -> CliResult<Vec<i64>> {
    let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
    trimmed
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| CliError::usage(format!("{x:?} is not an integer")))
        })
        .collect()
}

fn parse_floats(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("{x:?} is not a number")))
        })
        .collect()
}

fn load_lattice(source: &LatticeSource) -> CliResult<Lattice> {
    match (&source.lattice, source.degree) {
        (Some(path), _) => read_json(path),
        (None, Some(d)) => Ok(lattice::build_polarized_lattice(d)?.lattice),
        (None, None) => Ok(lattice::build_k3_lattice()),
    }
}

fn determinant_value(l: &Lattice) -> Value {
    let d = l.determinant();
    match i64::try_from(&d) {
        Ok(v) => json!(v),
        Err(_) => json!(d.to_string()),
    }
}

fn lattice_command(cmd: &LatticeCommand) -> CliResult<Output> {
    match cmd {
        LatticeCommand::Signature { file } => {
            let l: Lattice = read_json(file)?;
            let s = l.signature()?;
            Ok(Output {
                value: json!({"positive": s.positive, "negative": s.negative, "rank": l.rank(), "determinant": determinant_value(&l)}),
                summary: format!(
                    "signature ({}, {}), rank {}",
                    s.positive,
                    s.negative,
                    l.rank()
                ),
            })
        }
        LatticeCommand::Build { degree } => match degree {
            None => {
                let l = lattice::build_k3_lattice();
                Ok(Output {
                    value: to_value(&l),
                    summary: "K3 lattice E8(-1)^2 + U^3".into(),
                })
            }
            Some(d) => {
                let p = lattice::build_polarized_lattice(*d)?;
                Ok(Output {
                    value: to_value(&p),
                    summary: format!(
                        "polarized lattice of degree {}, rank {}",
                        2 * d,
                        p.lattice.rank()
                    ),
                })
            }
        },
        LatticeCommand::Quotient { iso, source } => {
            let l = load_lattice(source)?;
            let e = LatticeVector(parse_int_vector(iso)?);
            let q = l.quotient_by_isotropic(&e)?;
            let s = q.lattice.signature()?;
            let mut value = to_value(&q);
            value["signature"] = to_value(&s);
            Ok(Output {
                value,
                summary: format!(
                    "quotient of rank {} with signature ({}, {})",
                    q.lattice.rank(),
                    s.positive,
                    s.negative
                ),
            })
        }
        LatticeCommand::Classify { subspace, source } => {
            let l = load_lattice(source)?;
            let s = match read_json::<SubspaceFile>(subspace)? {
                SubspaceFile::Wrapped(s) => s,
                SubspaceFile::Bare(rows) => RationalSubspace::new(rows)?,
            };
            let d = l.classify_boundary(&s)?;
            let mut value = to_value(&d);
            if let Some(q) = &d.quotient {
                value["quotient_signature"] = to_value(&q.lattice.signature()?);
            }
            Ok(Output {
                value,
                summary: format!(
                    "{:?} stratum, divisibility {}",
                    d.kind, d.invariants.divisibility
                ),
            })
        }
    }
}

fn degenerate_command(cmd: &DegenerateCommand) -> CliResult<Output> {
    let DegenerateCommand::Classify {
        monodromy,
        source,
        m_max,
    } = cmd;
    let file: MonodromyFile = read_json(monodromy)?;
    let l = match (&file.lattice, &source.lattice, source.degree) {
        (Some(l), None, None) => l.clone(),
        (Some(_), _, _) => {
            return Err(CliError::usage(
                "monodromy file carries a lattice; drop --lattice/--degree",
            ))
        }
        (None, None, None) if file.t.len() != 22 => {
            return Err(CliError::usage(format!(
                "{0}x{0} monodromy needs --lattice, --degree or a \"lattice\" entry",
                file.t.len()
            )))
        }
        _ => load_lattice(source)?,
    };
    let md = period_domain::monodromy_log(&file.t, &l, *m_max)?;
    let kind = period_domain::classify_degeneration(&md)?;
    let stratum = match kind {
        period_domain::DegenerationType::TypeI => None,
        _ => Some(period_domain::limit_boundary_stratum(&md, &l)?),
    };
    Ok(Output {
        value: json!({"type": kind, "stratum": stratum, "m": md.m, "N": to_value(&md)["N"]}),
        summary: format!(
            "type {} degeneration, m = {}",
            to_value(&kind).as_str().unwrap_or("?"),
            md.m
        ),
    })
}

fn fibration_command(cmd: &FibrationCommand, tol: &BTreeMap<&str, f64>) -> CliResult<Output> {
    match cmd {
        FibrationCommand::Analyze { file } => {
            let f: WeierstrassFamily = read_json(file)?;
            let fibers = weierstrass::singular_fibers_with(&f, tol["cluster"])?;
            let sum = weierstrass::euler_sum(&fibers);
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for fib in &fibers {
                *counts.entry(fib.kodaira_type.to_string()).or_default() += 1;
            }
            Ok(Output {
                value: json!({"fibers": fibers, "count": fibers.len(), "types": counts, "euler_sum": sum}),
                summary: format!("{} singular fibers, Euler sum {}", fibers.len(), sum),
            })
        }
        FibrationCommand::Mesh {
            file,
            res,
            puncture,
            landmarks,
        } => {
            let f: WeierstrassFamily = read_json(file)?;
            let mesh = weierstrass::mesh_metric_with(
                &f,
                &MeshOptions {
                    resolution: *res,
                    puncture_radius: *puncture,
                    landmarks: *landmarks,
                },
            )?;
            Ok(Output {
                summary: format!(
                    "{} landmarks on {} nodes, raw diameter {:.6}",
                    mesh.space.n(),
                    mesh.nodes,
                    mesh.raw_diameter
                ),
                value: to_value(&mesh),
            })
        }
    }
}

fn load_space(path: &Path, tol: f64) -> CliResult<FiniteMetricSpace> {
    let m: FiniteMetricSpace = read_json(path)?;
    m.validate(tol)
        .map_err(|e| CliError::from(e).at(path.display()))?;
    Ok(m)
}

fn collapse_command(cmd: &CollapseCommand, seed: u64) -> CliResult<Output> {
    match cmd {
        CollapseCommand::Phi {
            input,
            res,
            puncture,
        } => {
            let inp: CollapseInput = read_json(input)?;
            let m = collapse::phi(&inp, *res, *puncture)?;
            Ok(Output {
                summary: format!(
                    "{}: {} points, diameter {}",
                    inp.variant(),
                    m.n(),
                    m.diameter()
                ),
                value: to_value(&m),
            })
        }
        CollapseCommand::Probe {
            path,
            res,
            puncture,
        } => {
            let file: PathFile = read_json(path)?;
            let report = match file {
                PathFile::Interpolate { from, to, steps } => {
                    collapse::interpolation_probe(&from, &to, steps, *res, *puncture)?
                }
                PathFile::Points { points, t } => {
                    let distances = collapse::continuity_probe(&points, *res, *puncture)?;
                    let steps = match t {
                        Some(t) if t.len() == points.len() => t,
                        Some(t) => {
                            return Err(CliError::domain(
                                "collapse",
                                format!("{} parameters for {} points", t.len(), points.len()),
                            )
                            .at(path.display()))
                        }
                        None => (0..points.len()).map(|k| k as f64).collect(),
                    };
                    collapse::ProbeReport {
                        steps,
                        distances,
                        refinement: None,
                    }
                }
            };
            let worst = report.distances.iter().copied().fold(0.0, f64::max);
            let monotone = report.refinement.as_ref().map(|r| r.monotone);
            Ok(Output {
                summary: format!(
                    "{} steps, largest distance {:.3e}, refinement monotone: {}",
                    report.distances.len(),
                    worst,
                    monotone.map_or("n/a".to_string(), |m| m.to_string())
                ),
                value: to_value(&report),
            })
        }
        CollapseCommand::Type2 {
            eps,
            res,
            puncture,
            segment,
            iters,
        } => {
            let eps = parse_floats(eps)?;
            let samples = collapse::type2_limit_probe(
                &eps,
                *res,
                *puncture,
                *segment,
                &GhOptions {
                    iterations: *iters,
                    seed,
                },
            )?;
            Ok(Output {
                summary: format!("{} exploratory samples", samples.len()),
                value: json!({"exploratory": true, "samples": samples}),
            })
        }
    }
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let tol = tolerances(&cli.tol)?;
    match &cli.command {
        Command::Lattice(c) => lattice_command(c),
        Command::Degenerate(c) => degenerate_command(c),
        Command::Fibration(c) => fibration_command(c, &tol),
        Command::Torus {
            gram,
            samples,
            mod_minus_one,
        } => {
            let torus = match read_json::<GramFile>(gram)? {
                GramFile::Torus(t) => t,
                GramFile::Bare(g) => {
                    FlatTorus::new(g).map_err(|e| CliError::from(e).at(gram.display()))?
                }
            };
            let grid = TorusGrid::new(&torus, *samples)?;
            let m = if *mod_minus_one {
                grid.quotient_space()?
            } else {
                grid.space()?
            };
            Ok(Output {
                summary: format!("{} points, diameter {}", m.n(), m.diameter()),
                value: to_value(&m),
            })
        }
        Command::Gh { a, b, iters } => {
            let ma = load_space(a, tol["metric"])?;
            let mb = load_space(b, tol["metric"])?;
            let opts = GhOptions {
                iterations: *iters,
                seed: cli.seed,
            };
            let lower = metric::gh_lower(&ma, &mb);
            let upper = metric::gh_upper(&ma, &mb, &opts);
            Ok(Output {
                value: json!({"lower": lower, "upper": upper, "iterations": iters, "seed": cli.seed}),
                summary: format!("{lower} <= d_GH <= {upper}"),
            })
        }
        Command::Collapse(c) => collapse_command(c, cli.seed),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("K3C_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::usage(format!("K3C_THREADS={raw:?} is not a positive integer"))
        })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn write_value(value: &Value, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::domain("io", e).at(path.display()))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::domain("io", e)),
    }
}

fn fail(err: &CliError, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(
        stdout,
        "{}",
        serde_json::to_string_pretty(&err.to_json()).expect("json")
    );
    let _ = writeln!(stderr, "k3c: {}", err.message);
    err.exit
}

/// Runs the command line with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = rewrite_tolerance_flags(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{e}");
            let err = CliError::usage(e.kind().to_string());
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&err.to_json()).expect("json")
            );
            return 2;
        }
    };
    if let Err(e) = configure_threads() {
        return fail(&e, stdout, stderr);
    }
    match execute(&cli).and_then(|o| {
        write_value(&o.value, cli.out.as_deref(), stdout)?;
        Ok(o.summary)
    }) {
        Ok(summary) => {
            let _ = writeln!(stderr, "{summary}");
            0
        }
        Err(e) => fail(&e, stdout, stderr),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn tolerance_flags_are_rewritten() {
        let args: Vec<OsString> = ["k3c", "--tol.cluster", "1e-6", "--tol.metric=1e-8", "gh"]
            .iter()
            .map(Into::into)
            .collect();
        let out = rewrite_tolerance_flags(args);
        let s: Vec<&str> = out.iter().map(|a| a.to_str().unwrap()).collect();
        assert_eq!(
            s,
            ["k3c", "--tol", "cluster=1e-6", "--tol", "metric=1e-8", "gh"]
        );
    }

    #[test]
    fn tolerance_validation() {
        assert_eq!(
            tolerances(&["cluster=1e-6".into()]).unwrap()["cluster"],
            1e-6
        );
        assert_eq!(tolerances(&["bogus=1".into()]).unwrap_err().exit, 2);
        assert_eq!(tolerances(&["metric=-1".into()]).unwrap_err().exit, 2);
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, out) = call(&["k3c", "frobnicate"]);
        assert_eq!(code, 2);
        assert!(out.contains("\"code\": \"usage\""));
    }

    #[test]
    fn missing_file_is_domain_error() {
        let (code, out) = call(&["k3c", "lattice", "signature", "/nonexistent/k3.json"]);
        assert_eq!(code, 1);
        assert!(out.contains("\"code\": \"io\""));
    }

    #[test]
    fn build_then_quotient() {
        let (code, out) = call(&[
            "k3c",
            "lattice",
            "quotient",
            "--iso",
            "[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1,0,0,0,0,0]",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["signature"], json!({"positive": 2, "negative": 18}));
    }

    #[test]
    fn integer_vectors() {
        assert_eq!(parse_int_vector("[1, -2,3]").unwrap(), vec![1, -2, 3]);
        assert_eq!(parse_int_vector("4").unwrap(), vec![4]);
        assert!(parse_int_vector("[1,x]").is_err());
    }
}
