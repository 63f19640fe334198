//! The `topophase` command-line driver.
//!
//! Exit codes: 0 on success (and for `check`, a topological scenario), 1 when
//! `check` classifies the scenario as anything else, 2 on any input error.

pub use crate::veccalc::format_number;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

use crate::phase::{line_phase, phase_vector_field, PhaseError, DEFAULT_TOL};
use crate::relkit::{duality_map, RelError};
use crate::scenario::{parse_scenario, Scenario, ScenarioError};
use crate::topocheck::{classify, Classification, TopoError};
use crate::veccalc::Vec3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_TOPOLOGICAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "topophase", version, about = "Topological phases of induced dipoles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Loop or line phase along one path.
    Phase {
        file: PathBuf,
        #[arg(long)]
        path: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Topology report; exits 1 unless the scenario is topological.
    Check {
        file: PathBuf,
        /// Also print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Phase and classification as one numeric parameter varies.
    Sweep {
        file: PathBuf,
        /// Dotted key into the scenario file, e.g. `fields.B.0.params.magnitude`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: PathBuf,
        /// Path to integrate; defaults to the first closed path.
        #[arg(long)]
        path: Option<String>,
    },
    /// E, B and T sampled on a grid.
    Fields {
        file: PathBuf,
        /// `x0:x1:nx,y0:y1:ny,z0:z1:nz` or `ring:r:n[:z]`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        /// Minimum distance from any field singularity.
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
    },
    /// Writes the electric/magnetic dual scenario.
    Duality {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read '{path}': {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write '{path}': {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("unknown path '{0}'")]
    UnknownPath(String),
    #[error("scenario has no closed path")]
    NoClosedPath,
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Topology(#[from] TopoError),
    #[error(transparent)]
    Duality(#[from] RelError),
    #[error("empty sweep")]
    EmptySweep,
    #[error("invalid sweep value '{0}'")]
    BadValue(String),
    #[error("cannot resolve parameter '{0}' to a numeric entry")]
    UnresolvedParam(String),
    #[error("invalid grid '{spec}': {reason}")]
    BadGrid { spec: String, reason: String },
    #[error("grid point {point} is within {margin} of a field singularity")]
    GridHitsSingularity { point: Vec3, margin: f64 },
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` and runs the command, writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Runs one command, returning its standard output and exit code.
pub fn execute(command: &Command) -> Result<(String, i32), CliError> {
    match command {
        Command::Phase { file, path, tol } => cmd_phase(&load(file)?, path, *tol).map(|s| (s, EXIT_OK)),
        Command::Check { file, json } => cmd_check(&load(file)?, *json),
        Command::Sweep { file, param, values, out, path } => {
            let csv = cmd_sweep(&read(file)?, param, &parse_values(values)?, path.as_deref())?;
            write(out, &csv)?;
            Ok((format!("wrote {} rows to {}\n", csv.lines().count() - 1, out.display()), EXIT_OK))
        }
        Command::Fields { file, grid, out, margin } => {
            let csv = cmd_fields(&load(file)?, &parse_grid(grid)?, *margin)?;
            write(out, &csv)?;
            Ok((format!("wrote {} rows to {}\n", csv.lines().count() - 1, out.display()), EXIT_OK))
        }
        Command::Duality { file, out } => {
            let dual = cmd_duality(&load(file)?)?;
            write(out, &dual)?;
            Ok((format!("wrote dual scenario to {}\n", out.display()), EXIT_OK))
        }
    }
}

fn read(path: &PathBuf) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read { path: path.clone(), source })
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.clone(), source })
}

fn load(path: &PathBuf) -> Result<Scenario, CliError> {
    Ok(parse_scenario(&read(path)?)?)
}

pub fn cmd_phase(s: &Scenario, path: &str, tol: f64) -> Result<String, CliError> {
    let p = s.path(path).ok_or_else(|| CliError::UnknownPath(path.to_string()))?;
    let t = phase_vector_field(s)?;
    let r = line_phase(&t, p, tol)?;
    Ok(format!(
        "path = {}\nkind = {}\nclosed = {}\nphase = {}\nabs_error = {}\nsubdivisions = {}\n",
        p.name,
        s.phase_kind,
        p.closed,
        format_number(r.value),
        format_number(r.abs_error_estimate),
        r.subdivisions
    ))
}

pub fn cmd_check(s: &Scenario, json: bool) -> Result<(String, i32), CliError> {
    let report = classify(s)?;
    let mut text = report.to_key_value();
    if json {
        text.push_str(&report.to_json());
        text.push('\n');
    }
    let code = if report.classification == Classification::Topological { EXIT_OK } else { EXIT_NOT_TOPOLOGICAL };
    Ok((text, code))
}

pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| CliError::BadValue(v.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::EmptySweep);
    }
    Ok(values)
}

fn resolve<'a>(doc: &'a mut Value, key: &str) -> Option<&'a mut Value> {
    let mut node = doc;
    for part in key.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(part)?,
            Value::Array(items) => items.get_mut(part.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    node.is_number().then_some(node)
}

/// CSV `param,phase,abs_error,classification`, one row per value.
pub fn cmd_sweep(text: &[u8], param: &str, values: &[f64], path: Option<&str>) -> Result<String, CliError> {
    if values.is_empty() {
        return Err(CliError::EmptySweep);
    }
    // Validate the base file first so that its errors are reported as such.
    parse_scenario(text)?;
    let mut doc: Value = serde_json::from_slice(text).map_err(|_| CliError::UnresolvedParam(param.to_string()))?;
    if resolve(&mut doc, param).is_none() {
        return Err(CliError::UnresolvedParam(param.to_string()));
    }
    let mut csv = String::from("param,phase,abs_error,classification\n");
    for &v in values {
        let slot = resolve(&mut doc, param).expect("resolved above");
        *slot = serde_json::Number::from_f64(v).map(Value::Number).ok_or_else(|| CliError::BadValue(v.to_string()))?;
        let s = parse_scenario(doc.to_string().as_bytes())?;
        let p = match path {
            Some(name) => s.path(name).ok_or_else(|| CliError::UnknownPath(name.to_string()))?,
            None => s.first_closed_path().ok_or(CliError::NoClosedPath)?,
        };
        let r = line_phase(&phase_vector_field(&s)?, p, s.checks.quad_tol)?;
        let class = classify(&s)?.classification;
        let _ = writeln!(
            csv,
            "{},{},{},{class}",
            format_number(v),
            format_number(r.value),
            format_number(r.abs_error_estimate)
        );
    }
    Ok(csv)
}

/// The sample points of a grid specification.
pub fn parse_grid(spec: &str) -> Result<Vec<Vec3>, CliError> {
    let bad = |reason: &str| CliError::BadGrid { spec: spec.to_string(), reason: reason.to_string() };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    let count = |s: &str| match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(bad(&format!("'{s}' is not a positive count"))),
    };
    if let Some(rest) = spec.strip_prefix("ring:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(bad("expected ring:r:n or ring:r:n:z"));
        }
        let (r, n) = (num(parts[0])?, count(parts[1])?);
        let z = parts.get(2).map(|z| num(z)).transpose()?.unwrap_or(0.0);
        return Ok((0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                Vec3::new(r * th.cos(), r * th.sin(), z)
            })
            .collect());
    }
    let axes: Vec<Vec<f64>> = spec
        .split(',')
        .map(|axis| {
            let p: Vec<&str> = axis.split(':').collect();
            if p.len() != 3 {
                return Err(bad("each axis must be lo:hi:n"));
            }
            let (lo, hi, n) = (num(p[0])?, num(p[1])?, count(p[2])?);
            Ok(if n == 1 { vec![lo] } else { (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect() })
        })
        .collect::<Result<_, _>>()?;
    if axes.len() != 3 {
        return Err(bad("expected three axes"));
    }
    let mut points = Vec::with_capacity(axes.iter().map(Vec::len).product());
    for &x in &axes[0] {
        for &y in &axes[1] {
            for &z in &axes[2] {
                points.push(Vec3::new(x, y, z));
            }
        }
    }
    Ok(points)
}

/// CSV `x,y,z,Ex,Ey,Ez,Bx,By,Bz,Tx,Ty,Tz`.
pub fn cmd_fields(s: &Scenario, points: &[Vec3], margin: f64) -> Result<String, CliError> {
    let t = phase_vector_field(s)?;
    let mut csv = String::from("x,y,z,Ex,Ey,Ez,Bx,By,Bz,Tx,Ty,Tz\n");
    for &x in points {
        if s.singular_distance(x) <= margin {
            return Err(CliError::GridHitsSingularity { point: x, margin });
        }
        let cols = [x, s.e.eval(x), s.b.eval(x), t.eval(x)];
        let row: Vec<String> = cols.iter().flat_map(|v| v.to_array()).map(format_number).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

/// The dual scenario as a scenario file.
pub fn cmd_duality(s: &Scenario) -> Result<String, CliError> {
    let mut json = duality_map(s)?.to_json()?;
    json.push('\n');
    Ok(json)
}
