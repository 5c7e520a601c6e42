use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{InitialSpec, Overrides, RunConfig};
use super::io::{self, meta_path, read_trajectory, trajectory_columns, trajectory_csv, write_atomic, write_json, RunMeta};
use super::{AnalyzeCmd, Cli, CliError, Command, Format, NormArg, SimulateArgs, TriadsCmd, EXIT_OK};
use crate::closed_form::{
    self, burst_report, hamiltonian_segments, measure, period_asymptotic, BurstNorm, BurstReport, CubicData,
};
use crate::dynamics::{integrate_with, StepStats, System, Trajectory};
use crate::error::{Error, Result};
use crate::invariants::{self, InvariantReport};
use crate::lattice::{
    decompose_primitive, degeneracy_g, irreducibility_det, resonance_curve, search_triads, LatticeParams, TriadCatalog,
    WaveVector,
};

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command; the returned string is the stdout summary.
pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Triads(t) => triads(cli, t),
        Command::Simulate(a) => {
            let out = simulate(&cli.out_dir, a)?;
            if out.code == EXIT_OK {
                Ok(to_line(&out.summary))
            } else {
                let err = out.error.clone().unwrap_or_else(|| CliError::usage("run failed"));
                Err(err)
            }
        }
        Command::Analyze(a) => {
            only_json(cli.format, "analyze")?;
            analyze(&cli.out_dir, a)
        }
        Command::Sweep(s) => sweep(&cli.out_dir, &s.configs),
    }
}

fn to_line(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

fn only_json(f: Option<Format>, what: &str) -> CliResult<()> {
    match f {
        Some(Format::Csv) => Err(CliError::usage(format!("{what} output is JSON only"))),
        _ => Ok(()),
    }
}

fn resolve(out_dir: &Path, given: Option<&Path>, default: &str) -> PathBuf {
    match given {
        Some(p) => out_dir.join(p),
        None => out_dir.join(default),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes()).map_err(|e| io::io_error(path, e))
}

// ---------------------------------------------------------------- triads

fn triads(cli: &Cli, cmd: &TriadsCmd) -> CliResult<String> {
    match cmd {
        TriadsCmd::Search(a) => {
            let p = LatticeParams::new(a.theta[0], a.theta[1], a.theta[2])?;
            let catalog = search_triads(&p, a.box_size, a.tol)?;
            let fmt = cli.format.unwrap_or(Format::Json);
            let default = match fmt {
                Format::Json => "catalog.json",
                Format::Csv => "catalog.csv",
            };
            let path = resolve(&cli.out_dir, a.out.as_deref(), default);
            match fmt {
                Format::Json => write_json(&path, &catalog)?,
                Format::Csv => write_text(&path, &catalog_csv(&catalog))?,
            }
            Ok(to_line(&json!({
                "schema": crate::SCHEMA_VERSION,
                "command": "triads search",
                "triads": catalog.triads.len(),
                "written": path,
            })))
        }
        TriadsCmd::Curve(a) => {
            let (k, m) = (WaveVector(a.k), WaveVector(a.m));
            let n = k + m;
            if let Some(given) = a.n {
                if WaveVector(given) != n {
                    return Err(CliError::usage(format!("--n {} must equal k + m = {n}", WaveVector(given))));
                }
            }
            if irreducibility_det(k, m, n) == 0 {
                return Err(Error::Reducible("zero determinant".into()).into());
            }
            let points = resonance_curve(k, m, &a.grid.0)?;
            let fmt = cli.format.unwrap_or(Format::Csv);
            let default = match fmt {
                Format::Json => "curve.json",
                Format::Csv => "curve.csv",
            };
            let path = resolve(&cli.out_dir, a.out.as_deref(), default);
            match fmt {
                Format::Csv => write_text(&path, &curve_csv(&points))?,
                Format::Json => write_json(
                    &path,
                    &json!({"schema": crate::SCHEMA_VERSION, "k": k, "m": m, "n": n, "points": points}),
                )?,
            }
            let gaps = points.iter().filter(|p| p.ratio3.is_none()).count();
            Ok(to_line(&json!({
                "schema": crate::SCHEMA_VERSION,
                "command": "triads curve",
                "points": points.len(),
                "gaps": gaps,
                "nondegeneracy": "unverified",
                "written": path,
            })))
        }
        TriadsCmd::Decompose(a) => {
            only_json(cli.format, "decompose")?;
            let (k, m) = (WaveVector(a.k), WaveVector(a.m));
            let pair = decompose_primitive(k, m, a.i, a.j)?;
            pair.verify()?;
            let g = degeneracy_g(k, m, a.i, a.j)?;
            let (kt, mt) = pair.tilde_pair();
            let doc = json!({
                "schema": crate::SCHEMA_VERSION,
                "k": k,
                "m": m,
                "n": k + m,
                "i": a.i,
                "j": a.j,
                "G": g,
                "det": irreducibility_det(k, m, k + m).to_string(),
                "decomposition": pair,
                "n_primitive": pair.n(),
                "n_tilde": pair.n_tilde(),
                "tilde_pair": {"k": kt, "m": mt},
                "gcd_checks": pair.gcd_checks(),
                "nondegeneracy": "unverified",
            });
            let path = resolve(&cli.out_dir, a.out.as_deref(), "decomposition.json");
            write_json(&path, &doc)?;
            Ok(to_line(&json!({
                "schema": crate::SCHEMA_VERSION,
                "command": "triads decompose",
                "written": path,
            })))
        }
    }
}

pub fn catalog_csv(c: &TriadCatalog) -> String {
    let mut out = String::from("k1,k2,k3,m1,m2,m3,n1,n2,n3,s_n,s_k,s_m,lambda_k,lambda_m,lambda_n,residual\n");
    for t in &c.triads {
        let ints: Vec<String> = t.k.0.iter().chain(&t.m.0).chain(&t.n.0).map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            ints.join(","),
            t.signs.n,
            t.signs.k,
            t.signs.m,
            t.lambdas[0],
            t.lambdas[1],
            t.lambdas[2],
            t.residual
        );
    }
    out
}

pub fn curve_csv(points: &[crate::lattice::CurvePoint]) -> String {
    let mut out = String::from("ratio2,ratio3,residual,branch_flag\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.ratio2, opt(p.ratio3), opt(p.residual), p.branch_flag.as_str());
    }
    out
}

// -------------------------------------------------------------- simulate

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub kind: String,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub schema: String,
    pub name: String,
    pub system: String,
    pub t_final: f64,
    pub stats: StepStats,
    /// Largest relative drift of each monitored invariant over the accepted steps.
    pub drift_max: BTreeMap<String, f64>,
    pub initial: InvariantReport,
    #[serde(rename = "final")]
    pub final_: InvariantReport,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burst: Option<BurstReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureRecord>,
}

/// Outcome of one `simulate` run: exit code, stdout summary and error if any.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub code: i32,
    pub summary: Value,
    pub error: Option<CliError>,
}

fn run_name(cfg: &RunConfig, path: &Path) -> String {
    cfg.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    })
}

pub fn simulate(out_dir: &Path, a: &SimulateArgs) -> CliResult<RunOutcome> {
    let mut cfg = RunConfig::from_path(&a.config)?;
    cfg.apply(&Overrides {
        t_end: a.t_end,
        rtol: a.rtol,
        atol: a.atol,
        sample_dt: a.sample_dt,
    })?;
    let name = run_name(&cfg, &a.config);
    simulate_config(out_dir, &cfg, &name)
}

pub fn simulate_config(out_dir: &Path, cfg: &RunConfig, name: &str) -> CliResult<RunOutcome> {
    let sys = cfg.build_system()?;
    let y0 = cfg.initial_state()?;
    let opts = cfg.integrator_options();
    let (traj, failure) = match integrate_with(&sys, 0.0, &y0, cfg.t_end, &opts) {
        Ok(t) => (t, None),
        Err(Error::Integration { t, reason, partial }) => (
            *partial,
            Some(FailureRecord {
                kind: "integration".into(),
                t,
                reason,
            }),
        ),
        Err(e) => return Err(e.into()),
    };

    let csv_path = resolve(out_dir, cfg.outputs.csv.as_deref().map(Path::new), &format!("{name}.csv"));
    let report_path = resolve(out_dir, cfg.outputs.report.as_deref().map(Path::new), &format!("{name}.report.json"));
    let meta = RunMeta {
        schema: crate::SCHEMA_VERSION.into(),
        system: sys,
        initial: y0.clone(),
        t_end: cfg.t_end,
        rtol: cfg.rtol,
        atol: cfg.atol,
        sample_dt: cfg.sample_dt,
        s_list: cfg.s_list.clone(),
        columns: trajectory_columns(&sys, &cfg.s_list),
        config: cfg.clone(),
    };
    write_text(&csv_path, &trajectory_csv(&traj, &cfg.s_list))?;
    write_json(&meta_path(&csv_path), &meta)?;

    let burst_norm = match cfg.initial {
        InitialSpec::H3Split(_) => Some(BurstNorm::H3),
        InitialSpec::EnstrophySplit(_) => Some(BurstNorm::Enstrophy),
        _ => None,
    };
    let burst = match burst_norm {
        Some(n) if traj.len() >= 2 => Some(burst_report(&traj, n)?),
        _ => None,
    };
    let last = traj.last_state().to_vec();
    let drift_max = traj
        .drift
        .names
        .iter()
        .cloned()
        .zip(traj.drift.max.iter().copied())
        .collect();
    let report = SimulationReport {
        schema: crate::SCHEMA_VERSION.into(),
        name: name.into(),
        system: sys.id().into(),
        t_final: traj.final_time(),
        stats: traj.stats,
        drift_max,
        initial: invariants::invariant_report(&sys, &y0, &cfg.s_list)?,
        final_: invariants::invariant_report(&sys, &last, &cfg.s_list)?,
        warnings: traj.warnings.clone(),
        burst,
        failure: failure.clone(),
    };
    write_json(&report_path, &report)?;

    let summary = json!({
        "schema": crate::SCHEMA_VERSION,
        "command": "simulate",
        "name": name,
        "csv": csv_path,
        "report": report_path,
        "steps": traj.stats.accepted,
        "burst_pass": report.burst.as_ref().map(|b| b.pass),
        "failure": failure,
    });
    Ok(match failure {
        None => RunOutcome {
            code: EXIT_OK,
            summary,
            error: None,
        },
        Some(f) => RunOutcome {
            code: super::EXIT_NUMERICAL,
            summary,
            error: Some(CliError {
                code: super::EXIT_NUMERICAL,
                kind: f.kind,
                message: format!("integration failed at t = {}: {}; partial outputs written", f.t, f.reason),
            }),
        },
    })
}

// --------------------------------------------------------------- analyze

#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    pub schema: String,
    pub cubic: CubicData,
    pub measured_half_period: f64,
    pub quadrature_half_period: f64,
    /// Modulus-one asymptote, absent when it diverges.
    pub asymptotic_half_period: Option<f64>,
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn period_report(traj: &Trajectory) -> Result<PeriodReport> {
    let body = match traj.system {
        System::Real(b) => b,
        _ => return Err(Error::domain("period analysis needs a real-triad trajectory")),
    };
    let y0 = &traj.states[0];
    let sys = traj.system;
    let cubic = CubicData::from_invariants(
        body.lambda,
        body.mu,
        body.nu,
        invariants::energy(&sys, y0),
        invariants::helicity(&sys, y0),
    )?;
    let quad = closed_form::half_period(&cubic)?;
    let asym = period_asymptotic(cubic.x_minus, cubic.x_zero, cubic.x_plus)
        .ok()
        .map(|v| v / (2.0 * cubic.k.sqrt()));
    let measured = measure::measured_half_period(traj)?;
    let ratio = measured / quad;
    let tolerance = 1e-6;
    Ok(PeriodReport {
        schema: crate::SCHEMA_VERSION.into(),
        cubic,
        measured_half_period: measured,
        quadrature_half_period: quad,
        asymptotic_half_period: asym,
        ratio,
        tolerance,
        pass: (ratio - 1.0).abs() <= tolerance,
    })
}

fn default_norm(meta: &RunMeta) -> BurstNorm {
    match meta.config.initial {
        InitialSpec::EnstrophySplit(_) => BurstNorm::Enstrophy,
        _ => BurstNorm::H3,
    }
}

fn analyze(out_dir: &Path, cmd: &AnalyzeCmd) -> CliResult<String> {
    let (kind, traj_path, out) = match cmd {
        AnalyzeCmd::Burst { trajectory, out, .. } => ("burst", trajectory, out),
        AnalyzeCmd::Period { trajectory, out } => ("period", trajectory, out),
        AnalyzeCmd::Hamiltonian { trajectory, out, .. } => ("hamiltonian", trajectory, out),
    };
    let (traj, meta) = read_trajectory(traj_path)?;
    let value: Value = match cmd {
        AnalyzeCmd::Burst { norm, .. } => {
            let n = match norm {
                Some(NormArg::H3) => BurstNorm::H3,
                Some(NormArg::Enstrophy) => BurstNorm::Enstrophy,
                None => default_norm(&meta),
            };
            serde_json::to_value(burst_report(&traj, n)?)
        }
        AnalyzeCmd::Period { .. } => serde_json::to_value(period_report(&traj)?),
        AnalyzeCmd::Hamiltonian { tol, .. } => {
            if !(*tol > 0.0) {
                return Err(CliError::usage("--tol must be positive"));
            }
            serde_json::to_value(hamiltonian_segments(&traj, *tol)?)
        }
    }
    .map_err(|e| Error::domain(format!("serialization: {e}")))?;
    let stem = traj_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trajectory".into());
    let path = resolve(out_dir, out.as_deref(), &format!("{stem}.{kind}.json"));
    write_json(&path, &value)?;
    Ok(to_line(&json!({
        "schema": crate::SCHEMA_VERSION,
        "command": format!("analyze {kind}"),
        "pass": value.get("pass"),
        "written": path,
    })))
}

// ----------------------------------------------------------------- sweep

fn sweep(out_dir: &Path, configs: &[PathBuf]) -> CliResult<String> {
    let results: Vec<(i32, Value)> = configs
        .par_iter()
        .map(|path| {
            let args = SimulateArgs {
                config: path.clone(),
                t_end: None,
                rtol: None,
                atol: None,
                sample_dt: None,
            };
            match simulate(out_dir, &args) {
                Ok(o) => {
                    let mut v = json!({"config": path, "exit_code": o.code, "summary": o.summary});
                    if let Some(e) = o.error {
                        v["error"] = json!({"kind": e.kind, "message": e.message});
                    }
                    (o.code, v)
                }
                Err(e) => (
                    e.code,
                    json!({"config": path, "exit_code": e.code, "error": {"kind": e.kind, "message": e.message}}),
                ),
            }
        })
        .collect();
    let code = results.iter().map(|r| r.0).max().unwrap_or(EXIT_OK);
    let summary = json!({
        "schema": crate::SCHEMA_VERSION,
        "command": "sweep",
        "runs": results.into_iter().map(|r| r.1).collect::<Vec<_>>(),
        "exit_code": code,
    });
    if code == EXIT_OK {
        Ok(to_line(&summary))
    } else {
        // Summary still goes to stdout so batch drivers see every run.
        println!("{}", to_line(&summary));
        Err(CliError {
            code,
            kind: "sweep".into(),
            message: "one or more runs failed".into(),
        })
    }
}
