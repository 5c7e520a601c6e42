use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::config::RunConfig;
use crate::dynamics::{System, Trajectory, VectorField};
use crate::error::{Error, Result};
use crate::invariants;

static TMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp.{}.{n}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::domain(format!("serialization: {e}")))?;
    s.push('\n');
    write_atomic(path, s.as_bytes()).map_err(|e| io_error(path, e))
}

pub fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::domain(format!("i/o error on {}: {e}", path.display()))
}

/// `<stem>.meta.json` next to a trajectory CSV.
pub fn meta_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.meta.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub schema: String,
    #[serde(flatten)]
    pub system: System,
    pub initial: Vec<f64>,
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub sample_dt: Option<f64>,
    pub s_list: Vec<f64>,
    pub columns: Vec<String>,
    pub config: RunConfig,
}

pub fn trajectory_columns(sys: &System, s_list: &[f64]) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend(sys.component_names().iter().map(|s| s.to_string()));
    cols.extend(["E", "H", "Xi"].map(String::from));
    cols.extend(s_list.iter().map(|&s| format!("W_{}", invariants::s_key(s))));
    match sys {
        System::Complex(_) => cols.extend(["MR", "MR1", "MR2"].map(String::from)),
        System::Coupled(_) => cols.extend(["E1", "E2", "E3"].map(String::from)),
        System::Real(_) => {}
    }
    cols
}

/// CSV of the uniform samples (or every accepted step) with invariant columns.
/// Floats use the shortest round-trip representation, so output is deterministic
/// and re-reads bit-exactly.
pub fn trajectory_csv(traj: &Trajectory, s_list: &[f64]) -> String {
    let sys = &traj.system;
    let mut out = trajectory_columns(sys, s_list).join(",");
    out.push('\n');
    let (ts, ys) = traj.samples();
    for (t, y) in ts.iter().zip(&ys) {
        let mut row: Vec<f64> = vec![*t];
        row.extend_from_slice(y);
        row.push(invariants::energy(sys, y));
        row.push(invariants::helicity(sys, y));
        row.push(invariants::enstrophy(sys, y));
        row.extend(s_list.iter().map(|&s| invariants::hs_norm_sq(sys, y, s)));
        let extra = invariants::monitored(sys, y);
        match sys {
            System::Real(_) => {}
            _ => row.extend(extra[2..].iter().map(|(_, v)| *v)),
        }
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Reads a trajectory CSV and its sidecar back into a [`Trajectory`]; the
/// derivatives needed for interpolation are recomputed from the vector field.
pub fn read_trajectory(csv: &Path) -> Result<(Trajectory, RunMeta)> {
    let mp = meta_path(csv);
    let meta_text = fs::read_to_string(&mp).map_err(|e| io_error(&mp, e))?;
    let meta: RunMeta =
        serde_json::from_str(&meta_text).map_err(|e| Error::domain(format!("invalid metadata {}: {e}", mp.display())))?;
    let text = fs::read_to_string(csv).map_err(|e| io_error(csv, e))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let sys = meta.system;
    let find = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::domain(format!("trajectory CSV is missing column '{name}'")))
    };
    let t_col = find("t")?;
    let comp_cols: Vec<usize> = sys.component_names().iter().map(|c| find(c)).collect::<Result<_>>()?;

    let mut times = Vec::new();
    let mut states = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::domain(format!("bad value in CSV row {}", lineno + 2)))
        };
        times.push(get(t_col)?);
        states.push(comp_cols.iter().map(|&c| get(c)).collect::<Result<Vec<f64>>>()?);
    }
    if times.is_empty() {
        return Err(Error::domain("trajectory CSV has no rows"));
    }
    let derivs = states
        .iter()
        .map(|y| {
            let mut d = vec![0.0; sys.dim()];
            sys.eval(y, &mut d);
            d
        })
        .collect();
    let n = times.len();
    let traj = Trajectory {
        system: sys,
        times,
        states,
        derivs,
        sample_indices: if meta.sample_dt.is_some() { (0..n).collect() } else { vec![] },
        stats: Default::default(),
        drift: Default::default(),
        warnings: vec![],
    };
    Ok((traj, meta))
}

/// Parses `a,b,c` into a wavevector.
pub fn parse_vector(s: &str) -> std::result::Result<[i64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated integers, got '{s}'"));
    }
    let mut v = [0i64; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("'{p}' is not an integer"))?;
    }
    Ok(v)
}

pub fn parse_theta(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated reals, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        let x: f64 = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(format!("theta components must be positive, got {p}"));
        }
        *slot = x;
    }
    Ok(v)
}

/// Evenly spaced grid parsed from `lo:hi:steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `lo:hi:steps` into `steps` evenly spaced points from `lo` to `hi`.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:steps, got '{s}'"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| format!("bad grid end '{}'", parts[1]))?;
    let n: usize = parts[2].trim().parse().map_err(|_| format!("bad grid size '{}'", parts[2]))?;
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(format!("grid needs 0 < lo < hi and at least 2 steps, got '{s}'"));
    }
    Ok(Grid((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()))
}
