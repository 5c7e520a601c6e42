//! Event location on integrated trajectories: enstrophy extrema and first
//! passage through a level, refined by bisection on the Hermite interpolant.

use serde::{Deserialize, Serialize};

use crate::dynamics::{RealTriad, System, Trajectory};
use crate::error::{Error, Result};
use crate::invariants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub t: f64,
    pub xi: f64,
    pub kind: ExtremumKind,
}

fn real_body(traj: &Trajectory) -> Result<RealTriad> {
    match traj.system {
        System::Real(b) => Ok(b),
        _ => Err(Error::domain(format!(
            "enstrophy extrema need a real-triad trajectory, got {}",
            traj.system.id()
        ))),
    }
}

/// Bisects `g(t) = 0` on `[a, b]` with `g(a) g(b) < 0`, evaluating through the interpolant.
fn bisect_interp<G: Fn(&[f64]) -> f64>(traj: &Trajectory, g: &G, mut a: f64, mut b: f64) -> f64 {
    let eval = |t: f64| traj.interpolate(t).map(|y| g(&y)).unwrap_or(f64::NAN);
    let mut ga = eval(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let gm = eval(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Times where `g` changes sign, in trajectory order. A root sitting exactly on
/// the initial point is reported at `t₀`.
pub fn sign_changes<G: Fn(&[f64]) -> f64>(traj: &Trajectory, g: G, zero_tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if traj.is_empty() {
        return out;
    }
    let vals: Vec<f64> = traj.states.iter().map(|y| g(y)).collect();
    if vals[0].abs() <= zero_tol {
        out.push(traj.times[0]);
    }
    for i in 1..vals.len() {
        let (a, b) = (vals[i - 1], vals[i]);
        if i > 1 && a == 0.0 {
            continue;
        }
        if b == 0.0 {
            out.push(traj.times[i]);
        } else if a != 0.0 && (a > 0.0) != (b > 0.0) {
            out.push(bisect_interp(traj, &g, traj.times[i - 1], traj.times[i]));
        }
    }
    out
}

/// Enstrophy extrema: zeros of `Ξ̇ = −2S pqr`, classified by the neighbouring values.
pub fn xi_extrema(traj: &Trajectory) -> Result<Vec<Extremum>> {
    let body = real_body(traj)?;
    let scale = traj.states[0].iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-14 * scale.powi(3);
    let pqr = |y: &[f64]| y[0] * y[1] * y[2];
    let xi = |y: &[f64]| invariants::enstrophy(&traj.system, y);
    let mut out = Vec::new();
    for t in sign_changes(traj, pqr, tol) {
        let y = traj.interpolate(t).ok_or_else(|| Error::domain("extremum outside trajectory"))?;
        // Sign of Ξ̈ = −2S d(pqr)/dt decides min versus max.
        let d = body.rhs([y[0], y[1], y[2]]);
        let dpqr = d[0] * y[1] * y[2] + y[0] * d[1] * y[2] + y[0] * y[1] * d[2];
        let acc = -2.0 * invariants::enstrophy_rate_coefficient(&body) * dpqr;
        let kind = if acc > 0.0 { ExtremumKind::Min } else { ExtremumKind::Max };
        out.push(Extremum { t, xi: xi(&y), kind });
    }
    Ok(out)
}

/// Time from the first enstrophy minimum to the next maximum.
pub fn measured_half_period(traj: &Trajectory) -> Result<f64> {
    let ex = xi_extrema(traj)?;
    let i = ex
        .iter()
        .position(|e| e.kind == ExtremumKind::Min)
        .ok_or_else(|| Error::domain("no enstrophy minimum on the trajectory"))?;
    let j = ex[i..]
        .iter()
        .position(|e| e.kind == ExtremumKind::Max)
        .ok_or_else(|| Error::domain("no enstrophy maximum after the first minimum"))?;
    Ok(ex[i + j].t - ex[i].t)
}

/// First time `f` reaches `level` from below, or `None` if it never does.
pub fn first_passage<F: Fn(&[f64]) -> f64>(traj: &Trajectory, f: F, level: f64) -> Option<f64> {
    let g = |y: &[f64]| f(y) - level;
    if traj.states.first().map(|y| g(y) >= 0.0).unwrap_or(false) {
        return traj.times.first().copied();
    }
    for i in 1..traj.len() {
        if g(&traj.states[i]) >= 0.0 {
            return Some(bisect_interp(traj, &g, traj.times[i - 1], traj.times[i]));
        }
    }
    None
}

/// Largest value of `f` over the accepted steps and the refined enstrophy maxima.
pub fn max_along<F: Fn(&[f64]) -> f64>(traj: &Trajectory, f: F) -> f64 {
    let mut m = traj.states.iter().map(|y| f(y)).fold(f64::NEG_INFINITY, f64::max);
    if let Ok(ex) = xi_extrema(traj) {
        for e in ex.iter().filter(|e| e.kind == ExtremumKind::Max) {
            if let Some(y) = traj.interpolate(e.t) {
                m = m.max(f(&y));
            }
        }
    }
    m
}

pub fn min_along<F: Fn(&[f64]) -> f64>(traj: &Trajectory, f: F) -> f64 {
    let mut m = traj.states.iter().map(|y| f(y)).fold(f64::INFINITY, f64::min);
    if let Ok(ex) = xi_extrema(traj) {
        for e in ex.iter().filter(|e| e.kind == ExtremumKind::Min) {
            if let Some(y) = traj.interpolate(e.t) {
                m = m.min(f(&y));
            }
        }
    }
    m
}
