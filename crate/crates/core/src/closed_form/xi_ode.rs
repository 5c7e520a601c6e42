use serde::{Deserialize, Serialize};

use super::cubic::CubicData;
use crate::dynamics::{System, Trajectory};
use crate::error::{Error, Result};
use crate::invariants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiOdeResidual {
    /// `max |Ξ̈_fd − (−2K P′(Ξ))| / max |2K P′(Ξ)|` over the retained points.
    pub max_relative: f64,
    pub points_used: usize,
    pub dt: f64,
    /// The enstrophy never moved; the residual is reported as 0.
    pub constant: bool,
}

/// Compares a central-difference `Ξ̈` against `−2K P′(Ξ)` on the uniform
/// samples of a real-triad run. Points with `|Ξ̇|` below its 10th percentile
/// (the neighbourhoods of the extrema) are dropped.
pub fn xi_ode_residual(traj: &Trajectory, c: &CubicData) -> Result<XiOdeResidual> {
    let body = match traj.system {
        System::Real(b) => b,
        _ => return Err(Error::domain("Xi ODE residual needs a real-triad trajectory")),
    };
    let (t, y) = traj.samples();
    if t.len() < 10 {
        return Err(Error::domain(format!("need at least 10 samples, got {}", t.len())));
    }
    let dt = t[1] - t[0];
    if !(dt != 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs()) {
        return Err(Error::domain("Xi ODE residual needs uniformly spaced samples"));
    }
    let xi: Vec<f64> = y.iter().map(|s| invariants::enstrophy(&traj.system, s)).collect();
    let rate: Vec<f64> = y.iter().map(|s| invariants::enstrophy_rate(&body, [s[0], s[1], s[2]]).abs()).collect();

    let spread = xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xi.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread <= 1e-14 * xi[0].abs().max(1e-300) {
        return Ok(XiOdeResidual {
            max_relative: 0.0,
            points_used: 0,
            dt,
            constant: true,
        });
    }

    let mut interior: Vec<f64> = rate[1..rate.len() - 1].to_vec();
    interior.sort_by(f64::total_cmp);
    let cut = interior[interior.len() / 10];

    let mut max_err: f64 = 0.0;
    let mut max_ref: f64 = 0.0;
    let mut used = 0;
    for i in 1..xi.len() - 1 {
        if rate[i] < cut {
            continue;
        }
        let fd = (xi[i + 1] - 2.0 * xi[i] + xi[i - 1]) / (dt * dt);
        let exact = c.xi_accel(xi[i]);
        max_err = max_err.max((fd - exact).abs());
        max_ref = max_ref.max(exact.abs());
        used += 1;
    }
    Ok(XiOdeResidual {
        max_relative: if max_ref > 0.0 { max_err / max_ref } else { 0.0 },
        points_used: used,
        dt: dt.abs(),
        constant: false,
    })
}
