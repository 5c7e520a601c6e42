//! Dormand–Prince 5(4) with PI step-size control.

use serde::{Deserialize, Serialize};

use super::systems::{System, VectorField};
use crate::error::{Error, Result};

// Butcher tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// Distance below which a state counts as sitting on a hyperbolic equilibrium.
pub const SADDLE_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Uniform output stride; steps are shortened so that every grid time is hit exactly.
    pub sample_dt: Option<f64>,
    /// Rescale onto the initial energy sphere after each accepted step.
    pub renormalize_energy: bool,
    pub h_max: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 5_000_000,
            sample_dt: None,
            renormalize_energy: false,
            h_max: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        IntegratorOptions {
            rtol,
            atol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rtol", self.rtol), ("atol", self.atol)] {
            if !(v > 0.0 && v <= 1e-3) {
                return Err(Error::domain(format!("{name} must lie in (0, 1e-3], got {v}")));
            }
        }
        if let Some(dt) = self.sample_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::domain(format!("sample_dt must be positive, got {dt}")));
            }
        }
        if let Some(h) = self.h_max {
            if !(h > 0.0) {
                return Err(Error::domain(format!("h_max must be positive, got {h}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::domain("max_steps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Relative drift `|I(t) − I(0)| / |I(0)|` of each monitored invariant
/// (absolute when `|I(0)| < 1e-12`), one row per accepted step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DriftLog {
    pub names: Vec<String>,
    pub initial: Vec<f64>,
    pub per_step: Vec<Vec<f64>>,
    pub max: Vec<f64>,
}

impl DriftLog {
    fn new(names: Vec<String>, initial: Vec<f64>) -> Self {
        let n = names.len();
        DriftLog {
            names,
            initial,
            per_step: vec![vec![0.0; n]],
            max: vec![0.0; n],
        }
    }

    fn record(&mut self, values: &[f64]) {
        let row: Vec<f64> = values
            .iter()
            .zip(&self.initial)
            .map(|(v, i0)| {
                let d = (v - i0).abs();
                if i0.abs() < 1e-12 {
                    d
                } else {
                    d / i0.abs()
                }
            })
            .collect();
        for (m, d) in self.max.iter_mut().zip(&row) {
            *m = m.max(*d);
        }
        self.per_step.push(row);
    }

    pub fn max_of(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.max[i])
    }
}

/// Accepted steps of one run, with derivatives for dense output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub system: System,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
    /// Indices into `times` that fall on the uniform sampling grid.
    pub sample_indices: Vec<usize>,
    pub stats: StepStats,
    pub drift: DriftLog,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(|s| s.as_slice()).unwrap_or(&[])
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Uniform samples if a stride was requested, otherwise every accepted step.
    pub fn samples(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        if self.sample_indices.is_empty() {
            return (self.times.clone(), self.states.clone());
        }
        let t = self.sample_indices.iter().map(|&i| self.times[i]).collect();
        let y = self.sample_indices.iter().map(|&i| self.states[i].clone()).collect();
        (t, y)
    }

    /// Cubic Hermite interpolation of the accepted steps at `t`.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        let n = self.times.len();
        if n == 0 {
            return None;
        }
        let forward = n < 2 || self.times[n - 1] >= self.times[0];
        let key = |x: f64| if forward { x } else { -x };
        let (lo, hi) = (key(self.times[0]), key(self.times[n - 1]));
        let kt = key(t);
        if kt < lo || kt > hi {
            return None;
        }
        if n == 1 {
            return Some(self.states[0].clone());
        }
        let idx = self.times.partition_point(|&x| key(x) <= kt).clamp(1, n - 1);
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        let (y0, y1, f0, f1) = (&self.states[idx - 1], &self.states[idx], &self.derivs[idx - 1], &self.derivs[idx]);
        Some(
            (0..y0.len())
                .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
                .collect(),
        )
    }

    /// Hermite resampling onto `t0, t0 + dt, …` up to the final time.
    pub fn resample_hermite(&self, dt: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        if !(dt > 0.0) || self.is_empty() {
            return Err(Error::domain("resampling needs dt > 0 and a nonempty trajectory"));
        }
        let (t0, t1) = (self.times[0], self.final_time());
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let n = ((t1 - t0).abs() / dt + 1e-9).floor() as usize;
        let mut ts = Vec::with_capacity(n + 1);
        let mut ys = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = t0 + dir * dt * i as f64;
            if let Some(y) = self.interpolate(t) {
                ts.push(t);
                ys.push(y);
            }
        }
        Ok((ts, ys))
    }
}

fn scaled_rms(e: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let s: f64 = e
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(ei, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (ei / sc).powi(2)
        })
        .sum();
    (s / e.len() as f64).sqrt()
}

fn initial_step(sys: &System, y0: &[f64], f0: &[f64], opts: &IntegratorOptions, evals: &mut usize) -> f64 {
    let d0 = scaled_rms(y0, y0, y0, opts.rtol, opts.atol);
    let d1 = scaled_rms(f0, y0, y0, opts.rtol, opts.atol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    sys.eval(&y1, &mut f1);
    *evals += 1;
    let df: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_rms(&df, y0, y0, opts.rtol, opts.atol) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

fn near_saddle(sys: &System, y: &[f64], radius: f64) -> bool {
    let mask = sys.saddle_mask();
    let amps = sys.mode_amplitudes_sq(y);
    let e: f64 = amps.iter().sum();
    if e <= 0.0 {
        return false;
    }
    let off: f64 = amps.iter().zip(&mask).filter(|(_, &m)| !m).map(|(a, _)| a).sum();
    off.sqrt() <= radius * e.sqrt().max(1.0)
}

/// Integrates from `t = 0` to `t_end > 0`.
pub fn integrate(system: &System, y0: &[f64], t_end: f64, rtol: f64, atol: f64) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain(format!("t_end must be positive, got {t_end}")));
    }
    integrate_with(system, 0.0, y0, t_end, &IntegratorOptions::with_tolerances(rtol, atol))
}

/// Integrates from `t0` to `t_end` in either time direction.
pub fn integrate_with(
    system: &System,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let dim = system.dim();
    if y0.len() != dim {
        return Err(Error::domain(format!(
            "{} system needs {dim} components, got {}",
            system.id(),
            y0.len()
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("initial state must be finite"));
    }
    if !(t0.is_finite() && t_end.is_finite()) || t0 == t_end {
        return Err(Error::domain(format!("invalid time span [{t0}, {t_end}]")));
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();

    let inv0 = crate::invariants::monitored(system, y0);
    let names = inv0.iter().map(|(n, _)| n.to_string()).collect();
    let vals0: Vec<f64> = inv0.iter().map(|(_, v)| *v).collect();
    let e0: f64 = system.mode_amplitudes_sq(y0).iter().sum();

    let mut stats = StepStats::default();
    let mut f0 = vec![0.0; dim];
    system.eval(y0, &mut f0);
    stats.rhs_evals += 1;

    let mut traj = Trajectory {
        system: *system,
        times: vec![t0],
        states: vec![y0.to_vec()],
        derivs: vec![f0.clone()],
        sample_indices: if opts.sample_dt.is_some() { vec![0] } else { vec![] },
        stats,
        drift: DriftLog::new(names, vals0),
        warnings: vec![],
    };

    let mut h_abs = initial_step(system, y0, &f0, opts, &mut traj.stats.rhs_evals).min(span);
    if let Some(hm) = opts.h_max {
        h_abs = h_abs.min(hm);
    }
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;
    let mut next_sample = 1usize;
    let mut saddle_steps = 0usize;

    let mut y = y0.to_vec();
    let mut f = f0;
    let mut t = t0;
    let mut k = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];

    let fail = |traj: Trajectory, t: f64, reason: String| -> Error {
        Error::Integration {
            t,
            reason,
            partial: Box::new(traj),
        }
    };

    while (t_end - t) * dir > 0.0 {
        if traj.stats.accepted + traj.stats.rejected >= opts.max_steps {
            let reason = format!("step budget of {} exhausted", opts.max_steps);
            return Err(fail(traj, t, reason));
        }
        // Next target: either the end or the next grid point.
        let (target, on_grid) = match opts.sample_dt {
            Some(dt) => {
                let ts = t0 + dir * dt * next_sample as f64;
                if (ts - t_end).abs() <= 1e-12 * span.max(1.0) {
                    (t_end, true)
                } else if (t_end - ts) * dir < 0.0 {
                    (t_end, false)
                } else {
                    (ts, true)
                }
            }
            None => (t_end, false),
        };
        let remaining = (target - t).abs();
        let clipped = h_abs >= remaining;
        let h_try = if clipped { remaining } else { h_abs };
        if h_try == 0.0 || h_try <= 16.0 * f64::EPSILON * t.abs() {
            let reason = format!("step size underflow (h = {h_try:e})");
            return Err(fail(traj, t, reason));
        }
        let h = dir * h_try;

        k[0].copy_from_slice(&f);
        let stage = |ytmp: &mut [f64], k: &[Vec<f64>], coeffs: &[f64]| {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, c) in coeffs.iter().enumerate() {
                    acc += c * k[j][i];
                }
                ytmp[i] = y[i] + h * acc;
            }
        };
        stage(&mut ytmp, &k, &[A21]);
        system.eval(&ytmp, &mut k[1]);
        stage(&mut ytmp, &k, &[A31, A32]);
        system.eval(&ytmp, &mut k[2]);
        stage(&mut ytmp, &k, &[A41, A42, A43]);
        system.eval(&ytmp, &mut k[3]);
        stage(&mut ytmp, &k, &[A51, A52, A53, A54]);
        system.eval(&ytmp, &mut k[4]);
        stage(&mut ytmp, &k, &[A61, A62, A63, A64, A65]);
        system.eval(&ytmp, &mut k[5]);
        stage(&mut y_new, &k, &[B1, 0.0, B3, B4, B5, B6]);
        system.eval(&y_new, &mut k[6]);
        traj.stats.rhs_evals += 6;

        for i in 0..dim {
            err[i] = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
        }
        let en = scaled_rms(&err, &y, &y_new, opts.rtol, opts.atol);
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            traj.stats.rejected += 1;
            h_abs *= FAC_MIN;
            rejected_last = true;
            continue;
        }

        if en <= 1.0 {
            let en_c = en.max(1e-10);
            let mut fac = SAFETY * en_c.powf(-ALPHA) * err_old.powf(BETA);
            fac = fac.clamp(FAC_MIN, if rejected_last { 1.0 } else { FAC_MAX });
            let h_next = h_try * fac;
            err_old = en_c;
            rejected_last = false;

            t = if clipped { target } else { t + h };
            if opts.renormalize_energy && e0 > 0.0 {
                let e: f64 = system.mode_amplitudes_sq(&y_new).iter().sum();
                if e > 0.0 {
                    let s = (e0 / e).sqrt();
                    y_new.iter_mut().for_each(|v| *v *= s);
                    system.eval(&y_new, &mut k[6]);
                    traj.stats.rhs_evals += 1;
                }
            }
            y.copy_from_slice(&y_new);
            f.copy_from_slice(&k[6]);
            traj.stats.accepted += 1;
            traj.times.push(t);
            traj.states.push(y.clone());
            traj.derivs.push(f.clone());
            let vals: Vec<f64> = crate::invariants::monitored(system, &y).iter().map(|(_, v)| *v).collect();
            traj.drift.record(&vals);
            if near_saddle(system, &y, SADDLE_RADIUS) {
                saddle_steps += 1;
            }
            if clipped && on_grid {
                traj.sample_indices.push(traj.times.len() - 1);
                next_sample += 1;
            }
            // A clipped step says nothing about the controller's preferred size.
            h_abs = if clipped { h_next.max(h_abs) } else { h_next };
            if let Some(hm) = opts.h_max {
                h_abs = h_abs.min(hm);
            }
        } else {
            traj.stats.rejected += 1;
            let fac = (SAFETY * en.powf(-ALPHA)).clamp(FAC_MIN, 1.0);
            h_abs = h_try * fac;
            rejected_last = true;
        }
    }

    if traj.stats.accepted > 0 && saddle_steps * 10 > traj.stats.accepted {
        let msg = format!(
            "slow passage: {saddle_steps} of {} steps within {SADDLE_RADIUS:e} of a hyperbolic equilibrium",
            traj.stats.accepted
        );
        log::warn!("{msg}");
        traj.warnings.push(msg);
    }
    Ok(traj)
}
