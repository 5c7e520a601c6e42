//! Conserved functional of the coupled system after eliminating `a_k`, `a_n`
//! and `a_k̃` through `E₁, E₂, E₃`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{CoupledTriads, System, Trajectory};
use crate::error::{Error, Result};
use crate::invariants;

/// Odd antiderivative of `1/√(E − c x²)`: arcsine type for `c > 0`,
/// inverse-hyperbolic for `c < 0` (`asinh` when `E > 0`, `acosh` when `E < 0`).
pub fn inverse_sqrt_antiderivative(x: f64, e: f64, c: f64) -> Result<f64> {
    let rad = e - c * x * x;
    let scale = e.abs().max((c * x * x).abs()).max(1e-300);
    if rad < -1e-9 * scale {
        return Err(Error::domain(format!(
            "antiderivative argument outside its domain: E - c x^2 = {rad:e} < 0"
        )));
    }
    let sgn = if x < 0.0 { -1.0 } else { 1.0 };
    if c > 0.0 {
        if !(e > 0.0) {
            return Err(Error::domain(format!("arcsine branch needs E > 0, got {e}")));
        }
        let arg = (x * (c / e).sqrt()).clamp(-1.0, 1.0);
        Ok(arg.asin() / c.sqrt())
    } else if c < 0.0 {
        let ac = -c;
        if e > 0.0 {
            Ok((x * (ac / e).sqrt()).asinh() / ac.sqrt())
        } else if e < 0.0 {
            let arg = (x.abs() * (ac / -e).sqrt()).max(1.0);
            Ok(sgn * arg.acosh() / ac.sqrt())
        } else if x != 0.0 {
            Ok(sgn * x.abs().ln() / ac.sqrt())
        } else {
            Err(Error::domain("logarithmic branch undefined at x = 0"))
        }
    } else if e > 0.0 {
        Ok(x / e.sqrt())
    } else {
        Err(Error::domain("degenerate antiderivative: c = 0 and E <= 0"))
    }
}

/// `H = s₁ Γ̃ (λ_n − λ_k̃) ∫ da_m/√(E₁ − (1−α) a_m²) + s₂ Γ (λ_n − λ_k) ∫ da_m̃/√(E₃ − α̃ a_m̃²)`.
///
/// Along the flow `H` is constant when `s₁ = sign a_k` and `s₂ = −sign a_k̃`.
#[allow(clippy::too_many_arguments)]
pub fn reduced_hamiltonian(
    a_m: f64,
    a_mt: f64,
    e1: f64,
    e3: f64,
    alpha: f64,
    alpha_tilde: f64,
    gamma: f64,
    gamma_tilde: f64,
    lambdas: [f64; 5],
    branch: (i8, i8),
) -> Result<f64> {
    let (s1, s2) = branch;
    if s1.abs() != 1 || s2.abs() != 1 {
        return Err(Error::domain(format!("branch signs must be ±1, got {branch:?}")));
    }
    let [lk, _, ln, _, lkt] = lambdas;
    let f = inverse_sqrt_antiderivative(a_m, e1, 1.0 - alpha)?;
    let g = inverse_sqrt_antiderivative(a_mt, e3, alpha_tilde)?;
    Ok(s1 as f64 * gamma_tilde * (ln - lkt) * f + s2 as f64 * gamma * (ln - lk) * g)
}

fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Conserving branch for a coupled state.
pub fn conserving_branch(a: &[f64]) -> (i8, i8) {
    (sign_of(a[0]), -sign_of(a[4]))
}

pub fn hamiltonian_at(c: &CoupledTriads, a: &[f64], e1: f64, e3: f64) -> Result<f64> {
    reduced_hamiltonian(
        a[1],
        a[3],
        e1,
        e3,
        c.alpha(),
        c.alpha_tilde(),
        c.gamma,
        c.gamma_tilde,
        c.lambdas,
        conserving_branch(a),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub branch: (i8, i8),
    pub h_start: f64,
    pub max_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianReport {
    pub schema: String,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    pub segments: Vec<HamiltonianSegment>,
    pub max_drift: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Splits the samples at sign changes of `a_k`, `a_n` and `a_k̃` and records
/// the spread of `H` on each piece. `E₁` and `E₃` are taken from the first sample.
pub fn hamiltonian_segments(traj: &Trajectory, tolerance: f64) -> Result<HamiltonianReport> {
    let c = match traj.system {
        System::Coupled(c) => c,
        _ => return Err(Error::domain("reduced Hamiltonian needs a coupled-system trajectory")),
    };
    let (t, y) = traj.samples();
    if y.is_empty() {
        return Err(Error::domain("empty trajectory"));
    }
    let [e1, _, e3] = invariants::coupled_invariants(&c, &y[0]);
    let key = |a: &[f64]| (sign_of(a[0]), sign_of(a[2]), sign_of(a[4]));

    let mut segments = Vec::new();
    let mut start = 0;
    for i in 1..=y.len() {
        if i < y.len() && key(&y[i]) == key(&y[start]) {
            continue;
        }
        let h0 = hamiltonian_at(&c, &y[start], e1, e3)?;
        let mut drift: f64 = 0.0;
        for a in &y[start..i] {
            drift = drift.max((hamiltonian_at(&c, a, e1, e3)? - h0).abs());
        }
        segments.push(HamiltonianSegment {
            t_start: t[start],
            t_end: t[i - 1],
            points: i - start,
            branch: conserving_branch(&y[start]),
            h_start: h0,
            max_drift: drift,
        });
        start = i;
    }
    let max_drift = segments.iter().map(|s| s.max_drift).fold(0.0, f64::max);
    Ok(HamiltonianReport {
        schema: crate::SCHEMA_VERSION.into(),
        e1,
        e3,
        segments,
        max_drift,
        tolerance,
        pass: max_drift <= tolerance,
    })
}
