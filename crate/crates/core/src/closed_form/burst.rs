use serde::{Deserialize, Serialize};

use super::cubic::{cubic_data, CubicData};
use super::measure;
use crate::dynamics::{System, Trajectory};
use crate::error::{Error, Result};
use crate::invariants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeFlags {
    /// `|μ|/λ ≤ 0.1`.
    pub mu_small: bool,
    /// `|λ/ν| ∈ [0.8, 1.25]`.
    pub lambda_nu_comparable: bool,
    /// `λν < 0`.
    pub opposite_signs: bool,
    /// `λ > μ > ν`.
    pub ordered: bool,
}

impl RegimeFlags {
    pub fn new(lambda: f64, mu: f64, nu: f64) -> Self {
        let r = (lambda / nu).abs();
        RegimeFlags {
            mu_small: mu.abs() <= 0.1 * lambda,
            lambda_nu_comparable: (0.8..=1.25).contains(&r),
            opposite_signs: lambda * nu < 0.0,
            ordered: lambda > mu && mu > nu,
        }
    }

    pub fn all(&self) -> bool {
        self.mu_small && self.lambda_nu_comparable && self.opposite_signs && self.ordered
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstBounds {
    pub ratio_bound: f64,
    pub t_star_bound: f64,
    pub regime_flags: RegimeFlags,
}

fn check(mu: f64, level: f64, name: &str) -> Result<()> {
    if mu == 0.0 {
        return Err(Error::domain("burst bounds need mu != 0"));
    }
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::domain(format!("{name} must be positive, got {level}")));
    }
    Ok(())
}

/// `W_max/W(0) ≥ ¼(λ/μ)⁶` reached before `t* = (6/√W(0)) μ² ln ρ / ρ`, `ρ = λ/|μ|`.
pub fn burst_bounds_h3(lambda: f64, mu: f64, nu: f64, w0: f64) -> Result<BurstBounds> {
    check(mu, w0, "W0")?;
    let rho = lambda / mu.abs();
    Ok(BurstBounds {
        ratio_bound: 0.25 * (lambda / mu).powi(6),
        t_star_bound: 6.0 / w0.sqrt() * mu * mu * rho.ln() / rho,
        regime_flags: RegimeFlags::new(lambda, mu, nu),
    })
}

/// `Ξ_max/Ξ(0) ∼ ρ²` reached before `t** = ln ρ / (√2 ρ √Ξ(0))`.
pub fn burst_bounds_enstrophy(lambda: f64, mu: f64, nu: f64, xi0: f64) -> Result<BurstBounds> {
    check(mu, xi0, "Xi0")?;
    let rho = lambda / mu.abs();
    Ok(BurstBounds {
        ratio_bound: rho * rho,
        t_star_bound: rho.ln() / (std::f64::consts::SQRT_2 * rho * xi0.sqrt()),
        regime_flags: RegimeFlags::new(lambda, mu, nu),
    })
}

/// `(p₀, q₀, 0)` with `λ⁶p₀² = μ⁶q₀² = W(0)/2`.
pub fn h3_split(lambda: f64, mu: f64, w0: f64) -> Result<[f64; 3]> {
    check(mu, w0, "W0")?;
    if lambda == 0.0 {
        return Err(Error::domain("H3 split needs lambda != 0"));
    }
    let h = (0.5 * w0).sqrt();
    Ok([h / lambda.abs().powi(3), h / mu.abs().powi(3), 0.0])
}

/// `(p₀, q₀, 0)` with `λ²p₀² = μ²q₀² = Ξ(0)/2`.
pub fn enstrophy_split(lambda: f64, mu: f64, xi0: f64) -> Result<[f64; 3]> {
    check(mu, xi0, "Xi0")?;
    if lambda == 0.0 {
        return Err(Error::domain("enstrophy split needs lambda != 0"));
    }
    let h = (0.5 * xi0).sqrt();
    Ok([h / lambda.abs(), h / mu.abs(), 0.0])
}

/// Which norm a burst report concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BurstNorm {
    H3,
    Enstrophy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstReport {
    pub schema: String,
    pub norm: BurstNorm,
    pub regime_flags: RegimeFlags,
    pub ratio_bound: f64,
    pub t_star_bound: f64,
    pub initial_value: f64,
    pub measured_max: f64,
    pub measured_ratio: f64,
    /// First time the norm reaches `ratio_bound · initial_value`; absent if never.
    pub measured_t_star: Option<f64>,
    /// `x₊` (enstrophy) or the `W` level at `Ξ = x₊` (H³) from the cubic roots.
    pub predicted_max: f64,
    pub ratio_ok: bool,
    pub t_star_ok: bool,
    pub pass: bool,
}

/// `W` as an affine function of `Ξ` at fixed energy and helicity.
fn w_at_xi(c: &CubicData, xi: f64) -> f64 {
    let [l, m, n] = c.lambdas;
    l.powi(6) * (xi - c.x_minus) / ((l - m) * (l - n))
        + m.powi(6) * (xi - c.x_plus) / ((m - n) * (m - l))
        + n.powi(6) * (xi - c.x_zero) / ((n - l) * (n - m))
}

/// Measures a burst on a real-triad trajectory started at `r = 0` and compares
/// it with the bounds. The enstrophy ratio passes when it lies within a factor
/// two of `ρ²`; the H³ ratio passes when it reaches `¼ρ⁶`.
pub fn burst_report(traj: &Trajectory, norm: BurstNorm) -> Result<BurstReport> {
    let body = match traj.system {
        System::Real(b) => b,
        _ => return Err(Error::domain("burst analysis needs a real-triad trajectory")),
    };
    let y0 = &traj.states[0];
    let sys = traj.system;
    let (l, m, n) = (body.lambda, body.mu, body.nu);
    let cubic = cubic_data(l, m, n, y0[0], y0[1])?;
    let value = |y: &[f64]| match norm {
        BurstNorm::H3 => invariants::hs_norm_sq(&sys, y, 3.0),
        BurstNorm::Enstrophy => invariants::enstrophy(&sys, y),
    };
    let v0 = value(y0);
    let bounds = match norm {
        BurstNorm::H3 => burst_bounds_h3(l, m, n, v0)?,
        BurstNorm::Enstrophy => burst_bounds_enstrophy(l, m, n, v0)?,
    };
    let measured_max = measure::max_along(traj, value);
    let measured_ratio = measured_max / v0;
    let measured_t_star = measure::first_passage(traj, value, bounds.ratio_bound * v0);
    let predicted_max = match norm {
        BurstNorm::H3 => w_at_xi(&cubic, cubic.x_plus),
        BurstNorm::Enstrophy => cubic.x_plus,
    };
    let ratio_ok = match norm {
        BurstNorm::H3 => measured_ratio >= bounds.ratio_bound,
        BurstNorm::Enstrophy => {
            measured_ratio >= 0.5 * bounds.ratio_bound && measured_ratio <= 2.0 * bounds.ratio_bound
        }
    };
    let t_star_ok = measured_t_star.map(|t| t - traj.times[0] <= bounds.t_star_bound).unwrap_or(false);
    Ok(BurstReport {
        schema: crate::SCHEMA_VERSION.into(),
        norm,
        regime_flags: bounds.regime_flags,
        ratio_bound: bounds.ratio_bound,
        t_star_bound: bounds.t_star_bound,
        initial_value: v0,
        measured_max,
        measured_ratio,
        measured_t_star,
        predicted_max,
        ratio_ok,
        t_star_ok,
        pass: ratio_ok && t_star_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn printed_arithmetic() {
        let b = burst_bounds_h3(100.0, 1.0, -99.0, 1.0).unwrap();
        assert_relative_eq!(b.ratio_bound, 2.5e11, max_relative = 1e-14);
        assert_relative_eq!(b.t_star_bound, 6.0 * 100f64.ln() / 100.0, max_relative = 1e-14);
        assert_relative_eq!(b.t_star_bound, 0.27631, max_relative = 1e-4);
        assert!(b.regime_flags.all());
        let e = burst_bounds_enstrophy(100.0, 1.0, -99.0, 1.0).unwrap();
        assert_eq!(e.ratio_bound, 1e4);
        assert_relative_eq!(e.t_star_bound, 0.032565, max_relative = 1e-4);
        let flat = burst_bounds_h3(1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(flat.ratio_bound, 0.25);
        assert!(!flat.regime_flags.mu_small);
        assert!(burst_bounds_h3(2.0, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn splits_hit_levels() {
        let [p, q, _] = h3_split(50.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(50f64.powi(6) * p * p, 0.5, max_relative = 1e-14);
        assert_relative_eq!(q * q, 0.5, max_relative = 1e-14);
        let [p, q, _] = enstrophy_split(50.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(2500.0 * p * p + q * q, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn w_affine_in_xi() {
        // At Ξ(0) the affine form must give W(0).
        let (l, m, n, p, q) = (2.0, 1.0, -1.0, 0.6, 0.3);
        let c = cubic_data(l, m, n, p, q).unwrap();
        let w0 = l.powi(6) * p * p + m.powi(6) * q * q;
        assert_relative_eq!(w_at_xi(&c, c.x_zero), w0, max_relative = 1e-13);
    }
}
