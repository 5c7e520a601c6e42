use serde::{Deserialize, Serialize};

use super::quadrature;
use crate::error::{Error, Result};

/// Roots `x₋, x₀, x₊` of the cubic `P(X) = (X − x₋)(X − x₀)(X − x₊)` governing
/// the enstrophy, with `Ξ̈ = −2K P′(Ξ)` and `Ξ̇² = −4K P(Ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicData {
    pub x_minus: f64,
    pub x_zero: f64,
    pub x_plus: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub lambdas: [f64; 3],
}

fn check_lambdas(lambda: f64, mu: f64, nu: f64) -> Result<()> {
    if lambda == mu || mu == nu || lambda == nu {
        return Err(Error::domain(format!(
            "eigenvalues must be distinct, got ({lambda}, {mu}, {nu})"
        )));
    }
    if [lambda, mu, nu].iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("eigenvalues must be finite"));
    }
    Ok(())
}

/// `K = (λ²(μ−ν) + μ²(ν−λ) + ν²(λ−μ)) / ((λ−μ)(λ−ν)(μ−ν))`.
///
/// The numerator factors as `(λ−μ)(λ−ν)(μ−ν)`, so `K = 1` for every distinct
/// triple; the quotient is still evaluated as written.
pub fn k_constant(lambda: f64, mu: f64, nu: f64) -> Result<f64> {
    check_lambdas(lambda, mu, nu)?;
    let num = lambda * lambda * (mu - nu) + mu * mu * (nu - lambda) + nu * nu * (lambda - mu);
    Ok(num / ((lambda - mu) * (lambda - nu) * (mu - nu)))
}

/// Roots from the initial data `(p₀, q₀, r₀ = 0)` by the closed formulas.
pub fn cubic_data(lambda: f64, mu: f64, nu: f64, p0: f64, q0: f64) -> Result<CubicData> {
    check_lambdas(lambda, mu, nu)?;
    if mu == 0.0 {
        return Err(Error::domain("cubic data needs mu != 0"));
    }
    let (p2, q2) = (p0 * p0, q0 * q0);
    let m2q2 = mu * mu * q2;
    Ok(CubicData {
        x_minus: lambda * nu * p2 + m2q2 + mu * (lambda - nu) * p2,
        x_zero: lambda * lambda * p2 + m2q2,
        x_plus: lambda * lambda * p2 + ((nu + lambda) / mu - nu * lambda / (mu * mu)) * m2q2,
        k: k_constant(lambda, mu, nu)?,
        lambdas: [lambda, mu, nu],
    })
}

impl CubicData {
    /// Roots from the energy and helicity levels of an arbitrary state.
    pub fn from_invariants(lambda: f64, mu: f64, nu: f64, e: f64, h: f64) -> Result<CubicData> {
        check_lambdas(lambda, mu, nu)?;
        Ok(CubicData {
            x_minus: (mu + nu) * h - mu * nu * e,
            x_zero: (mu + lambda) * h - mu * lambda * e,
            x_plus: (lambda + nu) * h - lambda * nu * e,
            k: k_constant(lambda, mu, nu)?,
            lambdas: [lambda, mu, nu],
        })
    }

    pub fn p(&self, x: f64) -> f64 {
        (x - self.x_minus) * (x - self.x_zero) * (x - self.x_plus)
    }

    pub fn p_prime(&self, x: f64) -> f64 {
        let (a, b, c) = (x - self.x_minus, x - self.x_zero, x - self.x_plus);
        a * b + b * c + a * c
    }

    /// Right-hand side `−2K P′(Ξ)` of the second-order enstrophy equation.
    pub fn xi_accel(&self, xi: f64) -> f64 {
        -2.0 * self.k * self.p_prime(xi)
    }

    pub fn check_ordering(&self) -> Result<()> {
        if !(self.x_minus < self.x_zero && self.x_zero < self.x_plus) {
            return Err(Error::domain(format!(
                "roots must satisfy x- < x0 < x+, got ({}, {}, {})",
                self.x_minus, self.x_zero, self.x_plus
            )));
        }
        Ok(())
    }

    /// `(x₊ − x₀)/(x₊ − x₋)`, the parameter of the elliptic integral.
    pub fn modulus_sq(&self) -> f64 {
        (self.x_plus - self.x_zero) / (self.x_plus - self.x_minus)
    }
}

/// `∫_{x₀}^{x₊} dx / √((x − x₋)(x − x₀)(x₊ − x))` after `x = x₀ + (x₊ − x₀) sin²φ`.
pub fn period_integral(x_minus: f64, x_zero: f64, x_plus: f64) -> Result<f64> {
    if !(x_minus < x_zero && x_zero < x_plus) {
        return Err(Error::domain(format!(
            "roots must satisfy x- < x0 < x+, got ({x_minus}, {x_zero}, {x_plus})"
        )));
    }
    let (gap, width) = (x_zero - x_minus, x_plus - x_zero);
    let f = |phi: f64| {
        let s = phi.sin();
        2.0 / (gap + width * s * s).sqrt()
    };
    let (v, _) = quadrature::integrate(f, 0.0, std::f64::consts::FRAC_PI_2, 1e-12);
    Ok(v)
}

/// Half period `T = (1/(2√K)) ∫_{x₀}^{x₊} dx / √(−P(x))`.
pub fn half_period(c: &CubicData) -> Result<f64> {
    c.check_ordering()?;
    if !(c.k > 0.0) {
        return Err(Error::domain(format!("half period needs K > 0, got {}", c.k)));
    }
    Ok(period_integral(c.x_minus, c.x_zero, c.x_plus)? / (2.0 * c.k.sqrt()))
}

/// Modulus-one asymptote of [`period_integral`],
/// `(1/√(x₊ − x₋)) ln(1 / (1 − √((x₊ − x₀)/(x₊ − x₋))))`.
pub fn period_asymptotic(x_minus: f64, x_zero: f64, x_plus: f64) -> Result<f64> {
    if !(x_minus < x_zero && x_zero < x_plus) {
        return Err(Error::domain(format!(
            "roots must satisfy x- < x0 < x+, got ({x_minus}, {x_zero}, {x_plus})"
        )));
    }
    let span = x_plus - x_minus;
    let m = (x_plus - x_zero) / span;
    let gap = 1.0 - m.sqrt();
    if !(gap > 0.0) {
        return Err(Error::domain("asymptotic period diverges: x0 is numerically equal to x-"));
    }
    Ok((1.0 / gap).ln() / span.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn worked_roots() {
        let c = cubic_data(2.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        assert_eq!((c.x_minus, c.x_zero, c.x_plus, c.k), (2.0, 5.0, 7.0, 1.0));
        let d = CubicData::from_invariants(2.0, 1.0, -1.0, 2.0, 3.0).unwrap();
        assert_eq!((d.x_minus, d.x_zero, d.x_plus), (2.0, 5.0, 7.0));
        let s = cubic_data(2.0, 1.0, -1.0, 0.7, 0.0).unwrap();
        assert_eq!(s.x_zero, s.x_plus);
        assert!(cubic_data(2.0, 0.0, -1.0, 1.0, 1.0).is_err());
        assert!(cubic_data(2.0, 2.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn k_is_one() {
        for (l, m, n) in [(50.0, 1.0, -49.0), (3.0, -0.2, 7.5), (100.0, 1.0, -99.0)] {
            assert_relative_eq!(k_constant(l, m, n).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn half_period_scales() {
        let c = cubic_data(2.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        let t = half_period(&c).unwrap();
        let s = 3.0;
        let cs = CubicData {
            x_minus: c.x_minus * s * s,
            x_zero: c.x_zero * s * s,
            x_plus: c.x_plus * s * s,
            ..c
        };
        assert_relative_eq!(half_period(&cs).unwrap(), t / s, max_relative = 1e-12);
        let bad = CubicData { x_zero: 8.0, ..c };
        assert!(half_period(&bad).is_err());
    }

    #[test]
    fn asymptotic_small_gap() {
        let eps = 1e-4;
        let a = period_asymptotic(0.0, eps, 1.0).unwrap();
        assert_relative_eq!(a, (2.0 / eps).ln(), max_relative = 1e-2);
        assert!(period_asymptotic(0.0, 0.0, 1.0).is_err());
        assert!(period_asymptotic(1.0, 1.0 + 1e-17, 2.0).is_err());
    }
}
