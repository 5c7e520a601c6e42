use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_distinct(name: &str, l: &[f64]) -> Result<()> {
    for (a, &x) in l.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::domain(format!("{name}: eigenvalue {x} is not finite")));
        }
        for &y in &l[a + 1..] {
            if x == y {
                return Err(Error::domain(format!("{name}: eigenvalues must be pairwise distinct, got {l:?}")));
            }
        }
    }
    Ok(())
}

fn check_coupling(name: &str, c: f64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("coupling {name} must be finite, got {c}")))
    }
}

/// Real rigid body `ṗ = −(μ−ν)qr, q̇ = −(ν−λ)rp, ṙ = −(λ−μ)pq` in rescaled time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealTriad {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl RealTriad {
    pub fn new(lambda: f64, mu: f64, nu: f64) -> Result<Self> {
        check_distinct("real triad", &[lambda, mu, nu])?;
        Ok(RealTriad { lambda, mu, nu })
    }

    pub fn lambdas(&self) -> [f64; 3] {
        [self.lambda, self.mu, self.nu]
    }

    #[inline]
    pub fn rhs(&self, y: [f64; 3]) -> [f64; 3] {
        let [p, q, r] = y;
        let (l, m, n) = (self.lambda, self.mu, self.nu);
        [-(m - n) * q * r, -(n - l) * r * p, -(l - m) * p * q]
    }

    /// Jacobian of [`RealTriad::rhs`], row-major.
    pub fn jacobian(&self, y: [f64; 3]) -> [[f64; 3]; 3] {
        let [p, q, r] = y;
        let (a, b, c) = (self.mu - self.nu, self.nu - self.lambda, self.lambda - self.mu);
        [[0.0, -a * r, -a * q], [-b * r, 0.0, -b * p], [-c * q, -c * p, 0.0]]
    }
}

/// Complex triad with amplitudes `(U_k, U_m, U_n)` and coupling `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexTriad {
    pub lambdas: [f64; 3],
    pub c: f64,
}

impl ComplexTriad {
    pub fn new(lambdas: [f64; 3], c: f64) -> Result<Self> {
        check_distinct("complex triad", &lambdas)?;
        check_coupling("C", c)?;
        Ok(ComplexTriad { lambdas, c })
    }

    pub fn rhs(&self, u: [Complex64; 3]) -> [Complex64; 3] {
        let [uk, um, un] = u;
        let [lk, lm, ln] = self.lambdas;
        let c = self.c;
        [
            I * (lm - ln) * c * un * um.conj(),
            I * (ln - lk) * c * un * uk.conj(),
            -I * (lk - lm) * c * uk * um,
        ]
    }
}

/// Two rigid bodies sharing the mode `a_n`; state order `(a_k, a_m, a_n, a_m̃, a_k̃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledTriads {
    /// `(λ_k, λ_m, λ_n, λ_m̃, λ_k̃)`.
    pub lambdas: [f64; 5],
    pub gamma: f64,
    pub gamma_tilde: f64,
}

impl CoupledTriads {
    pub fn new(lambdas: [f64; 5], gamma: f64, gamma_tilde: f64) -> Result<Self> {
        let [lk, lm, ln, lmt, lkt] = lambdas;
        check_distinct("coupled system (k, m, n)", &[lk, lm, ln])?;
        check_distinct("coupled system (m~, n, k~)", &[lmt, ln, lkt])?;
        check_coupling("Gamma", gamma)?;
        check_coupling("GammaTilde", gamma_tilde)?;
        Ok(CoupledTriads {
            lambdas,
            gamma,
            gamma_tilde,
        })
    }

    #[inline]
    pub fn rhs(&self, a: [f64; 5]) -> [f64; 5] {
        let [ak, am, an, amt, akt] = a;
        let [lk, lm, ln, lmt, lkt] = self.lambdas;
        let (g, gt) = (self.gamma, self.gamma_tilde);
        [
            (lm - ln) * g * am * an,
            (ln - lk) * g * an * ak,
            (lk - lm) * g * ak * am + (lkt - lmt) * gt * akt * amt,
            (ln - lkt) * gt * an * akt,
            (lmt - ln) * gt * amt * an,
        ]
    }

    /// `α = (λ_m − λ_k)/(λ_n − λ_k)`.
    pub fn alpha(&self) -> f64 {
        let [lk, lm, ln, _, _] = self.lambdas;
        (lm - lk) / (ln - lk)
    }

    /// `α̃ = (λ_m̃ − λ_n)/(λ_k̃ − λ_n)`.
    pub fn alpha_tilde(&self) -> f64 {
        let [_, _, ln, lmt, lkt] = self.lambdas;
        (lmt - ln) / (lkt - ln)
    }
}

/// Explicit point of the real system together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealTriadState {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTriadState {
    pub u_k: Complex64,
    pub u_m: Complex64,
    pub u_n: Complex64,
    pub lambdas: [f64; 3],
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledState {
    pub a: [f64; 5],
    pub lambdas: [f64; 5],
    pub gamma: f64,
    pub gamma_tilde: f64,
}

pub fn rhs_real(s: &RealTriadState) -> [f64; 3] {
    RealTriad {
        lambda: s.lambda,
        mu: s.mu,
        nu: s.nu,
    }
    .rhs([s.p, s.q, s.r])
}

pub fn rhs_complex(s: &ComplexTriadState) -> [Complex64; 3] {
    ComplexTriad {
        lambdas: s.lambdas,
        c: s.c,
    }
    .rhs([s.u_k, s.u_m, s.u_n])
}

pub fn rhs_coupled(s: &CoupledState) -> [f64; 5] {
    CoupledTriads {
        lambdas: s.lambdas,
        gamma: s.gamma,
        gamma_tilde: s.gamma_tilde,
    }
    .rhs(s.a)
}

/// Any of the three resonant systems acting on a flat real state vector.
/// Complex amplitudes are stored as `(Re U_k, Im U_k, Re U_m, Im U_m, Re U_n, Im U_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum System {
    Real(RealTriad),
    Complex(ComplexTriad),
    Coupled(CoupledTriads),
}

pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, y: &[f64], dy: &mut [f64]);
}

/// Flat `(re, im)` layout of the complex system back into amplitudes `(U_k, U_m, U_n)`.
pub fn unpack_complex(y: &[f64]) -> [Complex64; 3] {
    [
        Complex64::new(y[0], y[1]),
        Complex64::new(y[2], y[3]),
        Complex64::new(y[4], y[5]),
    ]
}

pub fn pack_complex(u: [Complex64; 3]) -> Vec<f64> {
    u.iter().flat_map(|z| [z.re, z.im]).collect()
}

impl System {
    pub fn id(&self) -> &'static str {
        match self {
            System::Real(_) => "real",
            System::Complex(_) => "complex",
            System::Coupled(_) => "coupled",
        }
    }

    pub fn component_names(&self) -> &'static [&'static str] {
        match self {
            System::Real(_) => &["p", "q", "r"],
            System::Complex(_) => &["Uk_re", "Uk_im", "Um_re", "Um_im", "Un_re", "Un_im"],
            System::Coupled(_) => &["a_k", "a_m", "a_n", "a_mt", "a_kt"],
        }
    }

    /// Curl eigenvalue attached to each mode (one per amplitude, not per real component).
    pub fn mode_lambdas(&self) -> Vec<f64> {
        match self {
            System::Real(s) => s.lambdas().to_vec(),
            System::Complex(s) => s.lambdas.to_vec(),
            System::Coupled(s) => s.lambdas.to_vec(),
        }
    }

    /// Squared amplitude of each mode.
    pub fn mode_amplitudes_sq(&self, y: &[f64]) -> Vec<f64> {
        match self {
            System::Complex(_) => y.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).collect(),
            _ => y.iter().map(|x| x * x).collect(),
        }
    }

    /// Components allowed to be nonzero at the hyperbolic equilibria.
    pub(crate) fn saddle_mask(&self) -> Vec<bool> {
        match self {
            System::Real(_) | System::Complex(_) => {
                let l = self.mode_lambdas();
                let mid = (0..3)
                    .find(|&i| {
                        let below = l.iter().filter(|&&x| x < l[i]).count();
                        below == 1
                    })
                    .unwrap_or(1);
                (0..3).map(|i| i == mid).collect()
            }
            // (±a_k, 0, 0, 0, ±a_k̃)
            System::Coupled(_) => vec![true, false, false, false, true],
        }
    }
}

impl VectorField for System {
    fn dim(&self) -> usize {
        match self {
            System::Real(_) => 3,
            System::Complex(_) => 6,
            System::Coupled(_) => 5,
        }
    }

    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        match self {
            System::Real(s) => dy.copy_from_slice(&s.rhs([y[0], y[1], y[2]])),
            System::Complex(s) => {
                let d = s.rhs(unpack_complex(y));
                for (i, z) in d.iter().enumerate() {
                    dy[2 * i] = z.re;
                    dy[2 * i + 1] = z.im;
                }
            }
            System::Coupled(s) => dy.copy_from_slice(&s.rhs([y[0], y[1], y[2], y[3], y[4]])),
        }
    }
}
