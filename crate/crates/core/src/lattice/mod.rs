//! Integer-lattice wavevector algebra and three-wave resonance on periodic
//! lattices `[0, 2π] × [0, 2π] × [0, 2πh]`.
//!
//! A mode `v = (v1, v2, v3)` carries the normalized frequency
//! `v3 / sqrt(θ1 v1² + θ2 v2² + θ3 v3²)`; a triad `n = k + m` is resonant
//! when a signed sum of the three frequencies vanishes.

mod algebra;
mod quartic;
mod resonance;

pub use algebra::{
    beta_asymptotic, decompose_primitive, degeneracy_g, degeneracy_g_with_n, irreducibility_det,
    GcdChecks, PrimitivePair,
};
pub use quartic::{
    quartic_coefficients, real_roots, resonance_curve, solve_theta3, solve_theta3_with_tol,
    CurveFlag, CurvePoint, Polynomial, ThetaRoot,
};
pub use resonance::{
    canonical_pair, canonicalize, dispersion_ratio, residual, search_triads, SignBranch,
    Triad, TriadCatalog, DEFAULT_SEARCH_TOL, ROOT_VERIFY_TOL,
};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Integer triple indexing a curl/Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVector(pub [i64; 3]);

impl WaveVector {
    pub const fn new(n1: i64, n2: i64, n3: i64) -> Self {
        WaveVector([n1, n2, n3])
    }

    pub fn n1(&self) -> i64 {
        self.0[0]
    }

    pub fn n2(&self) -> i64 {
        self.0[1]
    }

    pub fn n3(&self) -> i64 {
        self.0[2]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    /// Gcd of the absolute values of the components (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    /// The vector divided by its content.
    pub fn primitive(&self) -> WaveVector {
        let g = self.content();
        if g <= 1 {
            *self
        } else {
            WaveVector(self.0.map(|c| c / g))
        }
    }

    pub fn scale(&self, gamma: i64) -> WaveVector {
        WaveVector(self.0.map(|c| c * gamma))
    }

    /// Exact division, `None` if `d` does not divide every component.
    pub fn div_exact(&self, d: i64) -> Option<WaveVector> {
        if d == 0 || self.0.iter().any(|c| c % d != 0) {
            return None;
        }
        Some(WaveVector(self.0.map(|c| c / d)))
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// `θ1 v1² + θ2 v2² + θ3 v3²`.
    pub fn weighted_norm_sq(&self, p: &LatticeParams) -> f64 {
        let [a, b, c] = self.0.map(|x| x as f64);
        p.theta1 * a * a + p.theta2 * b * b + p.theta3 * c * c
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for WaveVector {
    type Output = WaveVector;
    fn add(self, rhs: WaveVector) -> WaveVector {
        WaveVector([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for WaveVector {
    type Output = WaveVector;
    fn sub(self, rhs: WaveVector) -> WaveVector {
        WaveVector([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for WaveVector {
    type Output = WaveVector;
    fn neg(self) -> WaveVector {
        WaveVector(self.0.map(|c| -c))
    }
}

impl Mul<WaveVector> for i64 {
    type Output = WaveVector;
    fn mul(self, rhs: WaveVector) -> WaveVector {
        rhs.scale(self)
    }
}

impl From<[i64; 3]> for WaveVector {
    fn from(v: [i64; 3]) -> Self {
        WaveVector(v)
    }
}

/// Positive lattice parameters of the dispersion law; a cylinder of height
/// `h` maps to `θ3 = 1/h²` with `θ1 = θ2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl LatticeParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        let p = LatticeParams {
            theta1,
            theta2,
            theta3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn cylinder(height: f64) -> Result<Self> {
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::domain(format!("cylinder height must be positive, got {height}")));
        }
        LatticeParams::new(1.0, 1.0, 1.0 / (height * height))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("theta1", self.theta1), ("theta2", self.theta2), ("theta3", self.theta3)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Reflection `σ_j` flipping component `j` (1-based); `σ_0` is the identity.
pub fn apply_symmetry(j: usize, v: WaveVector) -> Result<WaveVector> {
    match j {
        0 => Ok(v),
        1..=3 => {
            let mut out = v;
            out.0[j - 1] = -out.0[j - 1];
            Ok(out)
        }
        _ => Err(Error::domain(format!("symmetry index must be in 0..=3, got {j}"))),
    }
}

pub(crate) fn sigma(j: usize, v: WaveVector) -> WaveVector {
    let mut out = v;
    out.0[j - 1] = -out.0[j - 1];
    out
}
