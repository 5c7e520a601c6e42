use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::systems::RealTriad;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Saddle,
    Center,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub point: [f64; 3],
    pub kind: EquilibriumKind,
    /// Linearization eigenvalues as `(re, im)` pairs.
    pub eigenvalues: Vec<(f64, f64)>,
}

/// Label from the linearization spectrum: any eigenvalue with positive real
/// part makes a saddle, a nonzero purely imaginary pair with no real growth a center.
pub fn classify_spectrum(eigs: &[Complex64], tol: f64) -> EquilibriumKind {
    if eigs.iter().any(|z| z.re > tol) {
        EquilibriumKind::Saddle
    } else if eigs.iter().all(|z| z.re.abs() <= tol) && eigs.iter().any(|z| z.im.abs() > tol) {
        EquilibriumKind::Center
    } else {
        EquilibriumKind::Degenerate
    }
}

pub fn linearization_eigenvalues(sys: &RealTriad, y: [f64; 3]) -> Vec<Complex64> {
    let j = sys.jacobian(y);
    let m = Matrix3::from_fn(|r, c| j[r][c]);
    m.complex_eigenvalues().iter().copied().collect()
}

/// The six axis equilibria `(±√E,0,0), (0,±√E,0), (0,0,±√E)` on the energy
/// sphere, labeled from their linearization. Requires `λ > μ > ν`.
pub fn classify_equilibria(lambda: f64, mu: f64, nu: f64, energy: f64) -> Result<Vec<Equilibrium>> {
    if !(lambda > mu && mu > nu) {
        return Err(Error::domain(format!(
            "equilibrium classification needs lambda > mu > nu, got ({lambda}, {mu}, {nu})"
        )));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::domain(format!("energy must be positive, got {energy}")));
    }
    let sys = RealTriad::new(lambda, mu, nu)?;
    let a = energy.sqrt();
    let scale = [lambda, mu, nu].iter().fold(0.0f64, |m, x| m.max(x.abs())) * a;
    let tol = 1e-9 * scale.max(1.0);
    let mut out = Vec::with_capacity(6);
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut point = [0.0; 3];
            point[axis] = s * a;
            let eigs = linearization_eigenvalues(&sys, point);
            out.push(Equilibrium {
                point,
                kind: classify_spectrum(&eigs, tol),
                eigenvalues: eigs.iter().map(|z| (z.re, z.im)).collect(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_and_center_labels_for_worked_lambdas() {
        let eq = classify_equilibria(2.0, 1.0, -1.0, 1.0).unwrap();
        for e in &eq {
            let expect = if e.point[1] != 0.0 { EquilibriumKind::Saddle } else { EquilibriumKind::Center };
            assert_eq!(e.kind, expect, "{:?}", e.point);
        }
        let sys = RealTriad::new(2.0, 1.0, -1.0).unwrap();
        let pos = linearization_eigenvalues(&sys, [0.0, 1.0, 0.0]).iter().filter(|z| z.re > 1e-9).count();
        assert_eq!(pos, 1);
        for z in linearization_eigenvalues(&sys, [1.0, 0.0, 0.0]) {
            assert!(z.re.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unordered() {
        assert!(classify_equilibria(1.0, 2.0, -1.0, 1.0).is_err());
        assert!(classify_equilibria(2.0, 1.0, 1.0, 1.0).is_err());
    }
}
