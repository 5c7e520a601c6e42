//! Rational form of the three-wave dispersion relation.
//!
//! With `h_v = (θ1 v1² + θ2 v2²) / v3²` the relation
//! `±(θ3 + h_n)^{-1/2} ± (θ3 + h_k)^{-1/2} ± (θ3 + h_m)^{-1/2} = 0`
//! is equivalent, over all sign choices, to a quartic in `θ3`.

use serde::{Deserialize, Serialize};

use super::resonance::{residual, SignBranch, ROOT_VERIFY_TOL};
use super::{LatticeParams, WaveVector};
use crate::error::{Error, Result};

/// Coefficients `(P4, P3, P2, P1, P0)` of the dispersion quartic in `θ3`.
pub fn quartic_coefficients(h_k: f64, h_m: f64, h_n: f64) -> [f64; 5] {
    let (a, b, c) = (h_k, h_m, h_n);
    let p4 = -3.0;
    let p3 = -4.0 * (a + b + c);
    let p2 = -6.0 * (a * b + a * c + b * c);
    let p1 = -12.0 * a * b * c;
    let p0 = b * b * c * c + a * a * c * c + b * b * a * a - 2.0 * (a * b * c * c + a * c * b * b + b * c * a * a);
    [p4, p3, p2, p1, p0]
}

/// Dense real polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// From coefficients listed highest degree first.
    pub fn from_descending(desc: &[f64]) -> Self {
        Polynomial::new(desc.iter().rev().copied().collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `Σ |c_i| |x|^i`, the scale against which `eval(x)` is compared to zero.
    fn magnitude(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x.abs() + c.abs())
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    /// Bound on the modulus of every root (Cauchy).
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap_or(&1.0);
        if lead == 0.0 {
            return 0.0;
        }
        1.0 + self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }
}

fn bisect(p: &Polynomial, mut a: f64, mut b: f64) -> f64 {
    let mut fa = p.eval(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Real roots in `[lo, hi]`, isolated between consecutive critical points.
///
/// Even-multiplicity roots are reported when the polynomial at a critical
/// point vanishes to rounding accuracy.
pub fn real_roots(p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
    let deg = p.degree();
    if deg == 0 || lo > hi {
        return Vec::new();
    }
    if deg == 1 {
        let r = -p.coeffs[0] / p.coeffs[1];
        return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
    }
    let crit = real_roots(&p.derivative(), lo, hi);
    let mut nodes = Vec::with_capacity(crit.len() + 2);
    nodes.push(lo);
    nodes.extend(crit.iter().copied().filter(|&c| c > lo && c < hi));
    nodes.push(hi);

    let near_zero = |x: f64| p.eval(x).abs() <= 64.0 * f64::EPSILON * p.magnitude(x);
    let last = nodes.len() - 1;
    // Interior critical points where the polynomial vanishes to rounding
    // accuracy are taken as even-multiplicity roots.
    let flagged: Vec<bool> = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| p.eval(x) == 0.0 || (i > 0 && i < last && near_zero(x)))
        .collect();
    let mut roots: Vec<f64> = nodes
        .iter()
        .zip(&flagged)
        .filter(|(_, &f)| f)
        .map(|(&x, _)| x)
        .collect();
    for i in 0..last {
        if flagged[i] || flagged[i + 1] {
            continue;
        }
        let (a, b) = (nodes[i], nodes[i + 1]);
        if (p.eval(a) < 0.0) != (p.eval(b) < 0.0) {
            roots.push(bisect(p, a, b));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    roots
}

/// A verified positive root `θ3` of the dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRoot {
    pub theta3: f64,
    pub signs: SignBranch,
    pub residual: f64,
}

fn best_at(k: WaveVector, m: WaveVector, theta1: f64, theta2: f64, theta3: f64) -> Option<(SignBranch, f64)> {
    let p = LatticeParams::new(theta1, theta2, theta3).ok()?;
    SignBranch::all()[..4]
        .iter()
        .map(|&s| (s, residual(k, m, &p, s).unwrap_or(f64::INFINITY)))
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
}

/// Secant refinement on the radical form for a fixed branch; keeps the
/// iterate with the smallest residual.
fn polish(k: WaveVector, m: WaveVector, theta1: f64, theta2: f64, root: f64, s: SignBranch) -> (f64, f64) {
    let f = |t: f64| {
        LatticeParams::new(theta1, theta2, t)
            .ok()
            .and_then(|p| residual(k, m, &p, s).ok())
            .unwrap_or(f64::NAN)
    };
    let mut best = (root, f(root));
    let (mut x0, mut x1) = (root, root * (1.0 + 1e-9));
    let (mut f0, mut f1) = (best.1, f(x1));
    for _ in 0..12 {
        if !(f1.is_finite() && f0.is_finite()) || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 > 0.0) {
            break;
        }
        let f2 = f(x2);
        if f2.abs() < best.1.abs() {
            best = (x2, f2);
        }
        (x0, f0, x1, f1) = (x1, f1, x2, f2);
        if f2 == 0.0 {
            break;
        }
    }
    best
}

/// Positive roots `θ3` of the dispersion quartic for `(k, m, k + m)` whose
/// radical form has `|residual| ≤ 1e-10` on some sign branch, ascending.
pub fn solve_theta3(k: WaveVector, m: WaveVector, theta1: f64, theta2: f64) -> Result<Vec<ThetaRoot>> {
    solve_theta3_with_tol(k, m, theta1, theta2, ROOT_VERIFY_TOL)
}

pub fn solve_theta3_with_tol(
    k: WaveVector,
    m: WaveVector,
    theta1: f64,
    theta2: f64,
    tol: f64,
) -> Result<Vec<ThetaRoot>> {
    let n = k + m;
    if k.n3() == 0 || m.n3() == 0 || n.n3() == 0 {
        return Err(Error::Catalytic([k.n3(), m.n3(), n.n3()]));
    }
    for (name, v) in [("theta1", theta1), ("theta2", theta2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let h = |v: WaveVector| {
        let [a, b, c] = v.0.map(|x| x as f64);
        (theta1 * a * a + theta2 * b * b) / (c * c)
    };
    let poly = Polynomial::from_descending(&quartic_coefficients(h(k), h(m), h(n)));
    let candidates = real_roots(&poly, 0.0, poly.root_bound());

    let mut out: Vec<ThetaRoot> = Vec::new();
    for root in candidates.into_iter().filter(|&r| r > 0.0) {
        let Some((s, _)) = best_at(k, m, theta1, theta2, root) else {
            continue;
        };
        let (theta3, res) = polish(k, m, theta1, theta2, root, s);
        if res.abs() > tol {
            continue;
        }
        match out.last_mut() {
            Some(prev) if (prev.theta3 - theta3).abs() <= 1e-10 * theta3 => {
                if res.abs() < prev.residual.abs() {
                    *prev = ThetaRoot { theta3, signs: s, residual: res };
                }
            }
            _ => out.push(ThetaRoot {
                theta3,
                signs: s,
                residual: res,
            }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveFlag {
    Tracked,
    /// Two verified roots equidistant from the previous point; the smaller was taken.
    Ambiguous,
    /// No verified positive root at this grid point.
    Gap,
}

impl CurveFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveFlag::Tracked => "tracked",
            CurveFlag::Ambiguous => "ambiguous",
            CurveFlag::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub ratio2: f64,
    pub ratio3: Option<f64>,
    pub residual: Option<f64>,
    pub branch_flag: CurveFlag,
}

/// Resonance curve `θ3/θ1 = F(θ2/θ1)` followed by continuity: at each grid
/// point the verified root nearest the last defined value is kept, starting
/// from the smallest root.
pub fn resonance_curve(k: WaveVector, m: WaveVector, ratio2_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if ratio2_grid.is_empty() {
        return Err(Error::domain("resonance curve grid is empty"));
    }
    if ratio2_grid.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::domain("resonance curve grid values must be positive"));
    }
    if ratio2_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("resonance curve grid must be strictly increasing"));
    }
    let mut prev: Option<f64> = None;
    let mut out = Vec::with_capacity(ratio2_grid.len());
    for &r2 in ratio2_grid {
        let roots = solve_theta3(k, m, 1.0, r2)?;
        if roots.is_empty() {
            out.push(CurvePoint {
                ratio2: r2,
                ratio3: None,
                residual: None,
                branch_flag: CurveFlag::Gap,
            });
            continue;
        }
        let (pick, flag) = match prev {
            None => (roots[0], CurveFlag::Tracked),
            Some(last) => {
                let mut best = roots[0];
                let mut flag = CurveFlag::Tracked;
                for r in &roots[1..] {
                    let (d_best, d_r) = ((best.theta3 - last).abs(), (r.theta3 - last).abs());
                    if (d_r - d_best).abs() <= 1e-12 * last.abs().max(1.0) {
                        flag = CurveFlag::Ambiguous;
                    } else if d_r < d_best {
                        best = *r;
                        flag = CurveFlag::Tracked;
                    }
                }
                (best, flag)
            }
        };
        prev = Some(pick.theta3);
        out.push(CurvePoint {
            ratio2: r2,
            ratio3: Some(pick.theta3),
            residual: Some(pick.residual),
            branch_flag: flag,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_examples() {
        assert_eq!(quartic_coefficients(1.0, 1.0, 1.0), [-3.0, -12.0, -18.0, -12.0, -3.0]);
        assert_eq!(quartic_coefficients(0.0, 0.0, 0.0), [-3.0, 0.0, 0.0, 0.0, 0.0]);
        let c = quartic_coefficients(2.0, 0.0, 5.0);
        assert_eq!(c[3], 0.0);
        assert_eq!(c[4], 4.0 * 25.0);
    }

    #[test]
    fn quartic_vanishes_where_radical_form_does() {
        // Expanded product of the eight sign combinations, checked pointwise.
        let (a, b, c) = (0.3, 1.7, 0.9);
        let poly = Polynomial::from_descending(&quartic_coefficients(a, b, c));
        for &x in &[0.1, 0.5, 2.0, 7.5] {
            let (u, v, w) = (1.0 / (x + a), 1.0 / (x + b), 1.0 / (x + c));
            let sym = u * u + v * v + w * w - 2.0 * (u * v + u * w + v * w);
            let scale = ((x + a) * (x + b) * (x + c)).powi(2);
            assert_relative_eq!(poly.eval(x), sym * scale, max_relative = 1e-12);
        }
    }

    #[test]
    fn real_roots_of_known_polynomials() {
        // (x-1)(x-2)(x-3)(x+4)
        let p = Polynomial::from_descending(&[1.0, -2.0, -13.0, 38.0, -24.0]);
        let r = real_roots(&p, -10.0, 10.0);
        assert_eq!(r.len(), 4);
        for (got, want) in r.iter().zip([-4.0, 1.0, 2.0, 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        // Double root at 2: (x-2)^2 (x+1)
        let p = Polynomial::from_descending(&[1.0, -3.0, 0.0, 4.0]);
        let r = real_roots(&p, -5.0, 5.0);
        assert_eq!(r.len(), 2, "{r:?}");
        assert_relative_eq!(r[1], 2.0, epsilon = 1e-7);
        // No real roots.
        assert!(real_roots(&Polynomial::from_descending(&[1.0, 0.0, 1.0]), -3.0, 3.0).is_empty());
    }

    #[test]
    fn solve_theta3_roots_verify() {
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(2, -1, 1));
        let roots = solve_theta3(k, m, 1.0, 1.0).unwrap();
        assert!(roots.len() <= 4);
        for r in &roots {
            let p = LatticeParams::new(1.0, 1.0, r.theta3).unwrap();
            assert!(residual(k, m, &p, r.signs).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn solve_theta3_rejects_catalytic() {
        let r = solve_theta3(WaveVector::new(1, 0, 1), WaveVector::new(1, 1, -1), 1.0, 1.0);
        assert!(matches!(r, Err(Error::Catalytic(_))));
    }

    #[test]
    fn purely_vertical_modes_have_no_positive_root() {
        let r = solve_theta3(WaveVector::new(0, 0, 1), WaveVector::new(0, 0, 2), 1.0, 1.0).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn curve_grid_validation() {
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(2, -1, 1));
        assert!(resonance_curve(k, m, &[]).is_err());
        assert!(resonance_curve(k, m, &[1.0, 0.5]).is_err());
        assert!(resonance_curve(k, m, &[-1.0, 0.5]).is_err());
    }
}
