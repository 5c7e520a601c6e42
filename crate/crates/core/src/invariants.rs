//! Conserved and monitored functionals of the resonant systems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::dynamics::{unpack_complex, ComplexTriadState, CoupledTriads, RealTriad, System};
use crate::error::{Error, Result};

/// `Σ a²`.
pub fn energy(sys: &System, y: &[f64]) -> f64 {
    sys.mode_amplitudes_sq(y).iter().sum()
}

/// `Σ λ a²` with signed eigenvalues.
pub fn helicity(sys: &System, y: &[f64]) -> f64 {
    let l = sys.mode_lambdas();
    sys.mode_amplitudes_sq(y).iter().zip(&l).map(|(a, l)| l * a).sum()
}

/// `W_s = Σ |λ|^{2s} a²`; `s = 1` is the enstrophy.
pub fn hs_norm_sq(sys: &System, y: &[f64], s: f64) -> f64 {
    let l = sys.mode_lambdas();
    // Integer s goes through powi so that W_1 is bit-identical to Ξ.
    let weight = |l: f64| {
        if s.fract() == 0.0 && s.abs() <= 64.0 {
            (l * l).powi(s as i32)
        } else {
            l.abs().powf(2.0 * s)
        }
    };
    sys.mode_amplitudes_sq(y).iter().zip(&l).map(|(a, l)| weight(*l) * a).sum()
}

pub fn enstrophy(sys: &System, y: &[f64]) -> f64 {
    let l = sys.mode_lambdas();
    sys.mode_amplitudes_sq(y).iter().zip(&l).map(|(a, l)| l * l * a).sum()
}

/// `dΞ/dt = −2 S p q r` with `S = λ²(μ−ν) + μ²(ν−λ) + ν²(λ−μ)`.
pub fn enstrophy_rate(sys: &RealTriad, y: [f64; 3]) -> f64 {
    -2.0 * enstrophy_rate_coefficient(sys) * y[0] * y[1] * y[2]
}

pub fn enstrophy_rate_coefficient(sys: &RealTriad) -> f64 {
    let (l, m, n) = (sys.lambda, sys.mu, sys.nu);
    l * l * (m - n) + m * m * (n - l) + n * n * (l - m)
}

/// `(E₁, E₂, E₃)` of the coupled system.
pub fn coupled_invariants(c: &CoupledTriads, a: &[f64]) -> [f64; 3] {
    let (al, at) = (c.alpha(), c.alpha_tilde());
    let [ak, am, an, amt, akt] = [a[0], a[1], a[2], a[3], a[4]];
    [
        ak * ak + (1.0 - al) * am * am,
        an * an + al * am * am + (1.0 - at) * amt * amt,
        akt * akt + at * amt * amt,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManleyRowe {
    pub phase_invariant: f64,
    pub e1: f64,
    pub e2: f64,
    /// Some amplitude vanished, so the phase is undefined and the phase term is 0.
    pub degenerate: bool,
}

fn polar(u: [Complex64; 3]) -> ([f64; 3], [f64; 3]) {
    let r = u.map(|z| z.norm());
    let th = u.map(|z| z.arg());
    (r, th)
}

/// Phase-amplitude first integrals in the form actually conserved by the
/// complex system: `r_k r_m r_n cos(θ_n − θ_k − θ_m)`,
/// `(λ_m−λ_n) r_n² − (λ_k−λ_m) r_k²` and `(λ_n−λ_k) r_k² − (λ_m−λ_n) r_m²`.
pub fn manley_rowe(s: &ComplexTriadState) -> ManleyRowe {
    let u = [s.u_k, s.u_m, s.u_n];
    let [lk, lm, ln] = s.lambdas;
    let (r, _) = polar(u);
    let degenerate = r.contains(&0.0);
    // Re(U_n* U_k U_m) avoids arg() branch cuts.
    let phase = if degenerate { 0.0 } else { (s.u_n.conj() * s.u_k * s.u_m).re };
    ManleyRowe {
        phase_invariant: phase,
        e1: (lm - ln) * r[2] * r[2] - (lk - lm) * r[0] * r[0],
        e2: (ln - lk) * r[0] * r[0] - (lm - ln) * r[1] * r[1],
        degenerate,
    }
}

/// The three quantities exactly as printed: `r_k r_m r_n sin(θ_n − θ_k − θ_m)`,
/// `(λ_k−λ_m) r_n² − (λ_m−λ_n) r_k²`, `(λ_m−λ_n) r_k² − (λ_n−λ_k) r_m²`.
/// These are not constants of motion of the system as written; see [`manley_rowe`].
pub fn manley_rowe_printed(s: &ComplexTriadState) -> ManleyRowe {
    let u = [s.u_k, s.u_m, s.u_n];
    let [lk, lm, ln] = s.lambdas;
    let (r, th) = polar(u);
    let degenerate = r.contains(&0.0);
    let phase = if degenerate {
        0.0
    } else {
        r[0] * r[1] * r[2] * (th[2] - th[0] - th[1]).sin()
    };
    ManleyRowe {
        phase_invariant: phase,
        e1: (lk - lm) * r[2] * r[2] - (lm - ln) * r[0] * r[0],
        e2: (lm - ln) * r[0] * r[0] - (ln - lk) * r[1] * r[1],
        degenerate,
    }
}

/// Invariants watched by the integrator, by name.
pub fn monitored(sys: &System, y: &[f64]) -> Vec<(&'static str, f64)> {
    let mut out = vec![("E", energy(sys, y)), ("H", helicity(sys, y))];
    match sys {
        System::Real(_) => {}
        System::Complex(c) => {
            let [u_k, u_m, u_n] = unpack_complex(y);
            let mr = manley_rowe(&ComplexTriadState {
                u_k,
                u_m,
                u_n,
                lambdas: c.lambdas,
                c: c.c,
            });
            out.push(("MR", mr.phase_invariant));
            out.push(("MR1", mr.e1));
            out.push(("MR2", mr.e2));
        }
        System::Coupled(c) => {
            let [e1, e2, e3] = coupled_invariants(c, y);
            out.extend([("E1", e1), ("E2", e2), ("E3", e3)]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "Xi")]
    pub xi: f64,
    /// Keyed by the decimal rendering of `s`.
    #[serde(rename = "W_s")]
    pub w_s: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manley_rowe: Option<ManleyRowe>,
    #[serde(rename = "E1", skip_serializing_if = "Option::is_none", default)]
    pub e1: Option<f64>,
    #[serde(rename = "E2", skip_serializing_if = "Option::is_none", default)]
    pub e2: Option<f64>,
    #[serde(rename = "E3", skip_serializing_if = "Option::is_none", default)]
    pub e3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(rename = "alphaTilde", skip_serializing_if = "Option::is_none", default)]
    pub alpha_tilde: Option<f64>,
}

pub fn s_key(s: f64) -> String {
    format!("{s}")
}

pub fn invariant_report(sys: &System, y: &[f64], s_list: &[f64]) -> Result<InvariantReport> {
    use crate::dynamics::VectorField;
    if y.len() != sys.dim() {
        return Err(Error::domain(format!("state has {} components, system needs {}", y.len(), sys.dim())));
    }
    let mut w_s = BTreeMap::new();
    for &s in s_list {
        if !(s >= 1.0 && s.is_finite()) {
            return Err(Error::domain(format!("Sobolev index must be >= 1, got {s}")));
        }
        w_s.insert(s_key(s), hs_norm_sq(sys, y, s));
    }
    let mut rep = InvariantReport {
        e: energy(sys, y),
        h: helicity(sys, y),
        xi: enstrophy(sys, y),
        w_s,
        manley_rowe: None,
        e1: None,
        e2: None,
        e3: None,
        alpha: None,
        alpha_tilde: None,
    };
    match sys {
        System::Real(_) => {}
        System::Complex(c) => {
            let [u_k, u_m, u_n] = unpack_complex(y);
            rep.manley_rowe = Some(manley_rowe(&ComplexTriadState {
                u_k,
                u_m,
                u_n,
                lambdas: c.lambdas,
                c: c.c,
            }));
        }
        System::Coupled(c) => {
            let [_, _, ln, _, lkt] = c.lambdas;
            if c.lambdas[0] == ln || lkt == ln {
                return Err(Error::domain("alpha undefined: lambda_n coincides with lambda_k or lambda_kt"));
            }
            let [e1, e2, e3] = coupled_invariants(c, y);
            rep.e1 = Some(e1);
            rep.e2 = Some(e2);
            rep.e3 = Some(e3);
            rep.alpha = Some(c.alpha());
            rep.alpha_tilde = Some(c.alpha_tilde());
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveredSquares {
    pub p2: f64,
    pub q2: f64,
    pub r2: f64,
    /// All three squares are nonnegative.
    pub feasible: bool,
}

/// Inverts `(E, H, Ξ) = V · (p², q², r²)` for the Vandermonde matrix of `(λ, μ, ν)`.
pub fn vandermonde_recover(e: f64, h: f64, xi: f64, lambdas: [f64; 3]) -> Result<RecoveredSquares> {
    let [l, m, n] = lambdas;
    if l == m || m == n || l == n {
        return Err(Error::domain(format!("eigenvalues must be distinct, got {lambdas:?}")));
    }
    let p2 = (xi - (m + n) * h + m * n * e) / ((l - m) * (l - n));
    let q2 = (xi - (n + l) * h + n * l * e) / ((m - n) * (m - l));
    let r2 = (xi - (l + m) * h + l * m * e) / ((n - l) * (n - m));
    Ok(RecoveredSquares {
        p2,
        q2,
        r2,
        feasible: p2 >= 0.0 && q2 >= 0.0 && r2 >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn real(l: f64, m: f64, n: f64) -> System {
        System::Real(RealTriad::new(l, m, n).unwrap())
    }

    #[test]
    fn real_report_example() {
        let rep = invariant_report(&real(2.0, 1.0, -1.0), &[1.0, 1.0, 1.0], &[1.0, 3.0]).unwrap();
        assert_eq!((rep.e, rep.h, rep.xi), (3.0, 2.0, 6.0));
        assert_eq!(rep.w_s["3"], 66.0);
        assert_eq!(rep.w_s["1"], rep.xi);
        let zero = invariant_report(&real(2.0, 1.0, -1.0), &[0.0; 3], &[2.0]).unwrap();
        assert_eq!((zero.e, zero.h, zero.xi, zero.w_s["2"]), (0.0, 0.0, 0.0, 0.0));
        assert!(invariant_report(&real(2.0, 1.0, -1.0), &[0.0; 3], &[0.5]).is_err());
    }

    #[test]
    fn coupled_report_example() {
        let c = CoupledTriads::new([1.0, -1.0, 2.0, -2.0, 3.0], 1.0, 1.0).unwrap();
        let rep = invariant_report(&System::Coupled(c), &[1.0; 5], &[]).unwrap();
        assert_eq!(rep.alpha, Some(-2.0));
        assert_eq!(rep.alpha_tilde, Some(-4.0));
        assert_eq!((rep.e1, rep.e2, rep.e3), (Some(4.0), Some(4.0), Some(-3.0)));
        let json = serde_json::to_value(&rep).unwrap();
        for key in ["E", "H", "Xi", "W_s", "E1", "E2", "E3", "alpha", "alphaTilde"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn manley_rowe_printed_example() {
        let s = ComplexTriadState {
            u_k: Complex64::new(1.0, 0.0),
            u_m: Complex64::new(1.0, 0.0),
            u_n: Complex64::from_polar(1.0, FRAC_PI_2),
            lambdas: [2.0, 1.0, -1.0],
            c: 1.0,
        };
        let mr = manley_rowe_printed(&s);
        assert_abs_diff_eq!(mr.phase_invariant, 1.0, epsilon = 1e-15);
        assert_eq!((mr.e1, mr.e2), (-1.0, 5.0));
        let mut real_state = s;
        real_state.u_n = Complex64::new(1.0, 0.0);
        assert_eq!(manley_rowe_printed(&real_state).phase_invariant, 0.0);
        let zero = ComplexTriadState {
            u_k: Complex64::new(0.0, 0.0),
            ..s
        };
        assert!(manley_rowe(&zero).degenerate);
        assert_eq!(manley_rowe(&zero).phase_invariant, 0.0);
    }

    #[test]
    fn vandermonde_examples() {
        let r = vandermonde_recover(3.0, 2.0, 6.0, [2.0, 1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(r.p2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.q2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.r2, 1.0, epsilon = 1e-14);
        assert!(r.feasible);
        let l = 2.5;
        let r = vandermonde_recover(1.0, l, l * l, [l, 1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(r.p2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.q2, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.r2, 0.0, epsilon = 1e-14);
        assert!(!vandermonde_recover(1.0, 10.0, 0.0, [2.0, 1.0, -1.0]).unwrap().feasible);
        assert!(vandermonde_recover(1.0, 1.0, 1.0, [1.0, 1.0, -1.0]).is_err());
    }

    #[test]
    fn cone_identity() {
        // E₂ = 0 is a_n² + (1−α̃) a_m̃² = −α a_m².
        let c = CoupledTriads::new([1.0, -1.0, 2.0, -2.0, 3.0], 1.0, 1.0).unwrap();
        let (al, at) = (c.alpha(), c.alpha_tilde());
        let (am, amt) = (0.7, 0.2);
        let an = (-al * am * am - (1.0 - at) * amt * amt).sqrt();
        let [_, e2, _] = coupled_invariants(&c, &[0.3, am, an, amt, -0.4]);
        assert_abs_diff_eq!(e2, 0.0, epsilon = 1e-15);
    }
}
