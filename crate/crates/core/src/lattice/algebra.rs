//! Exact integer algebra of resonant triplets: irreducibility determinant,
//! degeneracy condition, and the decomposition of degenerate pairs into
//! gcd-reduced primitive generators.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{sigma, WaveVector};
use crate::error::{Error, Result};

/// Determinant of the matrix whose rows are `(v3², v2², v1²)` for `v = k, m, n`.
pub fn irreducibility_det(k: WaveVector, m: WaveVector, n: WaveVector) -> i128 {
    let row = |v: WaveVector| {
        let [a, b, c] = v.0.map(|x| (x as i128) * (x as i128));
        [c, b, a]
    };
    let (r0, r1, r2) = (row(k), row(m), row(n));
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

fn third_index(i: usize, j: usize) -> Result<usize> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::domain(format!("symmetry indices must be in 1..=3, got ({i}, {j})")));
    }
    if i == j {
        return Err(Error::domain(format!("symmetry indices must be distinct, got i = j = {i}")));
    }
    Ok(6 - i - j)
}

/// `G_{i,j}(k, m) = k_i n_j m_l + k_l m_j n_i` with `n` supplied explicitly.
pub fn degeneracy_g_with_n(k: WaveVector, m: WaveVector, n: WaveVector, i: usize, j: usize) -> Result<i64> {
    let l = third_index(i, j)?;
    let (i, j, l) = (i - 1, j - 1, l - 1);
    Ok(k.0[i] * n.0[j] * m.0[l] + k.0[l] * m.0[j] * n.0[i])
}

/// Degeneracy polynomial `G_{i,j}(k, m)` with `n = k + m`.
pub fn degeneracy_g(k: WaveVector, m: WaveVector, i: usize, j: usize) -> Result<i64> {
    degeneracy_g_with_n(k, m, k + m, i, j)
}

/// Large-`β` asymptotics of the radial wavenumber,
/// `β ≈ n1 π + n2 π/2 + π/4 + ψ` with `ψ ∈ {0, ±π/2}`.
pub fn beta_asymptotic(n1: i64, n2: i64, psi: f64) -> Result<f64> {
    if n1 < 1 {
        return Err(Error::domain(format!("beta asymptotics need n1 >= 1, got {n1}")));
    }
    let admissible = [0.0, PI / 2.0, -PI / 2.0];
    if !admissible.iter().any(|a| (psi - a).abs() <= 1e-12) {
        return Err(Error::domain(format!("psi must be 0 or ±π/2, got {psi}")));
    }
    Ok(n1 as f64 * PI + n2 as f64 * PI / 2.0 + PI / 4.0 + psi)
}

/// Outcome of the five gcd conditions on a [`PrimitivePair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdChecks {
    pub a_aprime: bool,
    pub b_bprime: bool,
    pub a_b: bool,
    pub aprime_bprime: bool,
    pub kbar_mbar: bool,
}

impl GcdChecks {
    pub fn all(&self) -> bool {
        self.a_aprime && self.b_bprime && self.a_b && self.aprime_bprime && self.kbar_mbar
    }
}

/// Two decompositions `n = a k̄ + b m̄ = a′ σ_i(k̄) + b′ σ_j(m̄)` of a
/// degenerate resonant triplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitivePair {
    pub kbar: WaveVector,
    pub mbar: WaveVector,
    pub a: i64,
    pub a_prime: i64,
    pub b: i64,
    pub b_prime: i64,
    pub i: usize,
    pub j: usize,
    pub alpha: Ratio<i64>,
    pub beta: Ratio<i64>,
    /// Common divisor removed from `(k/a, m/b)`; the input `n` equals `scale · self.n()`.
    pub scale: i64,
}

impl PrimitivePair {
    /// `a k̄ + b m̄`.
    pub fn n(&self) -> WaveVector {
        self.kbar.scale(self.a) + self.mbar.scale(self.b)
    }

    /// `a′ σ_i(k̄) + b′ σ_j(m̄)`.
    pub fn n_tilde(&self) -> WaveVector {
        sigma(self.i, self.kbar).scale(self.a_prime) + sigma(self.j, self.mbar).scale(self.b_prime)
    }

    /// The second pair `(k̃, m̃) = (α σ_i(k), β σ_j(m))` at the input scale.
    pub fn tilde_pair(&self) -> (WaveVector, WaveVector) {
        (
            sigma(self.i, self.kbar).scale(self.a_prime * self.scale),
            sigma(self.j, self.mbar).scale(self.b_prime * self.scale),
        )
    }

    pub fn gcd_checks(&self) -> GcdChecks {
        GcdChecks {
            a_aprime: self.a.gcd(&self.a_prime) == 1,
            b_bprime: self.b.gcd(&self.b_prime) == 1,
            a_b: self.a.gcd(&self.b) == 1,
            aprime_bprime: self.a_prime.gcd(&self.b_prime) == 1,
            kbar_mbar: self.kbar.content().gcd(&self.mbar.content()) == 1,
        }
    }

    /// Both decompositions agree, all gcd conditions hold and `α, β ∉ {0, ±1}`.
    pub fn verify(&self) -> Result<()> {
        if self.n() != self.n_tilde() {
            return Err(Error::Inconsistent(format!(
                "decompositions disagree: {} vs {}",
                self.n(),
                self.n_tilde()
            )));
        }
        let checks = self.gcd_checks();
        if !checks.all() {
            return Err(Error::Inconsistent(format!("gcd conditions fail: {checks:?}")));
        }
        for r in [self.alpha, self.beta] {
            if is_excluded(r) {
                return Err(Error::Reducible(format!("ratio {r} in {{0, ±1}}")));
            }
        }
        Ok(())
    }
}

fn is_excluded(r: Ratio<i64>) -> bool {
    *r.denom() == 1 && r.numer().abs() <= 1
}

/// Splits a degenerate pair `(k, m)`, `G_{i,j}(k, m) = 0`, into primitive
/// generators with `α = a′/a` and `β = b′/b` in lowest terms.
pub fn decompose_primitive(k: WaveVector, m: WaveVector, i: usize, j: usize) -> Result<PrimitivePair> {
    let l = third_index(i, j)?;
    let n = k + m;
    if k.n3() == 0 || m.n3() == 0 || n.n3() == 0 {
        return Err(Error::Catalytic([k.n3(), m.n3(), n.n3()]));
    }
    let g = degeneracy_g(k, m, i, j)?;
    if g != 0 {
        return Err(Error::NotDegenerate(g));
    }
    let (ci, cj, cl) = (i - 1, j - 1, l - 1);
    let (k, m) = (k.0, m.0);
    let alpha_den = m[ci] * k[cl] + m[cl] * k[ci];
    let beta_den = m[cl] * k[cj] + m[cj] * k[cl];
    if alpha_den == 0 || beta_den == 0 {
        return Err(Error::Reducible(format!(
            "vanishing denominator in alpha or beta ({alpha_den}, {beta_den})"
        )));
    }
    let alpha = Ratio::new(m[ci] * k[cl] - m[cl] * k[ci], alpha_den);
    let beta = Ratio::new(m[cl] * k[cj] - m[cj] * k[cl], beta_den);
    if is_excluded(alpha) || is_excluded(beta) {
        return Err(Error::Reducible(format!("alpha = {alpha}, beta = {beta} must avoid {{0, ±1}}")));
    }
    let (a, a_prime) = (*alpha.denom(), *alpha.numer());
    let (b, b_prime) = (*beta.denom(), *beta.numer());

    let kbar = WaveVector(k)
        .div_exact(a)
        .ok_or_else(|| Error::Inconsistent(format!("a = {a} does not divide k = {}", WaveVector(k))))?;
    let mbar = WaveVector(m)
        .div_exact(b)
        .ok_or_else(|| Error::Inconsistent(format!("b = {b} does not divide m = {}", WaveVector(m))))?;
    let d = kbar.content().gcd(&mbar.content());
    let (kbar, mbar) = (kbar.div_exact(d).unwrap_or(kbar), mbar.div_exact(d).unwrap_or(mbar));

    let pair = PrimitivePair {
        kbar,
        mbar,
        a,
        a_prime,
        b,
        b_prime,
        i,
        j,
        alpha,
        beta,
        scale: d,
    };
    pair.verify()?;
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn determinant_examples() {
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(2, 3, 1));
        assert_eq!(irreducibility_det(k, m, k + m), -70);
        assert_eq!(irreducibility_det(k, k, k + k), 0);
        for j in 1..=3 {
            assert_eq!(
                irreducibility_det(sigma(j, k), sigma(j, m), sigma(j, k + m)),
                irreducibility_det(k, m, k + m)
            );
        }
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_g(WaveVector::new(1, 0, 0), WaveVector::new(0, 1, 0), 1, 2).unwrap(), 0);
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(2, 3, 1));
        assert_eq!(degeneracy_g(k, m, 1, 2).unwrap(), 32);
        assert!(degeneracy_g(k, m, 2, 2).is_err());
        assert!(degeneracy_g(k, m, 0, 2).is_err());
    }

    #[test]
    fn degeneracy_scaling() {
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(2, 3, 1));
        let n = k + m;
        // Linear in k for fixed n, cubic under joint rescaling.
        assert_eq!(
            degeneracy_g_with_n(k.scale(2), m, n, 1, 2).unwrap(),
            2 * degeneracy_g_with_n(k, m, n, 1, 2).unwrap()
        );
        assert_eq!(degeneracy_g(k.scale(3), m.scale(3), 1, 2).unwrap(), 27 * degeneracy_g(k, m, 1, 2).unwrap());
    }

    #[test]
    fn beta_examples() {
        assert_relative_eq!(beta_asymptotic(1, 0, 0.0).unwrap(), 5.0 * PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(
            beta_asymptotic(1, 2, 0.0).unwrap() - beta_asymptotic(1, 0, 0.0).unwrap(),
            PI,
            epsilon = 1e-14
        );
        assert_relative_eq!(beta_asymptotic(2, 0, PI / 2.0).unwrap(), 11.0 * PI / 4.0, epsilon = 1e-14);
        assert!(beta_asymptotic(1, 0, 0.3).is_err());
        assert!(beta_asymptotic(0, 0, 0.0).is_err());
    }

    // a = 2, a' = 3, b = 5, b' = 7, i = 1, j = 2 gives the component equations
    // 5 kbar_1 - 2 mbar_1 = 0, -kbar_2 + 12 mbar_2 = 0, -kbar_3 - 2 mbar_3 = 0.
    fn worked_pair() -> (WaveVector, WaveVector) {
        let kbar = WaveVector::new(2, 12, 2);
        let mbar = WaveVector::new(5, 1, -1);
        (kbar.scale(2), mbar.scale(5))
    }

    #[test]
    fn decompose_worked_pair() {
        let (k, m) = worked_pair();
        assert_eq!(degeneracy_g(k, m, 1, 2).unwrap(), 0);
        let pp = decompose_primitive(k, m, 1, 2).unwrap();
        assert_eq!(pp.alpha, Ratio::new(3, 2));
        assert_eq!(pp.beta, Ratio::new(7, 5));
        assert_eq!(pp.n(), k + m);
        assert_eq!(pp.n_tilde(), k + m);
        assert!(pp.gcd_checks().all());
        let (kt, mt) = pp.tilde_pair();
        assert_eq!(kt + mt, k + m);
    }

    #[test]
    fn decompose_rejects_nondegenerate() {
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(2, 3, 1));
        assert!(matches!(decompose_primitive(k, m, 1, 2), Err(Error::NotDegenerate(32))));
    }
}
