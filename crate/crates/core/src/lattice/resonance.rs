use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::{irreducibility_det, LatticeParams, WaveVector};
use crate::error::{Error, Result};

/// Tolerance on the signed residual used by [`search_triads`].
pub const DEFAULT_SEARCH_TOL: f64 = 1e-12;
/// Tolerance used to accept a root of the dispersion quartic.
pub const ROOT_VERIFY_TOL: f64 = 1e-10;

/// `v3 / sqrt(θ1 v1² + θ2 v2² + θ3 v3²)`.
///
/// The ratio is homogeneous of degree zero; it is evaluated on the primitive
/// vector `v / content(v)` so that integer rescalings give bit-identical values.
pub fn dispersion_ratio(v: WaveVector, p: &LatticeParams) -> Result<f64> {
    if v.is_zero() {
        return Err(Error::domain("dispersion ratio of the zero vector"));
    }
    p.validate()?;
    Ok(ratio_unchecked(v, p))
}

pub(crate) fn ratio_unchecked(v: WaveVector, p: &LatticeParams) -> f64 {
    let w = v.primitive();
    w.n3() as f64 / w.weighted_norm_sq(p).sqrt()
}

/// Polarity choice `(s_n, s_k, s_m)` multiplying the three frequencies of a
/// triad, serialized as `[s_n, s_k, s_m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i8; 3]", into = "[i8; 3]")]
pub struct SignBranch {
    pub n: i8,
    pub k: i8,
    pub m: i8,
}

impl SignBranch {
    pub fn new(n: i8, k: i8, m: i8) -> Result<Self> {
        Self::try_from([n, k, m]).map_err(Error::Domain)
    }

    /// All eight branches, `s_n = +1` first.
    pub fn all() -> [SignBranch; 8] {
        let mut out = [SignBranch { n: 1, k: 1, m: 1 }; 8];
        let mut idx = 0;
        for n in [1, -1] {
            for k in [1, -1] {
                for m in [1, -1] {
                    out[idx] = SignBranch { n, k, m };
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn flipped(self) -> SignBranch {
        SignBranch {
            n: -self.n,
            k: -self.k,
            m: -self.m,
        }
    }

    fn apply(self, rn: f64, rk: f64, rm: f64) -> f64 {
        self.n as f64 * rn + self.k as f64 * rk + self.m as f64 * rm
    }
}

impl TryFrom<[i8; 3]> for SignBranch {
    type Error = String;
    fn try_from(s: [i8; 3]) -> std::result::Result<Self, String> {
        if s.iter().any(|&x| x != 1 && x != -1) {
            return Err(format!("sign branch entries must be +1 or -1, got {s:?}"));
        }
        Ok(SignBranch {
            n: s[0],
            k: s[1],
            m: s[2],
        })
    }
}

impl From<SignBranch> for [i8; 3] {
    fn from(s: SignBranch) -> [i8; 3] {
        [s.n, s.k, s.m]
    }
}

fn check_noncatalytic(k: WaveVector, m: WaveVector, n: WaveVector) -> Result<()> {
    if k.n3() == 0 || m.n3() == 0 || n.n3() == 0 {
        return Err(Error::Catalytic([k.n3(), m.n3(), n.n3()]));
    }
    Ok(())
}

/// Signed resonance residual `s_n ρ(n) + s_k ρ(k) + s_m ρ(m)` with `n = k + m`.
pub fn residual(k: WaveVector, m: WaveVector, p: &LatticeParams, signs: SignBranch) -> Result<f64> {
    p.validate()?;
    let n = k + m;
    check_noncatalytic(k, m, n)?;
    Ok(signs.apply(ratio_unchecked(n, p), ratio_unchecked(k, p), ratio_unchecked(m, p)))
}

/// Branch with the smallest `|residual|`; among ties the first in
/// [`SignBranch::all`] order wins, so `s_n = +1` always.
fn best_branch(rn: f64, rk: f64, rm: f64) -> (SignBranch, f64) {
    let mut best = (SignBranch { n: 1, k: 1, m: 1 }, f64::INFINITY);
    for s in &SignBranch::all()[..4] {
        let r = s.apply(rn, rk, rm);
        if r.abs() < best.1.abs() {
            best = (*s, r);
        }
    }
    best
}

/// A resonant wavevector triple `n = k + m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Triad {
    pub k: WaveVector,
    pub m: WaveVector,
    pub n: WaveVector,
    pub signs: SignBranch,
    /// Signed curl eigenvalues `(λ_k, λ_m, λ_n)`, `λ_v = s_v sqrt(θ1 v1² + θ2 v2² + θ3 v3²)`.
    pub lambdas: [f64; 3],
    pub residual: f64,
}

impl Triad {
    /// Builds the triad `(k, m, k + m)` on its best sign branch.
    pub fn from_pair(k: WaveVector, m: WaveVector, p: &LatticeParams) -> Result<Triad> {
        p.validate()?;
        let n = k + m;
        check_noncatalytic(k, m, n)?;
        let (signs, residual) =
            best_branch(ratio_unchecked(n, p), ratio_unchecked(k, p), ratio_unchecked(m, p));
        Ok(Triad::with_branch(k, m, p, signs, residual))
    }

    fn with_branch(k: WaveVector, m: WaveVector, p: &LatticeParams, signs: SignBranch, residual: f64) -> Triad {
        let n = k + m;
        let lambdas = [
            signs.k as f64 * k.weighted_norm_sq(p).sqrt(),
            signs.m as f64 * m.weighted_norm_sq(p).sqrt(),
            signs.n as f64 * n.weighted_norm_sq(p).sqrt(),
        ];
        Triad {
            k,
            m,
            n,
            signs,
            lambdas,
            residual,
        }
    }

    pub fn irreducibility_det(&self) -> i128 {
        irreducibility_det(self.k, self.m, self.n)
    }

    fn key(&self) -> [i64; 6] {
        pair_key(self.k, self.m)
    }
}

fn pair_key(k: WaveVector, m: WaveVector) -> [i64; 6] {
    [k.0[0], k.0[1], k.0[2], m.0[0], m.0[1], m.0[2]]
}

/// Lexicographically smallest `(k, m)` over the orbit generated by the eight
/// sign-diagonal reflections and the swap `k ↔ m`, after dividing both
/// vectors by the gcd of all six components.
pub fn canonical_pair(k: WaveVector, m: WaveVector) -> (WaveVector, WaveVector) {
    let g = num_integer::Integer::gcd(&k.content(), &m.content());
    let (k, m) = if g > 1 {
        (WaveVector(k.0.map(|c| c / g)), WaveVector(m.0.map(|c| c / g)))
    } else {
        (k, m)
    };
    let mut best = pair_key(k, m);
    for mask in 0u8..8 {
        let flip = |v: WaveVector| {
            let mut out = v;
            for (c, x) in out.0.iter_mut().enumerate() {
                if mask & (1 << c) != 0 {
                    *x = -*x;
                }
            }
            out
        };
        let (fk, fm) = (flip(k), flip(m));
        best = best.min(pair_key(fk, fm)).min(pair_key(fm, fk));
    }
    (
        WaveVector([best[0], best[1], best[2]]),
        WaveVector([best[3], best[4], best[5]]),
    )
}

/// Deterministic representative of the triad's class under reflections,
/// integer homothety and `k ↔ m`, rebuilt on its best sign branch.
pub fn canonicalize(t: &Triad, p: &LatticeParams) -> Result<Triad> {
    let (k, m) = canonical_pair(t.k, t.m);
    Triad::from_pair(k, m, p)
}

/// Symmetry-reduced list of resonant triads inside a box `|components| ≤ N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriadCatalog {
    pub schema: String,
    pub params: LatticeParams,
    #[serde(rename = "box")]
    pub box_size: i64,
    pub tol: f64,
    pub triads: Vec<Triad>,
}

impl TriadCatalog {
    /// Re-checks every entry: convolution, non-catalyticity, box bounds,
    /// canonical form, recorded residual and tolerance, and pairwise distinctness.
    pub fn validate(&self) -> Result<()> {
        if self.schema != crate::SCHEMA_VERSION {
            return Err(Error::domain(format!("unsupported catalog schema {:?}", self.schema)));
        }
        self.params.validate()?;
        if self.box_size < 1 || !(self.tol > 0.0) {
            return Err(Error::domain("catalog box must be >= 1 and tol > 0"));
        }
        let mut seen = BTreeSet::new();
        for t in &self.triads {
            if t.n != t.k + t.m {
                return Err(Error::domain(format!("triad {} + {} != {}", t.k, t.m, t.n)));
            }
            if [t.k, t.m, t.n].iter().any(|v| v.max_abs() > self.box_size) {
                return Err(Error::domain(format!("triad ({}, {}) outside the box", t.k, t.m)));
            }
            let rebuilt = Triad::from_pair(t.k, t.m, &self.params)?;
            if canonical_pair(t.k, t.m) != (t.k, t.m) {
                return Err(Error::domain(format!("triad ({}, {}) is not canonical", t.k, t.m)));
            }
            if rebuilt != *t {
                return Err(Error::domain(format!("triad ({}, {}) does not match its recomputation", t.k, t.m)));
            }
            if t.residual.abs() > self.tol {
                return Err(Error::domain(format!("triad ({}, {}) residual above tolerance", t.k, t.m)));
            }
            if !seen.insert(t.key()) {
                return Err(Error::domain(format!("duplicate triad ({}, {})", t.k, t.m)));
            }
        }
        Ok(())
    }
}

struct RatioTable {
    n: i64,
    side: i64,
    values: Vec<f64>,
}

impl RatioTable {
    fn new(p: &LatticeParams, n: i64) -> Self {
        let side = 2 * n + 1;
        let mut values = Vec::with_capacity((side * side * side) as usize);
        for a in -n..=n {
            for b in -n..=n {
                for c in -n..=n {
                    let v = WaveVector::new(a, b, c);
                    values.push(if c == 0 { f64::NAN } else { ratio_unchecked(v, p) });
                }
            }
        }
        RatioTable { n, side, values }
    }

    fn get(&self, v: WaveVector) -> f64 {
        let [a, b, c] = v.0.map(|x| x + self.n);
        self.values[((a * self.side + b) * self.side + c) as usize]
    }
}

/// All canonical resonant triads with every component of `k`, `m`, `n = k + m`
/// bounded by `box_size` in absolute value, `k3 m3 n3 ≠ 0`, and best-branch
/// `|residual| ≤ tol`. Entries are sorted by `(k, m)`.
pub fn search_triads(p: &LatticeParams, box_size: i64, tol: f64) -> Result<TriadCatalog> {
    p.validate()?;
    if box_size < 1 {
        return Err(Error::domain(format!("box must be >= 1, got {box_size}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let nb = box_size;
    let table = RatioTable::new(p, nb);
    // Loose prefilter, the final decision is made on the canonical triad.
    let prefilter = tol * (1.0 + 1e-6) + 8.0 * f64::EPSILON;

    // Every class has a primitive member with k3 > 0 inside the box.
    let ks: Vec<WaveVector> = (-nb..=nb)
        .flat_map(|a| (-nb..=nb).flat_map(move |b| (1..=nb).map(move |c| WaveVector::new(a, b, c))))
        .collect();

    let keys: BTreeSet<[i64; 6]> = ks
        .par_iter()
        .flat_map_iter(|&k| {
            let rk = table.get(k);
            let ck = k.content();
            let mut found = Vec::new();
            for a in -nb..=nb {
                let n1 = k.n1() + a;
                if n1.abs() > nb {
                    continue;
                }
                for b in -nb..=nb {
                    let n2 = k.n2() + b;
                    if n2.abs() > nb {
                        continue;
                    }
                    for c in -nb..=nb {
                        let n3 = k.n3() + c;
                        if c == 0 || n3 == 0 || n3.abs() > nb {
                            continue;
                        }
                        let m = WaveVector::new(a, b, c);
                        if num_integer::Integer::gcd(&ck, &m.content()) != 1 {
                            continue;
                        }
                        let (_, r) = best_branch(table.get(WaveVector::new(n1, n2, n3)), rk, table.get(m));
                        if r.abs() <= prefilter {
                            let (ck2, cm2) = canonical_pair(k, m);
                            found.push(pair_key(ck2, cm2));
                        }
                    }
                }
            }
            found
        })
        .collect();

    let mut triads = Vec::with_capacity(keys.len());
    for key in keys {
        let k = WaveVector([key[0], key[1], key[2]]);
        let m = WaveVector([key[3], key[4], key[5]]);
        let t = Triad::from_pair(k, m, p)?;
        if t.residual.abs() <= tol {
            triads.push(t);
        }
    }
    Ok(TriadCatalog {
        schema: crate::SCHEMA_VERSION.to_string(),
        params: *p,
        box_size,
        tol,
        triads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> LatticeParams {
        LatticeParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let p = unit();
        assert_eq!(dispersion_ratio(WaveVector::new(0, 0, 5), &p).unwrap(), 1.0);
        assert_relative_eq!(
            dispersion_ratio(WaveVector::new(1, 1, 1), &p).unwrap(),
            1.0 / 3f64.sqrt(),
            epsilon = 1e-15
        );
        let v = WaveVector::new(2, -3, 5);
        assert_eq!(
            dispersion_ratio(v.scale(7), &p).unwrap(),
            dispersion_ratio(v, &p).unwrap()
        );
        assert!(dispersion_ratio(WaveVector::new(0, 0, 0), &p).is_err());
    }

    #[test]
    fn residual_hand_value() {
        let p = unit();
        let k = WaveVector::new(1, 1, 1);
        let r = residual(k, k, &p, SignBranch::new(-1, 1, 1).unwrap()).unwrap();
        assert_relative_eq!(r, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn residual_rejects_catalytic() {
        let p = unit();
        let err = residual(WaveVector::new(1, 0, 1), WaveVector::new(0, 1, -1), &p, SignBranch::new(1, 1, 1).unwrap());
        assert!(matches!(err, Err(Error::Catalytic(_))));
    }

    #[test]
    fn residual_sigma2_invariant() {
        let p = LatticeParams::new(1.3, 0.7, 2.1).unwrap();
        let (k, m) = (WaveVector::new(1, 2, 3), WaveVector::new(-2, 1, 1));
        for s in SignBranch::all() {
            let a = residual(k, m, &p, s).unwrap();
            let b = residual(super::super::sigma(2, k), super::super::sigma(2, m), &p, s).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sign_branch_rejects_zero() {
        assert!(SignBranch::new(1, 0, 1).is_err());
        let parsed: std::result::Result<SignBranch, _> = serde_json::from_str("[1, 2, -1]");
        assert!(parsed.is_err());
    }

    #[test]
    fn canonicalize_quotients() {
        let p = LatticeParams::new(1.0, 2.0, 0.5).unwrap();
        let t = Triad::from_pair(WaveVector::new(1, -2, 3), WaveVector::new(2, 1, -1), &p).unwrap();
        let c = canonicalize(&t, &p).unwrap();
        assert_eq!(canonicalize(&c, &p).unwrap(), c);
        let scaled = Triad::from_pair(t.k.scale(3), t.m.scale(3), &p).unwrap();
        assert_eq!(canonicalize(&scaled, &p).unwrap(), c);
        let reflected = Triad::from_pair(super::super::sigma(2, t.k), super::super::sigma(2, t.m), &p).unwrap();
        assert_eq!(canonicalize(&reflected, &p).unwrap(), c);
        let swapped = Triad::from_pair(t.m, t.k, &p).unwrap();
        assert_eq!(canonicalize(&swapped, &p).unwrap(), c);
    }

    #[test]
    fn lambdas_carry_branch_signs() {
        let p = unit();
        let t = Triad::from_pair(WaveVector::new(1, 0, 1), WaveVector::new(0, 1, 2), &p).unwrap();
        assert_eq!(t.signs.n, 1);
        assert_relative_eq!(t.lambdas[0].abs(), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(t.lambdas[0].signum() as i8, t.signs.k);
        assert_eq!(t.lambdas[2].signum() as i8, t.signs.n);
    }

    #[test]
    fn search_box_one_matches_enumeration() {
        let p = unit();
        let cat = search_triads(&p, 1, 1e-12).unwrap();
        // Box 1: every pair of {-1,0,1}^3 checked on all eight branches.
        let mut oracle = BTreeSet::new();
        let vs: Vec<WaveVector> = (-1..=1)
            .flat_map(|a| (-1..=1).flat_map(move |b| (-1..=1).map(move |c| WaveVector::new(a, b, c))))
            .collect();
        for &k in &vs {
            for &m in &vs {
                let n = k + m;
                if n.max_abs() > 1 || k.n3() * m.n3() * n.n3() == 0 {
                    continue;
                }
                if SignBranch::all().iter().any(|&s| residual(k, m, &p, s).unwrap().abs() <= 1e-12) {
                    oracle.insert(canonical_pair(k, m));
                }
            }
        }
        let got: BTreeSet<_> = cat.triads.iter().map(|t| (t.k, t.m)).collect();
        assert_eq!(got, oracle);
        cat.validate().unwrap();
    }

    #[test]
    fn search_rejects_bad_arguments() {
        let p = unit();
        assert!(search_triads(&p, 0, 1e-12).is_err());
        assert!(search_triads(&p, 2, 0.0).is_err());
    }
}
