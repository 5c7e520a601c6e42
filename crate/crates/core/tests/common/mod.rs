//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's search, canonicalization, quadrature or decomposition code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_integer::Integer;
use rand::Rng;

pub type Pair = ([i64; 3], [i64; 3]);

/// `v3 / sqrt(θ·v²)` evaluated on the raw integer vector.
pub fn naive_ratio(v: [i64; 3], theta: [f64; 3]) -> f64 {
    let w: f64 = (0..3).map(|i| theta[i] * (v[i] * v[i]) as f64).sum();
    v[2] as f64 / w.sqrt()
}

fn gcd3(v: [i64; 3]) -> i64 {
    v[0].gcd(&v[1]).gcd(&v[2])
}

/// Smallest `(k, m)` (as a 6-tuple) over the 8 reflections and the swap,
/// after removing the common divisor.
pub fn oracle_canonical(k: [i64; 3], m: [i64; 3]) -> Pair {
    let g = gcd3(k).gcd(&gcd3(m)).max(1);
    let (k, m) = (k.map(|c| c / g), m.map(|c| c / g));
    let mut best: Option<Pair> = None;
    for sx in [1, -1] {
        for sy in [1, -1] {
            for sz in [1, -1] {
                let f = |v: [i64; 3]| [sx * v[0], sy * v[1], sz * v[2]];
                for cand in [(f(k), f(m)), (f(m), f(k))] {
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    best.unwrap()
}

/// Every pair `(k, m)` with `k, m, k + m` in the box, nonzero vertical
/// components, and some of the 8 sign branches within `tol`, reduced to
/// canonical representatives.
pub fn brute_force_catalog(theta: [f64; 3], box_size: i64, tol: f64) -> BTreeSet<Pair> {
    let side = (2 * box_size + 1) as usize;
    let idx = |v: [i64; 3]| {
        ((v[0] + box_size) as usize * side + (v[1] + box_size) as usize) * side + (v[2] + box_size) as usize
    };
    let mut vs = Vec::with_capacity(side * side * side);
    let mut ratio = vec![0.0; side * side * side];
    for a in -box_size..=box_size {
        for b in -box_size..=box_size {
            for c in -box_size..=box_size {
                let v = [a, b, c];
                vs.push(v);
                if c != 0 {
                    ratio[idx(v)] = naive_ratio(v, theta);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for &k in &vs {
        if k[2] == 0 {
            continue;
        }
        for &m in &vs {
            if m[2] == 0 {
                continue;
            }
            let n = [k[0] + m[0], k[1] + m[1], k[2] + m[2]];
            if n[2] == 0 || n.iter().any(|c| c.abs() > box_size) {
                continue;
            }
            let (rk, rm, rn) = (ratio[idx(k)], ratio[idx(m)], ratio[idx(n)]);
            let mut hit = false;
            for sn in [1.0, -1.0] {
                for sk in [1.0, -1.0] {
                    for sm in [1.0, -1.0] {
                        if (sn * rn + sk * rk + sm * rm).abs() <= tol {
                            hit = true;
                        }
                    }
                }
            }
            if hit {
                out.insert(oracle_canonical(k, m));
            }
        }
    }
    out
}

/// Radical relation `min over branches |s_n ρ(n) + s_k ρ(k) + s_m ρ(m)|` at `θ`.
pub fn radical_residual(k: [i64; 3], m: [i64; 3], theta: [f64; 3]) -> f64 {
    let n = [k[0] + m[0], k[1] + m[1], k[2] + m[2]];
    let (rk, rm, rn) = (naive_ratio(k, theta), naive_ratio(m, theta), naive_ratio(n, theta));
    let mut best = f64::INFINITY;
    for sk in [1.0, -1.0] {
        for sm in [1.0, -1.0] {
            best = best.min((rn + sk * rk + sm * rm).abs());
        }
    }
    best
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
    }
    0.5 * (a + b)
}

/// `∫_{x₀}^{x₊} dx / √((x − x₋)(x − x₀)(x₊ − x)) = π / (AGM(1, √(1−m)) √(x₊ − x₋))`
/// with `m = (x₊ − x₀)/(x₊ − x₋)`.
pub fn agm_period_integral(x_minus: f64, x_zero: f64, x_plus: f64) -> f64 {
    let span = x_plus - x_minus;
    let m = (x_plus - x_zero) / span;
    std::f64::consts::PI / (agm(1.0, (1.0 - m).sqrt()) * span.sqrt())
}

/// A synthetic degenerate pair: primitive data `(a, a′, b, b′, k̄, m̄)` obeying
/// the gcd conditions, assembled into `k = a k̄`, `m = b m̄`.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticPair {
    pub k: [i64; 3],
    pub m: [i64; 3],
    pub i: usize,
    pub j: usize,
    pub a: i64,
    pub a_prime: i64,
    pub b: i64,
    pub b_prime: i64,
    pub kbar: [i64; 3],
    pub mbar: [i64; 3],
}

fn coprime_pair<R: Rng>(rng: &mut R) -> (i64, i64) {
    loop {
        let a: i64 = rng.gen_range(1..=9);
        let ap: i64 = rng.gen_range(-9..=9);
        if ap == 0 || ap.abs() == a || a.gcd(&ap) != 1 {
            continue;
        }
        return (a, ap);
    }
}

/// Samples until every condition holds: coprimality of `(a,a′)`, `(b,b′)`,
/// `(a,b)`, `(a′,b′)` and of `(k̄, m̄)`, and nonzero vertical components.
pub fn synthetic_degenerate_pair<R: Rng>(rng: &mut R) -> SyntheticPair {
    loop {
        let (i, j) = match rng.gen_range(0..6) {
            0 => (1, 2),
            1 => (2, 1),
            2 => (1, 3),
            3 => (3, 1),
            4 => (2, 3),
            _ => (3, 2),
        };
        let l = 6 - i - j;
        let (a, ap) = coprime_pair(rng);
        let (b, bp) = coprime_pair(rng);
        if a.gcd(&b) != 1 || ap.gcd(&bp) != 1 {
            continue;
        }
        // Componentwise: c_k k̄ + c_m m̄ = 0 with the coefficients below.
        let coef = [(i, a + ap, b - bp), (j, a - ap, b + bp), (l, a - ap, b - bp)];
        let mut kbar = [0i64; 3];
        let mut mbar = [0i64; 3];
        let mut ok = true;
        for (c, ck, cm) in coef {
            let s: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            if ck == 0 && cm == 0 {
                ok = false;
                break;
            }
            let g = ck.gcd(&cm).max(1);
            kbar[c - 1] = s * cm / g;
            mbar[c - 1] = -s * ck / g;
        }
        if !ok {
            continue;
        }
        if gcd3(kbar).gcd(&gcd3(mbar)) != 1 {
            continue;
        }
        let k = kbar.map(|x| a * x);
        let m = mbar.map(|x| b * x);
        let n2 = k[2] + m[2];
        if k[2] == 0 || m[2] == 0 || n2 == 0 {
            continue;
        }
        return SyntheticPair {
            k,
            m,
            i,
            j,
            a,
            a_prime: ap,
            b,
            b_prime: bp,
            kbar,
            mbar,
        };
    }
}

/// Central-difference derivative.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
