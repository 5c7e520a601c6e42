mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triadlab::dynamics::*;
use triadlab::invariants::*;

proptest! {
    #[test]
    fn sobolev_sums_grow_with_s(y in [-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0], l in 1.0f64..4.0, n in -4.0f64..-1.0, s in 1.0f64..4.0, ds in 0.0f64..2.0) {
        let sys = System::Real(RealTriad::new(l + 1.5, 1.0 + 0.1 * l, n).unwrap());
        prop_assert!(hs_norm_sq(&sys, &y, s) <= hs_norm_sq(&sys, &y, s + ds) * (1.0 + 1e-15));
        prop_assert_eq!(hs_norm_sq(&sys, &y, 1.0), enstrophy(&sys, &y));
    }

    #[test]
    fn enstrophy_rate_matches_chain_rule(y in [-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0], l in [-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0]) {
        prop_assume!((l[0] - l[1]).abs() > 0.1 && (l[1] - l[2]).abs() > 0.1 && (l[0] - l[2]).abs() > 0.1);
        let b = RealTriad::new(l[0], l[1], l[2]).unwrap();
        let d = b.rhs(y);
        let chain = 2.0 * (l[0] * l[0] * y[0] * d[0] + l[1] * l[1] * y[1] * d[1] + l[2] * l[2] * y[2] * d[2]);
        let coef = l[0] * l[0] * (l[1] - l[2]) + l[1] * l[1] * (l[2] - l[0]) + l[2] * l[2] * (l[0] - l[1]);
        let printed = -2.0 * coef * y[0] * y[1] * y[2];
        let scale = 1.0 + chain.abs();
        prop_assert!((enstrophy_rate(&b, y) - chain).abs() <= 1e-12 * scale);
        prop_assert!((printed - chain).abs() <= 1e-12 * scale);
    }

    #[test]
    fn cone_equation_is_the_zero_level(a in proptest::collection::vec(-2.0f64..2.0, 5)) {
        let c = CoupledTriads::new([1.0, -1.0, 2.0, -2.0, 3.0], 1.0, 1.0).unwrap();
        let (al, at) = (c.alpha(), c.alpha_tilde());
        let e2 = coupled_invariants(&c, &a)[1];
        // a_n² + (1−α̃) a_m̃² = −α a_m²  ⇔  E₂ = 0.
        let lhs = a[2] * a[2] + (1.0 - at) * a[3] * a[3];
        let rhs = -al * a[1] * a[1];
        prop_assert!((e2 - (lhs - rhs)).abs() <= 1e-14 * (1.0 + lhs.abs() + rhs.abs()));
    }

    #[test]
    fn corrected_manley_rowe_is_stationary(u in proptest::collection::vec(-1.0f64..1.0, 6), l in [-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0]) {
        prop_assume!((l[0] - l[1]).abs() > 0.1 && (l[1] - l[2]).abs() > 0.1 && (l[0] - l[2]).abs() > 0.1);
        let sys = ComplexTriad::new(l, 1.0).unwrap();
        let z = unpack_complex(&u);
        let dz = sys.rhs(z);
        let at = |t: f64| {
            let w = [z[0] + dz[0] * t, z[1] + dz[1] * t, z[2] + dz[2] * t];
            manley_rowe(&ComplexTriadState { u_k: w[0], u_m: w[1], u_n: w[2], lambdas: l, c: 1.0 })
        };
        let h = 1e-6;
        prop_assert!(common::central_diff(|t| at(t).phase_invariant, 0.0, h).abs() <= 1e-7);
        prop_assert!(common::central_diff(|t| at(t).e1, 0.0, h).abs() <= 1e-7);
        prop_assert!(common::central_diff(|t| at(t).e2, 0.0, h).abs() <= 1e-7);
    }
}

#[test]
fn vandermonde_inverts_forward_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let l = loop {
            let l: [f64; 3] = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            if (l[0] - l[1]).abs() > 0.2 && (l[1] - l[2]).abs() > 0.2 && (l[0] - l[2]).abs() > 0.2 {
                break l;
            }
        };
        let sys = System::Real(RealTriad::new(l[0], l[1], l[2]).unwrap());
        for _ in 0..1000 {
            let y: [f64; 3] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let r = vandermonde_recover(energy(&sys, &y), helicity(&sys, &y), enstrophy(&sys, &y), l).unwrap();
            let scale = y.iter().map(|v| v * v).sum::<f64>();
            for (got, want) in [r.p2, r.q2, r.r2].iter().zip(y.map(|v| v * v)) {
                worst = worst.max((got - want).abs() / scale);
            }
        }
    }
    // Conditioning of the Vandermonde system bounds the rounding amplification.
    assert!(worst <= 1e-11, "worst relative error {worst}");
}

#[test]
fn printed_manley_rowe_forms_drift_on_a_generic_flow() {
    let l = [2.0, 1.0, -1.0];
    let sys = System::Complex(ComplexTriad::new(l, 1.0).unwrap());
    let y0 = pack_complex([Complex64::new(0.3, 0.5), Complex64::new(-0.7, 0.2), Complex64::new(0.4, -0.6)]);
    let traj = integrate(&sys, &y0, 2.0, 1e-12, 1e-14).unwrap();
    let st = |y: &[f64]| {
        let [u_k, u_m, u_n] = unpack_complex(y);
        ComplexTriadState { u_k, u_m, u_n, lambdas: l, c: 1.0 }
    };
    let (a0, a1) = (manley_rowe(&st(&y0)), manley_rowe(&st(traj.last_state())));
    assert!((a0.e1 - a1.e1).abs() <= 1e-10 && (a0.e2 - a1.e2).abs() <= 1e-10);
    assert!((a0.phase_invariant - a1.phase_invariant).abs() <= 1e-10);
    let (p0, p1) = (manley_rowe_printed(&st(&y0)), manley_rowe_printed(&st(traj.last_state())));
    assert!((p0.e1 - p1.e1).abs() > 1e-3 || (p0.phase_invariant - p1.phase_invariant).abs() > 1e-3);
}

#[test]
fn report_serializes_with_documented_keys() {
    let sys = System::Coupled(CoupledTriads::new([1.0, -1.0, 2.0, -2.0, 3.0], 1.0, 1.0).unwrap());
    let rep = invariant_report(&sys, &[0.1, 0.2, 0.3, 0.4, 0.5], &[1.0, 2.5]).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    for key in ["E", "H", "Xi", "W_s", "E1", "E2", "E3", "alpha", "alphaTilde"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["W_s"].get("2.5").is_some());
    assert!(v.get("manley_rowe").is_none());
}
