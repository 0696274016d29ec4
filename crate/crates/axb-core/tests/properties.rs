//! Structural invariants checked over random inputs: group algebra,
//! radiality, transform symmetries, exact-table parity at floating point,
//! and fit recovery.

use num_complex::Complex64;
use proptest::prelude::*;

use axb_core::campaigns::fit_power_law;
use axb_core::geometry::{distance_between, GroupPoint};
use axb_core::plancherel::rho_closed;
use axb_core::qkl::cached_table;
use axb_core::quadrature::{inverse_fourier_mk, Psi};

fn point_strategy(n: usize) -> impl Strategy<Value = GroupPoint> {
    (
        -2.0f64..2.0,
        prop::collection::vec(-3.0f64..3.0, n),
    )
        .prop_map(|(x, y)| GroupPoint::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_product_is_associative(
        p in point_strategy(2),
        q in point_strategy(2),
        r in point_strategy(2),
    ) {
        let a = p.multiply(&q).unwrap().multiply(&r).unwrap();
        let b = p.multiply(&q.multiply(&r).unwrap()).unwrap();
        prop_assert!((a.x - b.x).abs() <= 1e-12 * (1.0 + a.x.abs()));
        for (u, v) in a.y.iter().zip(&b.y) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn modular_function_is_a_homomorphism(
        p in point_strategy(3),
        q in point_strategy(3),
    ) {
        let lhs = p.multiply(&q).unwrap().modular();
        let rhs = p.modular() * q.modular();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
    }

    #[test]
    fn inverse_cancels_to_identity(p in point_strategy(2)) {
        let e = p.multiply(&p.inverse()).unwrap();
        prop_assert!(e.x.abs() <= 1e-12);
        for v in &e.y {
            prop_assert!(v.abs() <= 1e-9);
        }
        // d(p, p) = 0 through the same algebra.
        prop_assert!(distance_between(&p, &p).unwrap() <= 1e-7);
    }

    #[test]
    fn distance_is_rotation_invariant(
        x in -2.0f64..2.0,
        a in 0.1f64..3.0,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let p = GroupPoint::new(x, vec![a, 0.0]);
        let q = GroupPoint::new(x, vec![a * theta.cos(), a * theta.sin()]);
        let (dp, dq) = (p.distance(), q.distance());
        prop_assert!((dp - dq).abs() <= 1e-12 * (1.0 + dp));
    }

    #[test]
    fn density_is_positive_and_increasing(
        n in 1u32..=6,
        u in 1e-6f64..1e5,
        factor in 1.1f64..10.0,
    ) {
        let lo = rho_closed(n, u).unwrap();
        let hi = rho_closed(n, u * factor).unwrap();
        prop_assert!(lo > 0.0);
        // n = 1 saturates at th(π√u) = 1 in f64, so only non-strict holds.
        prop_assert!(hi >= lo);
    }

    #[test]
    fn derivative_expansion_is_purely_imaginary(
        l in 0usize..=4,
        u in 0.1f64..8.0,
        v in 0.05f64..5.0,
    ) {
        // Σ_k q_{k,l}(v)(u^k e^{iuv} − (−u)^k e^{−iuv}) = 2i·D^l sin(uv) ∈ iℝ.
        let table = cached_table(l).unwrap();
        let d = table.eval_d(u, v);
        prop_assert!(
            d.re.abs() <= 1e-7 * d.norm().max(1e-8),
            "l={} u={} v={}: {:?}", l, u, v, d
        );
    }

    #[test]
    fn derivative_expansion_base_case(u in 0.1f64..8.0, v in 0.05f64..5.0) {
        // l = 0: the expansion is exactly 2i sin(uv).
        let table = cached_table(0).unwrap();
        let want = Complex64::new(0.0, 2.0 * (u * v).sin());
        let got = table.eval_d(u, v);
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()));
    }

    #[test]
    fn fit_recovers_planted_power_law(
        expo in -3.0f64..3.0,
        lnc in -2.0f64..2.0,
        wiggle in prop::collection::vec(-1e-6f64..1e-6, 6),
    ) {
        let c = lnc.exp();
        let samples: Vec<(f64, f64)> = wiggle
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let x = 2f64.powi(i as i32);
                (x, c * x.powf(expo) * (1.0 + w))
            })
            .collect();
        let fit = fit_power_law(&samples).unwrap();
        prop_assert!((fit.exponent - expo).abs() <= 1e-4);
        prop_assert!((fit.prefactor - c).abs() <= 1e-3 * c);
        prop_assert!(fit.residual <= 1e-5);
    }
}

proptest! {
    // Each case integrates a transform; keep the count modest.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_conjugates_under_reflection(
        power in 0u32..=3,
        xi in 0.2f64..30.0,
        alpha in 4.0f64..6.0,
    ) {
        let psi = Psi::RationalDecay { alpha };
        let plus = inverse_fourier_mk(&psi, power, xi).unwrap();
        let minus = inverse_fourier_mk(&psi, power, -xi).unwrap();
        let diff = (minus - plus.conj()).norm();
        prop_assert!(
            diff <= 1e-8 * plus.norm().max(1e-10),
            "power={} xi={}: {:?} vs conj {:?}", power, xi, minus, plus
        );
    }
}

/// Radiality at the kernel level: same (x, R), different direction.
#[test]
fn wave_kernel_is_radial() {
    use axb_core::kernel::{WaveContext, WaveKind};
    let psi = Psi::RationalDecay { alpha: 5.0 };
    let ctx = WaveContext::new(WaveKind::Cos, &psi, 2, 3.0, 4.0).unwrap();
    let p = GroupPoint::new(0.4, vec![1.1, 0.0]);
    let q = GroupPoint::new(0.4, vec![0.0, -1.1]);
    assert_eq!(p.distance(), q.distance());
    let (a, b) = (ctx.kernel_at(&p).unwrap(), ctx.kernel_at(&q).unwrap());
    assert!((a - b).norm() <= 1e-10 * a.norm());
}
