use num_complex::Complex64;
use photon_gauge_core::gauge::{basis_expectations, gauge_transform_phase, triad, GaugeSpec};
use photon_gauge_core::specfun::{rotation_matrix, sph_bessel, Mat3};
use photon_gauge_core::synthesis::{RadialPlan, RadialSpectrum};
use proptest::prelude::*;
use std::f64::consts::PI;

fn polar() -> impl Strategy<Value = f64> {
    0.01..(PI - 0.01)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_are_special_unitary(phi in 0.0..2.0 * PI, theta in 0.0..PI, chi in -PI..PI) {
        let d = rotation_matrix(phi, theta, chi).matrix;
        prop_assert!((d * d.adjoint()).max_abs_diff(&Mat3::identity()) < 1e-13);
        prop_assert!((d.det() - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn third_angle_is_a_diagonal_phase(phi in 0.0..2.0 * PI, theta in 0.0..PI, chi in -PI..PI) {
        let full = rotation_matrix(phi, theta, chi).matrix;
        let phase = Mat3::diag([Complex64::from_polar(1.0, chi), Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -chi)]);
        let split = rotation_matrix(phi, theta, 0.0).matrix * phase;
        prop_assert!(full.max_abs_diff(&split) < 1e-13);
    }

    #[test]
    fn triads_stay_orthonormal_helicity_eigenvectors(theta in polar(), phi in 0.0..2.0 * PI, m in -3i32..=3) {
        let t = triad(theta, phi, &GaugeSpec::linear(m));
        prop_assert!(t.orthonormality_error() < 1e-13);
        prop_assert!(t.helicity_error() < 1e-13);
    }

    #[test]
    fn spin_and_orbital_parts_add_to_jz(theta in 0.0..PI, m in -3i32..=3, plus in any::<bool>()) {
        let lambda = if plus { 1 } else { -1 };
        let e = basis_expectations(m, lambda, theta);
        prop_assert!((e.s_z + e.l_z - e.j_z).abs() < 1e-12);
        prop_assert!((e.j_z - (lambda * m) as f64).abs() < 1e-15);
    }

    #[test]
    fn gauge_phases_compose(theta in polar(), phi in 0.0..2.0 * PI, a in -2i32..=2, b in -2i32..=2) {
        let (ga, gb, z) = (GaugeSpec::linear(a), GaugeSpec::linear(b), GaugeSpec::zero());
        let two = gauge_transform_phase(&z, &ga, 1, theta, phi) * gauge_transform_phase(&ga, &gb, 1, theta, phi);
        prop_assert!((two - gauge_transform_phase(&z, &gb, 1, theta, phi)).norm() < 1e-13);
    }

    #[test]
    fn bessel_three_term_recurrence(l in 1u32..40, x in 0.2f64..60.0) {
        let lhs = sph_bessel(l - 1, x) + sph_bessel(l + 1, x);
        let rhs = (2 * l + 1) as f64 / x * sph_bessel(l, x);
        let scale = sph_bessel(l - 1, x).abs().max(sph_bessel(l + 1, x).abs()).max(1e-300);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "l={} x={}: {} vs {}", l, x, lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn radial_transform_scales_with_cutoff(p0 in 0.5f64..3.0, r in 0.0f64..4.0, l in 0u32..4) {
        // R_l(r; p0) = p0³ R_l(p0 r; 1)
        let a = RadialPlan::new(RadialSpectrum::Exponential { p0 }).unwrap().transform(l, r, 0.0).unwrap();
        let b = RadialPlan::new(RadialSpectrum::Exponential { p0: 1.0 }).unwrap().transform(l, p0 * r, 0.0).unwrap();
        prop_assert!((a - b * p0.powi(3)).norm() < 1e-11 * p0.powi(3));
    }
}
