use std::sync::Arc;

use photon_gauge_core::gauge::GaugeSpec;
use photon_gauge_core::operators::{apply_j, Axis, GridSpec, MomentumGrid};
use photon_gauge_core::synthesis::{
    angular_coefficients, momentum_wavefunction, synthesize_field, AngularWeight, FieldGrid, HelicitySelection,
    LocalizedStateSpec, RadialSpectrum,
};
use photon_gauge_core::{Spectrum, StateSpec, Weight};

fn state(m: i32, g: Weight) -> StateSpec {
    LocalizedStateSpec::new(m, HelicitySelection::Plus, Spectrum::PowerLawCutoff { alpha: 0.5, p0: 1.5 }, g)
}

#[test]
fn momentum_and_position_jz_agree() {
    let grid = Arc::new(MomentumGrid::new(GridSpec::COARSE).unwrap());
    for m in [0, 1, 2] {
        let spec = state(m, AngularWeight::SinPower(m as u32 + 1));
        for gauge in [GaugeSpec::linear(m), GaugeSpec::zero()] {
            let s = spec.clone().with_gauge(gauge, true);
            let psi = momentum_wavefunction(&s, 1, grid.clone(), 0.5);
            let jz = psi.inner(&apply_j(&psi, Axis::Z)) / psi.inner(&psi);
            assert!((jz.re - m as f64).abs() < 1e-10, "m={m}: {jz}");
        }
        let field = synthesize_field(&spec, &FieldGrid::uniform(4.0, 6, 7, 16).unwrap(), 0.0).unwrap();
        for mu in [-1, 0, 1] {
            assert_eq!(field.azimuthal_purity(mu).0, m - mu);
        }
    }
}

#[test]
fn field_norm_is_stable_under_larger_expansions() {
    let grid = FieldGrid::uniform(5.0, 9, 9, 12).unwrap();
    let spec = state(1, AngularWeight::SinPower(2));
    let base = synthesize_field(&spec, &grid, 0.3).unwrap();
    let more = synthesize_field(&spec.clone().with_l_max(2 * base.l_max), &grid, 0.3).unwrap();
    let change = (more.l2_norm() - base.l2_norm()).abs() / base.l2_norm();
    assert!(change < 1e-6, "{change:e}");
}

#[test]
fn helicity_minus_uses_conjugate_azimuthal_index() {
    let spec = LocalizedStateSpec::new(1, HelicitySelection::Minus, Spectrum::Exponential { p0: 1.0 }, Weight::SinPower(2));
    for mu in [-1, 0, 1] {
        let c = angular_coefficients(&spec, -1, mu, 20).unwrap();
        assert_eq!(c.n, -1 - mu);
        assert!(c.accepted);
    }
}

#[test]
fn single_precision_pipeline_runs() {
    let spec = LocalizedStateSpec::<f32>::new(0, HelicitySelection::Plus, RadialSpectrum::Exponential { p0: 1.0 }, AngularWeight::SinTheta)
        .with_l_max(8);
    let grid = FieldGrid::<f32>::uniform(3.0, 4, 5, 8).unwrap();
    let f = synthesize_field(&spec, &grid, 0.0).unwrap();
    assert!((f.peak() - 1.0).abs() < 1e-5);
    assert!(f.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
}
