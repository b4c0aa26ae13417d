use std::io::BufReader;
use std::sync::Arc;

use photon_gauge_core::gauge::GaugeSpec;
use photon_gauge_core::operators::{
    apply_j, basis_state, eigenrelation, hermiticity_defect, test_state, Axis, GridSpec, MomentumGrid, TestState,
    VectorWavefunction,
};
use photon_gauge_core::Grid;

fn coarse() -> Arc<Grid> {
    Arc::new(MomentumGrid::new(GridSpec::COARSE).unwrap())
}

#[test]
fn text_format_round_trip() {
    let g = coarse();
    let psi = test_state(g, &TestState::default(), &GaugeSpec::linear(1), 0.5);
    let mut buf = Vec::new();
    psi.write_text(&mut buf).unwrap();
    let back = VectorWavefunction::<f64>::read_text(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back.alpha, 0.5);
    assert_eq!(back.grid.spec, psi.grid.spec);
    assert!(back.sub(&psi).max_abs() == 0.0);
}

#[test]
fn basis_states_are_position_eigenvectors_on_the_coarse_grid() {
    for alpha in [0.5, -0.5] {
        for gauge in [GaugeSpec::zero(), GaugeSpec::linear(1)] {
            let psi = basis_state(coarse(), 1, &gauge, alpha);
            let rep = eigenrelation(&psi, &gauge).unwrap();
            assert!(rep.relative() < 1e-5, "{}: {:e}", rep.name, rep.relative());
        }
    }
}

#[test]
fn position_is_hermitian_on_transverse_states() {
    let g = Arc::new(MomentumGrid::new(GridSpec::FINE).unwrap());
    let gauge = GaugeSpec::linear(-1);
    let a = test_state(g.clone(), &TestState::default(), &gauge, 0.5);
    let b = test_state(g, &TestState { centre: 3.3, tilt: -0.2, ..TestState::default() }, &gauge, 0.5);
    for axis in Axis::ALL {
        let d = hermiticity_defect(&a, &b, &gauge, axis).unwrap();
        assert!(d < 1e-6, "{axis:?}: {d:e}");
    }
}

#[test]
fn linear_gauge_basis_states_have_sharp_jz() {
    for m in -2..=2 {
        let psi = basis_state(coarse(), 1, &GaugeSpec::linear(m), 0.5);
        let jz = psi.inner(&apply_j(&psi, Axis::Z)) / psi.inner(&psi);
        assert!((jz.re - m as f64).abs() < 1e-10 && jz.im.abs() < 1e-10, "m={m}: {jz}");
    }
}
