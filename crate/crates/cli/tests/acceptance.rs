//! One test per acceptance criterion at the default configuration. Each
//! prints its pass/fail line with the measured values and tolerances.

use photon_gauge_kit::commands::verify::criterion;
use photon_gauge_kit::RunConfig;

fn check(id: usize) {
    let c = criterion(id, &RunConfig::default());
    println!("{c}");
    assert!(c.passed(), "{c}");
}

#[test]
fn criterion_01_basis_expectations() {
    check(1);
}

#[test]
fn criterion_02_triad_identities() {
    check(2);
}

#[test]
fn criterion_03_dirac_string_flux() {
    check(3);
}

#[test]
fn criterion_04_monopole_law() {
    check(4);
}

#[test]
fn criterion_05_commuting_components() {
    check(5);
}

#[test]
fn criterion_06_position_eigenrelation() {
    check(6);
}

#[test]
fn criterion_07_gauge_covariance() {
    check(7);
}

#[test]
fn criterion_08_jz_compatibility() {
    check(8);
}

#[test]
fn criterion_09_coefficient_selectivity() {
    check(9);
}

#[test]
fn criterion_10_radial_transform_oracle() {
    check(10);
}

#[test]
fn criterion_11_vortex_winding() {
    check(11);
}

#[test]
fn criterion_12_field_gauge_invariance() {
    check(12);
}

#[test]
fn criterion_13_determinism() {
    check(13);
}
