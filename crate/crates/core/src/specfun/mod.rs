//! Special-function kernel: associated Legendre functions, spherical
//! harmonics, spherical Bessel functions and spin-1 rotation matrices.
//!
//! Conventions used throughout the crate:
//!
//! * Spherical harmonics are orthonormal on the unit sphere and carry the
//!   Condon–Shortley phase, so `Y_l^{-n} = (-1)^n (Y_l^n)^*`.
//! * Three-component vectors are stored in the spherical `μ` representation
//!   with rows ordered `μ = -1, 0, +1`. Component `μ` is the projection onto
//!   `u_{-1} = (x̂ - iŷ)/√2`, `u_0 = ẑ`, `u_{+1} = (x̂ + iŷ)/√2`, which are
//!   eigenvectors of `S_z` with eigenvalue `μ`.

mod bessel;
mod harmonics;
mod legendre;
mod spin;

pub use bessel::{sph_bessel, sph_bessel_sequence};
pub use harmonics::{normalized_legendre_column, sph_harm, sph_harm_theta, SphericalHarmonicIndex};
pub use legendre::assoc_legendre;
pub use spin::{
    cartesian_to_spherical, mu_index, rotation_matrix, spherical_to_cartesian, spin_matrices,
    EulerAngles, Mat3, RotationMatrix, Spin1Matrix, Vec3c, MU_VALUES,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("invalid harmonic index: |n| = {n} exceeds l = {l}")]
    InvalidIndex { l: i64, n: i64 },
    #[error("argument x = {0} outside [-1, 1]")]
    OutOfDomain(f64),
}
