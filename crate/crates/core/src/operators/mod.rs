//! Discrete momentum-space wavefunctions and the photon position operator
//! family: the Pryce operator `r_P`, the commuting-component operator
//! `r^(χ) = r_P - a^(χ) (p̂·S)`, total angular momentum `J = L + S` and the
//! gauge-split `L^(χ)`, `S^(χ)`.
//!
//! Derivatives are spectral in `φ`, local polynomial in `θ` (on the
//! Gauss–Legendre nodes) and finite-difference in `p`. Inner products use the
//! measure `p^{-2α} d³p`, under which `r_P` is Hermitian for a wavefunction
//! tagged with exponent `α`.

mod apply;
mod checks;
mod grid;
mod wavefunction;

pub use apply::{
    apply_j, apply_l_chi, apply_position, apply_position_all, apply_pryce, apply_s_chi, gradient_p, GaugeFields,
};
pub use checks::{
    commutator_j_r, commutator_r_r, eigenrelation, gauge_consistency_check, gauge_covariance_check,
    helicity_leakage, hermiticity_defect, jz_gauge_term, uncertainty_check, with_order, JrCommutator,
    OperatorReport, UncertaintyReport,
};
pub use grid::{GridSpec, MomentumGrid, PSpacing};
pub use wavefunction::{basis_state, test_state, translated_basis_state, TestState, VectorWavefunction};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauge::GaugeError;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("grid resolution: {0}")]
    Resolution(String),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error("wavefunction format: {0}")]
    Format(String),
    #[error("wavefunctions live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cartesian component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Self::ALL[i % 3]
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

/// Levi-Civita symbol.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}
