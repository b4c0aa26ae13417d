//! Helicity triads under a geometric gauge `χ(θ, φ)`, the momentum-space
//! gauge potential it generates, and the Dirac-string / monopole structure
//! of that potential.
//!
//! Units are `ħ = c = 1`. The potential is
//! `a = [cot θ φ̂ + ∇_Ω χ] / p`, whose curl off the strings is the monopole
//! field `-p̂/p²`.

mod basis;
mod potential;
mod table;

pub use basis::{
    basis_expectations, gauge_transform_phase, helicity_vector, inner, p_dot_s, sz_lz_decomposition, triad,
    AngularMomentumDecomposition, BasisExpectations, DecompositionRow, HelicityTriad,
};
pub use potential::{
    gauge_gradient, gauge_potential, monopole_curl_check, spin_axis, string_flux, total_string_flux,
    GaugePotentialSample, MonopoleCheck, Pole,
};
pub use table::GaugeTable;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum GaugeError {
    #[error("θ = {theta} lies within the string exclusion zone ε = {exclusion} of the z axis")]
    StringProximity { theta: f64, exclusion: f64 },
    #[error("invalid gauge table: {0}")]
    Table(String),
    #[error("cannot parse gauge `{0}` (expected `zero`, `linear:M` or `table:PATH`)")]
    Parse(String),
    #[error("operation requires a Zero or LinearM gauge")]
    Unsupported,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Default half-angle of the cone around ±ẑ where the potential is not
/// evaluated.
pub const DEFAULT_STRING_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum GaugeKind<T> {
    /// `χ ≡ 0`.
    Zero,
    /// `χ = -m φ`.
    LinearM(i32),
    /// Periodic `χ(θ, φ)` sampled on a grid.
    Tabulated(Arc<GaugeTable<T>>),
}

#[derive(Debug, Clone)]
pub struct GaugeSpec<T> {
    pub kind: GaugeKind<T>,
    pub description: String,
    pub string_exclusion: T,
}

impl<T: Real> GaugeSpec<T> {
    pub fn zero() -> Self {
        Self {
            kind: GaugeKind::Zero,
            description: "zero".into(),
            string_exclusion: T::lit(DEFAULT_STRING_EXCLUSION),
        }
    }

    pub fn linear(m: i32) -> Self {
        Self {
            kind: GaugeKind::LinearM(m),
            description: format!("linear:{m}"),
            string_exclusion: T::lit(DEFAULT_STRING_EXCLUSION),
        }
    }

    pub fn tabulated(table: GaugeTable<T>, description: impl Into<String>) -> Self {
        Self {
            kind: GaugeKind::Tabulated(Arc::new(table)),
            description: description.into(),
            string_exclusion: T::lit(DEFAULT_STRING_EXCLUSION),
        }
    }

    pub fn with_exclusion(mut self, eps: T) -> Self {
        self.string_exclusion = eps;
        self
    }

    /// Parses `zero`, `linear:M` or `table:PATH`.
    pub fn parse(text: &str) -> Result<Self, GaugeError> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("zero") {
            return Ok(Self::zero());
        }
        if let Some(m) = text.strip_prefix("linear:") {
            let m: i32 = m.trim().parse().map_err(|_| GaugeError::Parse(text.into()))?;
            return Ok(Self::linear(m));
        }
        if let Some(path) = text.strip_prefix("table:") {
            let table = GaugeTable::read_csv_path(Path::new(path.trim()))?;
            return Ok(Self::tabulated(table, text));
        }
        Err(GaugeError::Parse(text.into()))
    }

    /// `m` for the linear family (0 for the zero gauge).
    pub fn linear_m(&self) -> Option<i32> {
        match self.kind {
            GaugeKind::Zero => Some(0),
            GaugeKind::LinearM(m) => Some(m),
            GaugeKind::Tabulated(_) => None,
        }
    }

    pub fn chi(&self, theta: T, phi: T) -> T {
        match &self.kind {
            GaugeKind::Zero => T::zero(),
            GaugeKind::LinearM(m) => -T::from_int(*m as i64) * phi,
            GaugeKind::Tabulated(t) => t.chi(theta, phi),
        }
    }

    /// `(∂χ/∂θ, ∂χ/∂φ)`.
    pub fn chi_derivatives(&self, theta: T, phi: T) -> (T, T) {
        match &self.kind {
            GaugeKind::Zero => (T::zero(), T::zero()),
            GaugeKind::LinearM(m) => (T::zero(), -T::from_int(*m as i64)),
            GaugeKind::Tabulated(t) => t.derivatives(theta, phi),
        }
    }

    /// Errors when `θ` is within the exclusion cone of either pole.
    pub fn check_off_string(&self, theta: T) -> Result<(), GaugeError> {
        if theta < self.string_exclusion || theta > T::PI() - self.string_exclusion {
            return Err(GaugeError::StringProximity {
                theta: theta.as_f64(),
                exclusion: self.string_exclusion.as_f64(),
            });
        }
        Ok(())
    }
}

impl<T> fmt::Display for GaugeSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

/// Cartesian `(p̂, θ̂, φ̂)` at `(θ, φ)`.
pub fn spherical_unit_vectors<T: Real>(theta: T, phi: T) -> [[T; 3]; 3] {
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    [[st * cf, st * sf, ct], [ct * cf, ct * sf, -st], [-sf, cf, T::zero()]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert!(matches!(GaugeSpec::<f64>::parse("zero").unwrap().kind, GaugeKind::Zero));
        assert!(matches!(GaugeSpec::<f64>::parse("linear:-2").unwrap().kind, GaugeKind::LinearM(-2)));
        assert!(GaugeSpec::<f64>::parse("linear:x").is_err());
        assert!(GaugeSpec::<f64>::parse("helical").is_err());
    }

    #[test]
    fn exclusion_zone() {
        let g = GaugeSpec::<f64>::zero();
        assert!(g.check_off_string(1e-7).is_err());
        assert!(g.check_off_string(std::f64::consts::PI - 1e-7).is_err());
        assert!(g.check_off_string(1e-3).is_ok());
        assert!(g.clone().with_exclusion(1e-2).check_off_string(1e-3).is_err());
    }

    #[test]
    fn unit_vectors_right_handed() {
        let [p, t, f] = spherical_unit_vectors(0.7f64, 2.3);
        let cross = [t[1] * f[2] - t[2] * f[1], t[2] * f[0] - t[0] * f[2], t[0] * f[1] - t[1] * f[0]];
        for k in 0..3 {
            assert!((cross[k] - p[k]).abs() < 1e-15);
        }
    }
}
