//! Position-space electric fields of localized photon states.
//!
//! A state is specified in momentum space as `f(p) g(θ) e_λ(θ, φ)` in the
//! `LinearM(m)` basis. It may be re-expressed in another gauge, with or
//! without the compensating phase on its coefficient. The field is
//! assembled from the plane-wave expansion as
//! `E_μ = N Σ_{l,n} i^l Y_l^n(ϑ, φ) P_{l,n} R_l(r, t)`, where `P_{l,n}` is
//! the spherical-harmonic projection of the momentum amplitude and `R_l` is
//! the spherical Bessel transform of `p² f(p)`.

mod angular;
mod field;
mod radial;
mod vortex;

use serde::Serialize;
use thiserror::Error;

use crate::gauge::{gauge_transform_phase, helicity_vector, GaugeError, GaugeSpec};
use crate::quadrature::QuadratureError;
use crate::scalar::Real;
use crate::specfun::Vec3c;

pub use angular::{
    angular_coefficients, resolve_coefficients, AngularCoefficients, AngularTable, AngularWeight, CoefficientSet,
    ComponentProjection, ModeProjection, DEFAULT_L_MAX_CAP, TAIL_TOLERANCE,
};
pub use field::{momentum_wavefunction, synthesize_field, FieldGrid, FieldSummary, FieldSynthesizer, PositionField};
pub use radial::{radial_transform, RadialPlan, RadialSpectrum, RadialTable};
pub use vortex::{annular_profile, field_gauge_invariance, on_axis_null, vortex_winding, AnnularProfile};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("invalid state specification: {0}")]
    InvalidSpec(String),
    #[error("angular expansion of component mu={mu} truncated at l_max={l_max}: tail estimate {tail:e}")]
    Truncation { mu: i32, l_max: u32, tail: f64 },
    #[error("radial transform l={l} r={r} t={t} did not converge (error estimate {error:e})")]
    RadialConvergence { l: u32, r: f64, t: f64, error: f64 },
    #[error("field amplitude {min:e} on the contour is below the threshold {threshold:e}")]
    ZeroOnContour { min: f64, threshold: f64 },
    #[error("accumulated phase {0} is not an integer multiple of 2π")]
    NonIntegerWinding(f64),
    #[error("no off-axis intensity maximum: {0}")]
    NoRingFound(String),
    #[error("synthesized field is identically zero")]
    ZeroField,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which helicities the state contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HelicitySelection {
    Plus,
    Minus,
    Both,
}

impl HelicitySelection {
    pub fn lambdas(self) -> &'static [i32] {
        match self {
            Self::Plus => &[1],
            Self::Minus => &[-1],
            Self::Both => &[-1, 1],
        }
    }
}

/// Momentum-space description of a localized state.
#[derive(Debug, Clone)]
pub struct LocalizedStateSpec<T> {
    /// `j_z` quantum number; the state is `f g e_λ` in the `LinearM(m)` basis.
    pub m: i32,
    pub helicity: HelicitySelection,
    pub radial: RadialSpectrum<T>,
    pub angular: AngularWeight<T>,
    /// Basis the amplitude is expressed in before synthesis.
    pub gauge: GaugeSpec<T>,
    /// Multiply the coefficient by the phase that keeps the physical state
    /// fixed when `gauge` differs from `LinearM(m)`.
    pub compensate: bool,
    /// Fixed expansion order; `None` starts at `|m - μ| + 16` and doubles.
    pub l_max: Option<u32>,
}

impl<T: Real> LocalizedStateSpec<T> {
    pub fn new(m: i32, helicity: HelicitySelection, radial: RadialSpectrum<T>, angular: AngularWeight<T>) -> Self {
        Self { m, helicity, radial, angular, gauge: GaugeSpec::linear(m), compensate: true, l_max: None }
    }

    pub fn with_gauge(mut self, gauge: GaugeSpec<T>, compensate: bool) -> Self {
        self.gauge = gauge;
        self.compensate = compensate;
        self
    }

    pub fn with_l_max(mut self, l_max: u32) -> Self {
        self.l_max = Some(l_max);
        self
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        self.radial.validate()?;
        let tail = self.radial.norm_tail(self.radial.cutoff(T::lit(1e-20)));
        if !(tail < T::lit(1e-10)) {
            return Err(SynthesisError::InvalidSpec(format!("radial norm integral tail {tail} exceeds 1e-10")));
        }
        Ok(())
    }

    /// Angular part `g(θ) c(θ, φ) e^(χ)_λ(θ, φ)` of the momentum amplitude.
    pub fn amplitude(&self, lambda: i32, theta: T, phi: T) -> Vec3c<T> {
        let g = self.angular.eval(theta);
        let mut e = helicity_vector(lambda, theta, phi, &self.gauge);
        let c = if self.compensate {
            gauge_transform_phase(&self.gauge, &GaugeSpec::linear(self.m), lambda, theta, phi) * g
        } else {
            crate::scalar::cplx(g, T::zero())
        };
        for v in &mut e {
            *v = *v * c;
        }
        e
    }

    /// Azimuthal index `λm - μ` carried by component `μ` of helicity `λ`.
    pub fn azimuthal_index(&self, lambda: i32, mu: i32) -> i32 {
        lambda * self.m - mu
    }
}
