//! Geometric-gauge toolkit for localized one-photon states.
//!
//! Everything is generic over the scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`.

pub mod gauge;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod specfun;
pub mod synthesis;

pub use scalar::{Cplx, Real};

pub type Gauge = gauge::GaugeSpec<f64>;
pub type Grid = operators::MomentumGrid<f64>;
pub type Wavefunction = operators::VectorWavefunction<f64>;
pub type StateSpec = synthesis::LocalizedStateSpec<f64>;
pub type Spectrum = synthesis::RadialSpectrum<f64>;
pub type Weight = synthesis::AngularWeight<f64>;
pub type Field = synthesis::PositionField<f64>;
