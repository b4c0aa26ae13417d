pub mod basis;
pub mod field;
pub mod gauge;
pub mod operators;
pub mod verify;

use anyhow::{Context, Result};
use photon_gauge_core::gauge::GaugeSpec;
use photon_gauge_core::synthesis::{AngularWeight, HelicitySelection, LocalizedStateSpec, RadialSpectrum};
use photon_gauge_core::Gauge;

use crate::config::{AngularKind, FieldConfig, Helicity, SpectrumKind};

pub(crate) fn parse_gauge(text: &str) -> Result<Gauge> {
    GaugeSpec::parse(text).with_context(|| format!("gauge `{text}`"))
}

/// The momentum-space state described by the `[field]` block.
pub fn state_spec(f: &FieldConfig) -> Result<LocalizedStateSpec<f64>> {
    let radial = match f.spectrum {
        SpectrumKind::Exponential => RadialSpectrum::Exponential { p0: f.p0 },
        SpectrumKind::PowerLaw => RadialSpectrum::PowerLawCutoff { alpha: f.alpha, p0: f.p0 },
    };
    let angular = match f.angular {
        AngularKind::One => AngularWeight::One,
        AngularKind::SinTheta => AngularWeight::SinTheta,
        AngularKind::SinPower => AngularWeight::SinPower(f.power.unwrap_or(f.m.unsigned_abs() + 3)),
    };
    let helicity = match f.helicity {
        Helicity::Plus => HelicitySelection::Plus,
        Helicity::Minus => HelicitySelection::Minus,
        Helicity::Both => HelicitySelection::Both,
    };
    let mut spec = LocalizedStateSpec::new(f.m, helicity, radial, angular).with_gauge(parse_gauge(&f.gauge)?, f.compensate);
    spec.l_max = f.l_max;
    Ok(spec)
}

/// `n` points from `a` to `b` inclusive.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Least-squares slope of `ln e` against `ln(1/h)` over successive halvings.
pub(crate) fn halving_order(errors: &[f64]) -> f64 {
    let n = errors.len() as f64;
    let xs: Vec<f64> = (0..errors.len()).map(|i| i as f64 * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}
