use serde::Serialize;

use super::field::{FieldGrid, FieldSynthesizer, PositionField};
use super::{LocalizedStateSpec, SynthesisError};
use crate::scalar::Real;

/// Threshold, relative to the field peak, below which a contour is rejected.
const CONTOUR_FLOOR: f64 = 1e-10;

/// Phase winding of `E_μ` around the `z` axis along the ring `(r_i, ϑ_j)`
/// of the field grid.
pub fn vortex_winding<T: Real>(field: &PositionField<T>, mu: i32, ir: usize, it: usize) -> Result<i32, SynthesisError> {
    let np = field.grid.phi.len();
    if ir >= field.grid.r.len() || it >= field.grid.theta.len() || np < 3 {
        return Err(SynthesisError::InvalidSpec("contour outside the field grid".into()));
    }
    let ring: Vec<_> = (0..np).map(|k| field.value(ir, it, k, mu)).collect();
    let threshold = T::lit(CONTOUR_FLOOR) * field.peak();
    let min = ring.iter().map(|v| v.norm()).fold(T::infinity(), T::min);
    if !(min > threshold) {
        return Err(SynthesisError::ZeroOnContour { min: min.as_f64(), threshold: threshold.as_f64() });
    }
    let total: T = (0..np).map(|k| (ring[(k + 1) % np] / ring[k]).arg()).sum();
    let turns = total / (T::lit(2.0) * T::PI());
    let n = turns.round();
    if (turns - n).abs() > T::lit(1e-6) {
        return Err(SynthesisError::NonIntegerWinding(turns.as_f64()));
    }
    Ok(n.to_i32().unwrap_or(0))
}

/// Largest `|E_μ|` on the polar axis samples (`ϑ = 0` or `π`) relative to
/// the field peak; `None` if the grid has no axis samples.
pub fn on_axis_null<T: Real>(field: &PositionField<T>, mu: i32) -> Option<T> {
    let axis: Vec<usize> =
        field.grid.theta.iter().enumerate().filter(|(_, &t)| t == T::zero() || t == T::PI()).map(|(i, _)| i).collect();
    if axis.is_empty() {
        return None;
    }
    let mut worst = T::zero();
    for ir in 0..field.grid.r.len() {
        for &it in &axis {
            for ip in 0..field.grid.phi.len() {
                worst = worst.max(field.value(ir, it, ip, mu).norm());
            }
        }
    }
    Some(worst / field.peak())
}

/// Equatorial intensity scan of the vortex components.
#[derive(Debug, Clone, Serialize)]
pub struct AnnularProfile<T> {
    pub peak_radius: T,
    pub radii: Vec<T>,
    /// `Σ |E_μ|²` over components with a nonzero azimuthal index, unnormalized.
    pub intensity: Vec<T>,
    pub components: Vec<i32>,
}

/// First off-axis maximum of `Σ |E_μ(r, π/2, 0, 0)|²` over the components
/// with `λm - μ ≠ 0`, scanned on `n_r` radii in `(0, r_max]` and refined by
/// golden-section search.
pub fn annular_profile<T: Real>(spec: &LocalizedStateSpec<T>, r_max: T, n_r: usize) -> Result<AnnularProfile<T>, SynthesisError> {
    if n_r < 3 || !(r_max > T::zero()) {
        return Err(SynthesisError::InvalidSpec("ring scan needs r_max > 0 and at least 3 radii".into()));
    }
    let synth = FieldSynthesizer::new(spec)?;
    let mut components: Vec<i32> = synth
        .coefficients()
        .components
        .iter()
        .filter(|c| c.dominant().is_some_and(|m| m.n != 0))
        .map(|c| c.mu)
        .collect();
    components.sort_unstable();
    components.dedup();
    if components.is_empty() {
        return Err(SynthesisError::NoRingFound("every component has zero azimuthal index".into()));
    }
    synth.require_accepted(&components)?;
    let half_pi = T::FRAC_PI_2();
    let radii: Vec<T> = (1..=n_r).map(|i| r_max * T::from_usize_exact(i) / T::from_usize_exact(n_r)).collect();
    let grid = FieldGrid::new(radii.clone(), vec![half_pi], vec![T::zero()])?;
    let raw = synth.raw_grid(&components, &grid, T::zero())?;
    let intensity: Vec<T> = raw.chunks(3).map(|c| c.iter().map(|v| v.norm_sqr()).sum()).collect();
    let first = (1..n_r - 1).find(|&i| intensity[i] > intensity[i - 1] && intensity[i] >= intensity[i + 1]);
    let Some(i) = first else {
        return Err(SynthesisError::NoRingFound(format!("no interior maximum within r <= {r_max}")));
    };
    let at = |r: T| -> Result<T, SynthesisError> {
        Ok(synth.raw_point(&components, r, half_pi, T::zero(), T::zero())?.iter().map(|v| v.norm_sqr()).sum())
    };
    let golden = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (radii[i - 1], radii[i + 1]);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (at(c)?, at(d)?);
    while b - a > T::lit(1e-10) * (T::one() + b) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = at(d)?;
        }
    }
    Ok(AnnularProfile { peak_radius: (a + b) / T::lit(2.0), radii, intensity, components })
}

/// Relative L2 distance between the fields of two specifications
/// synthesized independently on the same grid.
pub fn field_gauge_invariance<T: Real>(
    a: &LocalizedStateSpec<T>,
    b: &LocalizedStateSpec<T>,
    grid: &FieldGrid<T>,
    t: T,
) -> Result<T, SynthesisError> {
    let fa = FieldSynthesizer::new(a)?.synthesize(grid, t)?;
    let fb = FieldSynthesizer::new(b)?.synthesize(grid, t)?;
    fa.relative_l2_distance(&fb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeSpec;
    use crate::synthesis::{synthesize_field, AngularWeight, HelicitySelection, RadialSpectrum};

    fn spec(m: i32, p0: f64) -> LocalizedStateSpec<f64> {
        LocalizedStateSpec::new(
            m,
            HelicitySelection::Plus,
            RadialSpectrum::Exponential { p0 },
            AngularWeight::SinPower(m.unsigned_abs() + 1),
        )
    }

    #[test]
    fn winding_matches_azimuthal_index() {
        let grid = FieldGrid::uniform(4.0, 5, 5, 24).unwrap();
        let f = synthesize_field(&spec(1, 1.0), &grid, 0.0).unwrap();
        assert_eq!(vortex_winding(&f, -1, 2, 2).unwrap(), 2);
        assert_eq!(vortex_winding(&f, 0, 2, 2).unwrap(), 1);
        assert_eq!(vortex_winding(&f, 1, 2, 2).unwrap(), 0);
        assert!(matches!(vortex_winding(&f, -1, 2, 0), Err(SynthesisError::ZeroOnContour { .. })));
        assert!(on_axis_null(&f, -1).unwrap() < 1e-12);
    }

    #[test]
    fn ring_shrinks_with_scale() {
        let r1 = annular_profile(&spec(1, 1.0), 8.0, 80).unwrap().peak_radius;
        let r2 = annular_profile(&spec(1, 2.0), 8.0, 80).unwrap().peak_radius;
        assert!((r1 / r2 - 2.0).abs() < 1e-6, "{r1} {r2}");
        let localized = annular_profile(
            &LocalizedStateSpec::new(0, HelicitySelection::Plus, RadialSpectrum::Exponential { p0: 1.0 }, AngularWeight::SinTheta)
                .with_l_max(20),
            8.0,
            40,
        );
        assert!(localized.is_ok());
    }

    #[test]
    fn compensation_preserves_the_field() {
        let grid = FieldGrid::uniform(4.0, 7, 7, 12).unwrap();
        let mut a = spec(1, 1.0);
        // sin^4 keeps the uncompensated control a rapidly converging series
        a.angular = AngularWeight::SinPower(4);
        let b = a.clone().with_gauge(GaugeSpec::zero(), true);
        let c = a.clone().with_gauge(GaugeSpec::zero(), false);
        assert!(field_gauge_invariance(&a, &b, &grid, 0.0).unwrap() < 1e-10);
        assert!(field_gauge_invariance(&a, &c, &grid, 0.0).unwrap() > 1e-2);
    }
}
