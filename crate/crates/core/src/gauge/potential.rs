use serde::Serialize;

use super::{spherical_unit_vectors, GaugeError, GaugeSpec};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct GaugePotentialSample<T> {
    pub p: T,
    pub theta: T,
    pub phi: T,
    /// Cartesian components.
    pub vector: [T; 3],
    pub theta_component: T,
    pub phi_component: T,
    pub gauge: GaugeSpec<T>,
}

/// `a^(χ) = [cot θ φ̂ + θ̂ ∂_θχ + φ̂ ∂_φχ / sin θ] / p`.
pub fn gauge_potential<T: Real>(gauge: &GaugeSpec<T>, p: T, theta: T, phi: T) -> Result<GaugePotentialSample<T>, GaugeError> {
    gauge.check_off_string(theta)?;
    let (dt, df) = gauge.chi_derivatives(theta, phi);
    let (s, c) = theta.sin_cos();
    let theta_component = dt / p;
    let phi_component = match gauge.kind {
        // keep the closed form exact for the linear family
        super::GaugeKind::LinearM(m) => (c - T::from_int(m as i64)) / (p * s),
        _ => (c + df) / (p * s),
    };
    let [_, th, ph] = spherical_unit_vectors(theta, phi);
    let vector = [0, 1, 2].map(|k| th[k] * theta_component + ph[k] * phi_component);
    Ok(GaugePotentialSample { p, theta, phi, vector, theta_component, phi_component, gauge: gauge.clone() })
}

/// Cartesian `∇χ` at momentum `(p, θ, φ)`.
pub fn gauge_gradient<T: Real>(gauge: &GaugeSpec<T>, p: T, theta: T, phi: T) -> Result<[T; 3], GaugeError> {
    gauge.check_off_string(theta)?;
    let (dt, df) = gauge.chi_derivatives(theta, phi);
    let [_, th, ph] = spherical_unit_vectors(theta, phi);
    let s = theta.sin();
    Ok([0, 1, 2].map(|k| (th[k] * dt + ph[k] * df / s) / p))
}

/// `n = a×p + p̂`, so that `S^(χ) = n (S·p̂)`. Independent of `|p|`.
pub fn spin_axis<T: Real>(gauge: &GaugeSpec<T>, theta: T, phi: T) -> Result<[T; 3], GaugeError> {
    let a = gauge_potential(gauge, T::one(), theta, phi)?;
    let [pr, th, ph] = spherical_unit_vectors(theta, phi);
    Ok([0, 1, 2].map(|k| pr[k] + th[k] * a.phi_component - ph[k] * a.theta_component))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    North,
    South,
}

/// `(1/2π) ∮ a·dl` on the counter-clockwise circle at `θ = ε` (north) or
/// `π - ε` (south), Richardson-extrapolated to `ε → 0`.
pub fn string_flux<T: Real>(gauge: &GaugeSpec<T>, p: T, pole: Pole) -> Result<T, GaugeError> {
    let base = T::lit(1e-2).max(T::lit(4.0) * gauge.string_exclusion);
    let f = |eps: T| loop_integral(gauge, p, pole, eps);
    let f1 = f(base)?;
    let f2 = f(base / T::lit(2.0))?;
    let f3 = f(base / T::lit(4.0))?;
    // error series in ε², ε⁴, ...
    let r1 = (T::lit(4.0) * f2 - f1) / T::lit(3.0);
    let r2 = (T::lit(4.0) * f3 - f2) / T::lit(3.0);
    Ok((T::lit(16.0) * r2 - r1) / T::lit(15.0))
}

fn loop_integral<T: Real>(gauge: &GaugeSpec<T>, p: T, pole: Pole, eps: T) -> Result<T, GaugeError> {
    let theta = match pole {
        Pole::North => eps,
        Pole::South => T::PI() - eps,
    };
    const N: usize = 64;
    let mut sum = T::zero();
    for k in 0..N {
        let phi = T::lit(2.0) * T::PI() * T::from_usize_exact(k) / T::from_usize_exact(N);
        let a = gauge_potential(gauge, p, theta, phi)?;
        sum = sum + a.phi_component * p * theta.sin();
    }
    Ok(sum / T::from_usize_exact(N))
}

/// North minus south string flux, in units of 2π.
pub fn total_string_flux<T: Real>(gauge: &GaugeSpec<T>, p: T) -> Result<T, GaugeError> {
    Ok(string_flux(gauge, p, Pole::North)? - string_flux(gauge, p, Pole::South)?)
}

#[derive(Debug, Clone, Copy)]
pub struct MonopoleCheck<T> {
    pub computed: [T; 3],
    pub expected: [T; 3],
    pub relative_error: T,
}

/// Central-difference curl of `a^(χ)` against the monopole field `-p̂/p²`.
pub fn monopole_curl_check<T: Real>(
    gauge: &GaugeSpec<T>,
    p: T,
    theta: T,
    phi: T,
    step: T,
) -> Result<MonopoleCheck<T>, GaugeError> {
    gauge.check_off_string(theta)?;
    let [pr, _, _] = spherical_unit_vectors(theta, phi);
    let centre = pr.map(|v| v * p);
    let a_at = |x: [T; 3]| -> Result<[T; 3], GaugeError> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let t = (x[2] / r).max(-T::one()).min(T::one()).acos();
        let f = x[1].atan2(x[0]);
        Ok(gauge_potential(gauge, r, t, f)?.vector)
    };
    // jac[j][k] = ∂_j a_k
    let mut jac = [[T::zero(); 3]; 3];
    for j in 0..3 {
        let mut fwd = centre;
        let mut back = centre;
        fwd[j] = fwd[j] + step;
        back[j] = back[j] - step;
        let (af, ab) = (a_at(fwd)?, a_at(back)?);
        for k in 0..3 {
            jac[j][k] = (af[k] - ab[k]) / (T::lit(2.0) * step);
        }
    }
    let computed = [jac[1][2] - jac[2][1], jac[2][0] - jac[0][2], jac[0][1] - jac[1][0]];
    let expected = pr.map(|v| -v / (p * p));
    let diff = (0..3).map(|k| (computed[k] - expected[k]).powi(2)).sum::<T>().sqrt();
    let scale = (0..3).map(|k| expected[k].powi(2)).sum::<T>().sqrt();
    Ok(MonopoleCheck { computed, expected, relative_error: diff / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeTable;
    use std::f64::consts::PI;

    #[test]
    fn potential_examples() {
        let z = GaugeSpec::<f64>::zero();
        assert!(gauge_potential(&z, 1.0, PI / 2.0, 0.0).unwrap().phi_component.abs() < 1e-16);
        let l1 = GaugeSpec::<f64>::linear(1);
        assert!((gauge_potential(&l1, 1.0, PI / 2.0, 0.3).unwrap().phi_component + 1.0).abs() < 1e-15);
        let a = gauge_potential(&l1, 2.0, PI / 3.0, 0.0).unwrap();
        assert!((a.phi_component + 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((a.phi_component - (-0.288_675)).abs() < 1e-6);
        // purely azimuthal
        let [_, th, _] = spherical_unit_vectors(PI / 3.0, 0.0);
        assert!((0..3).map(|k| a.vector[k] * th[k]).sum::<f64>().abs() < 1e-16);
    }

    #[test]
    fn string_proximity_is_an_error() {
        let z = GaugeSpec::<f64>::zero();
        assert!(matches!(gauge_potential(&z, 1.0, 1e-8, 0.0), Err(GaugeError::StringProximity { .. })));
        assert!(gauge_potential(&z, 1.0, PI, 0.0).is_err());
    }

    #[test]
    fn flux_factors() {
        for m in -2..=2 {
            let g = GaugeSpec::<f64>::linear(m);
            let n = string_flux(&g, 1.0, Pole::North).unwrap();
            let s = string_flux(&g, 1.0, Pole::South).unwrap();
            assert!((n - (1 - m) as f64).abs() < 1e-10, "m={m} north {n}");
            assert!((s + (1 + m) as f64).abs() < 1e-10, "m={m} south {s}");
            assert!((total_string_flux(&g, 2.5).unwrap() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn tabulated_periodic_gauge_keeps_zero_gauge_flux() {
        let t = GaugeTable::from_fn(GaugeTable::midpoint_theta(64), 32, |t: f64, p: f64| 0.2 * t.sin().powi(2) * p.cos())
            .unwrap();
        let g = GaugeSpec::tabulated(t, "test");
        assert!((string_flux(&g, 1.0, Pole::North).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn curl_matches_monopole() {
        let z = GaugeSpec::<f64>::zero();
        let e1 = monopole_curl_check(&z, 1.0, PI / 2.0, 0.0, 1e-2).unwrap().relative_error;
        let e2 = monopole_curl_check(&z, 1.0, PI / 2.0, 0.0, 5e-3).unwrap().relative_error;
        assert!(((e1 / e2).log2() - 2.0).abs() < 0.1);
        let c3 = monopole_curl_check(&GaugeSpec::linear(3), 1.0, 1.0, 0.5, 1e-4).unwrap();
        let c0 = monopole_curl_check(&z, 1.0, 1.0, 0.5, 1e-4).unwrap();
        for k in 0..3 {
            assert!((c3.computed[k] - c0.computed[k]).abs() < 1e-6);
        }
        let c = monopole_curl_check(&z, 2.0, 1.2, -0.3, 1e-4).unwrap();
        let mag = c.computed.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((mag - 0.25).abs() < 1e-7);
    }

    #[test]
    fn spin_axis_z_component_is_m() {
        for m in -2..=2 {
            let n = spin_axis(&GaugeSpec::<f64>::linear(m), 0.8, 2.0).unwrap();
            assert!((n[2] - m as f64).abs() < 1e-14);
        }
    }
}
