use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{LocalizedStateSpec, SynthesisError};
use crate::quadrature::GaussLegendre;
use crate::scalar::{czero, Real};
use crate::specfun::{mu_index, normalized_legendre_column};

/// Relative size of the last expansion coefficients below which a run is accepted.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Largest `l_max` the automatic doubling will try.
pub const DEFAULT_L_MAX_CAP: u32 = 512;
/// Azimuthal modes weaker than this (relative) are treated as absent.
const MODE_FLOOR: f64 = 1e-13;

/// Piecewise-linear `g(θ)`, held constant beyond the first and last node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularTable<T> {
    theta: Vec<T>,
    g: Vec<T>,
}

impl<T: Real> AngularTable<T> {
    pub fn new(theta: Vec<T>, g: Vec<T>) -> Result<Self, SynthesisError> {
        if theta.len() < 2 || theta.len() != g.len() {
            return Err(SynthesisError::InvalidSpec("angular table needs at least two (theta, g) pairs".into()));
        }
        if theta[0] < T::zero() || theta[theta.len() - 1] > T::PI() || theta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SynthesisError::InvalidSpec("angular table nodes must increase within [0, pi]".into()));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(SynthesisError::InvalidSpec("angular table values must be finite".into()));
        }
        Ok(Self { theta, g })
    }

    pub fn eval(&self, theta: T) -> T {
        let n = self.theta.len();
        if theta <= self.theta[0] {
            return self.g[0];
        }
        if theta >= self.theta[n - 1] {
            return self.g[n - 1];
        }
        let i = self.theta.partition_point(|&x| x <= theta).clamp(1, n - 1);
        let s = (theta - self.theta[i - 1]) / (self.theta[i] - self.theta[i - 1]);
        self.g[i - 1] * (T::one() - s) + self.g[i] * s
    }
}

/// Polar weight `g(θ)` of a localized state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AngularWeight<T> {
    One,
    SinTheta,
    /// `sin^k θ`; with `k = |m| + 1` every component is a finite harmonic sum.
    SinPower(u32),
    Tabulated(AngularTable<T>),
}

impl<T: Real> AngularWeight<T> {
    pub fn eval(&self, theta: T) -> T {
        match self {
            Self::One => T::one(),
            Self::SinTheta => theta.sin(),
            Self::SinPower(k) => theta.sin().powi(*k as i32),
            Self::Tabulated(t) => t.eval(theta),
        }
    }
}

/// Projections `P_{l,n} = ∫ dΩ Y_l^{n*} A_μ` for one azimuthal mode `n`.
#[derive(Debug, Clone, Serialize)]
pub struct ModeProjection<T> {
    pub n: i32,
    /// Indexed by `l - |n|`.
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ModeProjection<T> {
    pub fn get(&self, l: u32) -> Complex<T> {
        let m = self.n.unsigned_abs();
        if l < m {
            return czero();
        }
        self.values.get((l - m) as usize).copied().unwrap_or_else(czero)
    }

    fn peak(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }
}

/// Harmonic content of one spherical component of one helicity.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentProjection<T> {
    pub lambda: i32,
    pub mu: i32,
    pub l_max: u32,
    pub modes: Vec<ModeProjection<T>>,
    pub tail_estimate: T,
}

impl<T: Real> ComponentProjection<T> {
    /// Tail below [`TAIL_TOLERANCE`], or below the rounding level for `f32`.
    pub fn accepted(&self) -> bool {
        self.tail_estimate < T::lit(TAIL_TOLERANCE).max(T::lit(100.0) * T::epsilon())
    }

    /// Strongest azimuthal mode, if the component is not identically zero.
    pub fn dominant(&self) -> Option<&ModeProjection<T>> {
        self.modes.iter().max_by(|a, b| a.peak().partial_cmp(&b.peak()).unwrap_or(std::cmp::Ordering::Equal))
    }
}

/// Projections of every `(λ, μ)` component of a state.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientSet<T> {
    pub components: Vec<ComponentProjection<T>>,
}

impl<T: Real> CoefficientSet<T> {
    pub fn component(&self, lambda: i32, mu: i32) -> Option<&ComponentProjection<T>> {
        self.components.iter().find(|c| c.lambda == lambda && c.mu == mu)
    }

    pub fn accepted(&self) -> bool {
        self.components.iter().all(|c| c.accepted())
    }

    pub fn max_tail(&self) -> T {
        self.components.iter().map(|c| c.tail_estimate).fold(T::zero(), T::max)
    }

    pub fn l_max(&self) -> u32 {
        self.components.iter().map(|c| c.l_max).max().unwrap_or(0)
    }
}

/// Expansion coefficients of one component in both conventions.
#[derive(Debug, Clone, Serialize)]
pub struct AngularCoefficients<T> {
    pub lambda: i32,
    pub mu: i32,
    /// Azimuthal index of the harmonics, `λm - μ` for a compensated state.
    pub n: i32,
    /// `c_l` in `√(2π) g(θ) e_{λ,μ}(θ,0) = Σ c_l Y_l^n(θ,0)`.
    pub entries: Vec<(u32, Complex<T>)>,
    /// `∫ d(cos θ) Y_l^n(θ,0) g(θ) e_{λ,μ}(θ,0)`, the factor entering the field sum.
    pub field_projection: Vec<(u32, Complex<T>)>,
    pub l_max: u32,
    pub tail_estimate: T,
    pub accepted: bool,
}

/// Projects component `μ` of helicity `λ` onto harmonics up to `l_max`.
pub(crate) fn project_component<T: Real>(
    spec: &LocalizedStateSpec<T>,
    lambda: i32,
    mu: i32,
    l_max: u32,
) -> Result<ComponentProjection<T>, SynthesisError> {
    let n_theta = 2 * l_max as usize + 32;
    let n_phi = (2 * l_max as usize + 8).next_power_of_two().max(16);
    let gl = GaussLegendre::<T>::new(n_theta)?;
    let fft = FftPlanner::new().plan_fft_forward(n_phi);
    let dphi = T::lit(2.0) * T::PI() / T::from_usize_exact(n_phi);
    let iu = mu_index(mu);

    // a_n(θ_j) = ∫ dφ e^{-inφ} A_μ(θ_j, φ), stored by FFT bin
    let rows: Vec<Vec<Complex<T>>> = gl
        .nodes
        .par_iter()
        .map(|&x| {
            let theta = x.acos();
            let mut row: Vec<Complex<T>> =
                (0..n_phi).map(|k| spec.amplitude(lambda, theta, dphi * T::from_usize_exact(k))[iu]).collect();
            fft.process(&mut row);
            row.iter().map(|v| *v * dphi).collect()
        })
        .collect();

    let bin = |n: i32| n.rem_euclid(n_phi as i32) as usize;
    let half = (n_phi / 2) as i32 - 1;
    let weight = |n: i32| rows.iter().map(|r| r[bin(n)].norm()).fold(T::zero(), T::max);
    let weights: Vec<(i32, T)> = (-half..=half).map(|n| (n, weight(n))).collect();
    let top = weights.iter().map(|w| w.1).fold(T::zero(), T::max);
    if top == T::zero() {
        return Ok(ComponentProjection { lambda, mu, l_max, modes: Vec::new(), tail_estimate: T::zero() });
    }
    let floor = T::lit(MODE_FLOOR).max(T::lit(1e3) * T::epsilon()) * top;
    let unrepresented = weights.iter().any(|&(n, w)| n.unsigned_abs() > l_max && w > floor);

    let modes: Vec<ModeProjection<T>> = weights
        .iter()
        .filter(|&&(n, w)| n.unsigned_abs() <= l_max && w > floor)
        .map(|&(n, _)| {
            let len = (l_max - n.unsigned_abs() + 1) as usize;
            let mut values = vec![czero(); len];
            for (j, &x) in gl.nodes.iter().enumerate() {
                let y = normalized_legendre_column(n, l_max, x.acos());
                let a = rows[j][bin(n)] * gl.weights[j];
                for (v, yl) in values.iter_mut().zip(y) {
                    *v = *v + a * yl;
                }
            }
            ModeProjection { n, values }
        })
        .collect();

    let peak = modes.iter().map(|m| m.peak()).fold(T::zero(), T::max);
    let tail_estimate = if unrepresented {
        T::one()
    } else if peak == T::zero() {
        T::zero()
    } else {
        // the last two orders, since parity can zero every other coefficient
        let last = modes
            .iter()
            .map(|m| {
                let k = m.values.len();
                let a = m.values[k - 1].norm();
                if k > 1 { a.max(m.values[k - 2].norm()) } else { a }
            })
            .fold(T::zero(), T::max);
        last / peak
    };
    Ok(ComponentProjection { lambda, mu, l_max, modes, tail_estimate })
}

/// `c_{μ,l}` for component `μ` of helicity `λ` at a fixed `l_max`.
pub fn angular_coefficients<T: Real>(
    spec: &LocalizedStateSpec<T>,
    lambda: i32,
    mu: i32,
    l_max: u32,
) -> Result<AngularCoefficients<T>, SynthesisError> {
    let n0 = spec.azimuthal_index(lambda, mu);
    if l_max < n0.unsigned_abs() {
        return Err(SynthesisError::InvalidSpec(format!("l_max {l_max} is below |λm - μ| = {}", n0.abs())));
    }
    let proj = project_component(spec, lambda, mu, l_max)?;
    let two_pi = T::lit(2.0) * T::PI();
    let (n, entries, field_projection) = match proj.dominant() {
        Some(mode) => {
            let ls = mode.n.unsigned_abs()..=l_max;
            let c = ls.clone().map(|l| (l, mode.get(l) * two_pi.sqrt())).collect();
            let f = ls.map(|l| (l, mode.get(l) / two_pi)).collect();
            (mode.n, c, f)
        }
        None => (n0, Vec::new(), Vec::new()),
    };
    let accepted = proj.accepted();
    if !accepted {
        log::warn!("component mu={mu} truncated at l_max={l_max}: tail {:e}", proj.tail_estimate.as_f64());
    }
    Ok(AngularCoefficients { lambda, mu, n, entries, field_projection, l_max, tail_estimate: proj.tail_estimate, accepted })
}

/// Projections of every component, doubling `l_max` from `|λm - μ| + 16`
/// until the tail estimate passes or the cap is reached. A fixed
/// `spec.l_max` disables doubling.
pub fn resolve_coefficients<T: Real>(spec: &LocalizedStateSpec<T>) -> Result<CoefficientSet<T>, SynthesisError> {
    spec.validate()?;
    let mut components = Vec::new();
    for &lambda in spec.helicity.lambdas() {
        for mu in [-1, 0, 1] {
            let mut l = spec.l_max.unwrap_or(spec.azimuthal_index(lambda, mu).unsigned_abs() + 16);
            let proj = loop {
                let p = project_component(spec, lambda, mu, l)?;
                if spec.l_max.is_some() || p.accepted() || l >= DEFAULT_L_MAX_CAP {
                    break p;
                }
                l = (2 * l).min(DEFAULT_L_MAX_CAP);
            };
            if !proj.accepted() {
                log::warn!(
                    "component lambda={lambda} mu={mu} truncated at l_max={}: tail {:e}",
                    proj.l_max,
                    proj.tail_estimate.as_f64()
                );
            }
            components.push(proj);
        }
    }
    Ok(CoefficientSet { components })
}
