use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::OperatorError;
use crate::quadrature::GaussLegendre;
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PSpacing {
    Uniform,
    Geometric,
}

impl fmt::Display for PSpacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PSpacing::Uniform => "uniform",
            PSpacing::Geometric => "geometric",
        })
    }
}

/// Resolution and layout of a [`MomentumGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_p: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub p_spacing: PSpacing,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Points per finite-difference stencil in `p`.
    pub p_stencil: usize,
    /// Points per local interpolation stencil in `θ`.
    pub theta_stencil: usize,
}

impl GridSpec {
    pub const FINE: GridSpec = GridSpec {
        n_p: 64,
        p_min: 1.0,
        p_max: 6.0,
        p_spacing: PSpacing::Uniform,
        n_theta: 48,
        n_phi: 32,
        p_stencil: 9,
        theta_stencil: 9,
    };

    pub const COARSE: GridSpec = GridSpec { n_p: 32, n_theta: 24, ..Self::FINE };

    pub fn resolution(&self) -> (usize, usize, usize) {
        (self.n_p, self.n_theta, self.n_phi)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::FINE
    }
}

/// Derivative stencil at one node: `f'(x_i) ≈ Σ_k w_k f(x_{start+k})`.
#[derive(Debug, Clone)]
pub(crate) struct Stencil<T> {
    pub start: usize,
    pub weights: Vec<T>,
}

/// Tensor grid in momentum space: `p` nodes, Gauss–Legendre nodes in
/// `cos θ` (so `θ` decreases with index) and uniform periodic `φ`.
pub struct MomentumGrid<T: Real> {
    pub spec: GridSpec,
    pub p: Vec<T>,
    pub p_weights: Vec<T>,
    pub cos_theta: Vec<T>,
    pub theta: Vec<T>,
    pub theta_weights: Vec<T>,
    pub phi: Vec<T>,
    pub(crate) dp: Vec<Stencil<T>>,
    pub(crate) dtheta: Vec<Stencil<T>>,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for MomentumGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentumGrid").field("spec", &self.spec).finish()
    }
}

impl<T: Real> MomentumGrid<T> {
    pub fn new(spec: GridSpec) -> Result<Self, OperatorError> {
        let bad = |msg: String| Err(OperatorError::Resolution(msg));
        if spec.n_phi < 8 || !spec.n_phi.is_multiple_of(2) {
            return bad(format!("n_phi must be even and at least 8, got {}", spec.n_phi));
        }
        if spec.n_theta < 8 {
            return bad(format!("n_theta must be at least 8, got {}", spec.n_theta));
        }
        if !(spec.p_min > 0.0 && spec.p_max > spec.p_min && spec.p_max.is_finite()) {
            return bad(format!("need 0 < p_min < p_max, got [{}, {}]", spec.p_min, spec.p_max));
        }
        if spec.p_stencil < 3 || spec.theta_stencil < 3 {
            return bad("stencils need at least 3 points".into());
        }
        if spec.n_p < spec.p_stencil {
            return bad(format!("n_p = {} is smaller than the p stencil ({})", spec.n_p, spec.p_stencil));
        }
        if spec.n_theta < spec.theta_stencil {
            return bad(format!(
                "n_theta = {} is smaller than the θ stencil ({})",
                spec.n_theta, spec.theta_stencil
            ));
        }

        let n = spec.n_p;
        let last = (n - 1) as f64;
        let (p, p_weights): (Vec<f64>, Vec<f64>) = match spec.p_spacing {
            PSpacing::Uniform => {
                let h = (spec.p_max - spec.p_min) / last;
                (0..n).map(|i| (spec.p_min + h * i as f64, h * trapezoid_end(i, n))).unzip()
            }
            PSpacing::Geometric => {
                let ds = (spec.p_max / spec.p_min).ln() / last;
                (0..n)
                    .map(|i| {
                        let p = spec.p_min * (ds * i as f64).exp();
                        (p, p * ds * trapezoid_end(i, n))
                    })
                    .unzip()
            }
        };
        let gl = GaussLegendre::<f64>::new(spec.n_theta).map_err(|e| OperatorError::Resolution(e.to_string()))?;
        let theta: Vec<f64> = gl.nodes.iter().map(|x| x.acos()).collect();
        let phi: Vec<f64> = (0..spec.n_phi)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / spec.n_phi as f64)
            .collect();

        let mut planner = FftPlanner::new();
        let lit = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        Ok(Self {
            spec,
            dp: stencils(&p, spec.p_stencil),
            dtheta: stencils(&theta, spec.theta_stencil),
            p: lit(&p),
            p_weights: lit(&p_weights),
            cos_theta: lit(&gl.nodes),
            theta: lit(&theta),
            theta_weights: lit(&gl.weights),
            phi: lit(&phi),
            fft: planner.plan_fft_forward(spec.n_phi),
            ifft: planner.plan_fft_inverse(spec.n_phi),
        })
    }

    pub fn n_p(&self) -> usize {
        self.p.len()
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    /// Number of scalar samples per `μ` component.
    pub fn points(&self) -> usize {
        self.n_p() * self.n_theta() * self.n_phi()
    }

    /// `∫ dΩ` by the angular rule.
    pub fn solid_angle(&self) -> T {
        let dphi = T::lit(2.0) * T::PI() / T::from_usize_exact(self.n_phi());
        self.theta_weights.iter().copied().sum::<T>() * dphi * T::from_usize_exact(self.n_phi())
    }

    /// Measure `w_p p² p^{-2α} w_θ Δφ` at `(ip, iθ)`; the same for every `φ`.
    pub fn measure(&self, ip: usize, it: usize, alpha: T) -> T {
        let p = self.p[ip];
        let dphi = T::lit(2.0) * T::PI() / T::from_usize_exact(self.n_phi());
        self.p_weights[ip] * p * p * p.powf(-T::lit(2.0) * alpha) * self.theta_weights[it] * dphi
    }

    /// `∂/∂p` of one scalar block laid out `[p][θ][φ]`.
    pub(crate) fn d_p(&self, f: &[Complex<T>], out: &mut [Complex<T>]) {
        let plane = self.n_theta() * self.n_phi();
        out.par_chunks_mut(plane).enumerate().for_each(|(ip, o)| {
            let st = &self.dp[ip];
            o.iter_mut().for_each(|v| *v = cplx(T::zero(), T::zero()));
            for (k, &w) in st.weights.iter().enumerate() {
                let src = &f[(st.start + k) * plane..(st.start + k + 1) * plane];
                for (o, s) in o.iter_mut().zip(src) {
                    *o = *o + *s * w;
                }
            }
        });
    }

    /// `∂/∂θ` of one scalar block.
    pub(crate) fn d_theta(&self, f: &[Complex<T>], out: &mut [Complex<T>]) {
        let nf = self.n_phi();
        let plane = self.n_theta() * nf;
        out.par_chunks_mut(plane).zip(f.par_chunks(plane)).for_each(|(o, src)| {
            for (it, row) in o.chunks_mut(nf).enumerate() {
                let st = &self.dtheta[it];
                row.iter_mut().for_each(|v| *v = cplx(T::zero(), T::zero()));
                for (k, &w) in st.weights.iter().enumerate() {
                    let s = &src[(st.start + k) * nf..(st.start + k + 1) * nf];
                    for (o, s) in row.iter_mut().zip(s) {
                        *o = *o + *s * w;
                    }
                }
            }
        });
    }

    /// Spectral `∂/∂φ` of one scalar block, Nyquist mode dropped.
    pub(crate) fn d_phi(&self, f: &[Complex<T>], out: &mut [Complex<T>]) {
        let nf = self.n_phi();
        let scale = T::one() / T::from_usize_exact(nf);
        out.par_chunks_mut(nf).zip(f.par_chunks(nf)).for_each(|(o, s)| {
            o.copy_from_slice(s);
            self.fft.process(o);
            for (k, v) in o.iter_mut().enumerate() {
                let wave = if k < nf / 2 {
                    k as i64
                } else if k == nf / 2 {
                    0
                } else {
                    k as i64 - nf as i64
                };
                *v = *v * cplx(T::zero(), T::from_int(wave) * scale);
            }
            self.ifft.process(o);
        });
    }
}

fn trapezoid_end(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

fn stencils<T: Real>(x: &[f64], width: usize) -> Vec<Stencil<T>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let w = fornberg_first(x[i], &x[start..start + width]);
            Stencil { start, weights: w.into_iter().map(T::lit).collect() }
        })
        .collect()
}

/// Fornberg's recursion for first-derivative weights at `x0`.
pub(crate) fn fornberg_first(x0: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for s in (1..=mn).rev() {
                    c[i][s] = c1 * (s as f64 * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for s in (1..=mn).rev() {
                c[j][s] = (c4 * c[j][s] - s as f64 * c[j][s - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|r| r[1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_weights() {
        let w = fornberg_first(0.0, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = fornberg_first(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let want = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_invariants() {
        let g = MomentumGrid::<f64>::new(GridSpec::COARSE).unwrap();
        assert!((g.solid_angle() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(g.p.iter().all(|&p| p > 0.0));
        assert!(g.theta.windows(2).all(|w| w[1] < w[0]));
        // trapezoid is spectrally accurate for integrands that vanish at both ends
        let s: f64 = 0.35;
        let int: f64 = g.p.iter().zip(&g.p_weights).map(|(p, w)| w * p * p * (-(p - 3.5).powi(2) / (2.0 * s * s)).exp()).sum();
        let want = (2.0 * std::f64::consts::PI).sqrt() * s * (12.25 + s * s);
        assert!((int - want).abs() / want < 1e-8, "{int} vs {want}");
    }

    #[test]
    fn rejects_bad_specs() {
        let odd = GridSpec { n_phi: 31, ..GridSpec::COARSE };
        assert!(MomentumGrid::<f64>::new(odd).is_err());
        let few = GridSpec { n_theta: 6, ..GridSpec::COARSE };
        assert!(MomentumGrid::<f64>::new(few).is_err());
        let narrow = GridSpec { n_p: 5, ..GridSpec::COARSE };
        assert!(matches!(MomentumGrid::<f64>::new(narrow), Err(OperatorError::Resolution(_))));
    }

    #[test]
    fn derivatives_of_smooth_functions() {
        let g = MomentumGrid::<f64>::new(GridSpec::COARSE).unwrap();
        let (nt, nf) = (g.n_theta(), g.n_phi());
        let mut f = vec![cplx(0.0, 0.0); g.points()];
        for ip in 0..g.n_p() {
            for it in 0..nt {
                for k in 0..nf {
                    f[(ip * nt + it) * nf + k] = cplx(g.p[ip].sin() * g.theta[it].cos() * (2.0 * g.phi[k]).cos(), 0.0);
                }
            }
        }
        let mut out = vec![cplx(0.0, 0.0); f.len()];
        let worst = |out: &[Complex<f64>], d: &dyn Fn(usize, usize, usize) -> f64| {
            let mut w: f64 = 0.0;
            for ip in 0..g.n_p() {
                for it in 0..nt {
                    for k in 0..nf {
                        let got = out[(ip * nt + it) * nf + k];
                        w = w.max((got.re - d(ip, it, k)).abs()).max(got.im.abs());
                    }
                }
            }
            w
        };
        g.d_p(&f, &mut out);
        let e = worst(&out, &|ip, it, k| g.p[ip].cos() * g.theta[it].cos() * (2.0 * g.phi[k]).cos());
        assert!(e < 1e-4, "∂p error {e:e}");
        g.d_theta(&f, &mut out);
        let e = worst(&out, &|ip, it, k| -g.p[ip].sin() * g.theta[it].sin() * (2.0 * g.phi[k]).cos());
        assert!(e < 1e-7, "∂θ error {e:e}");
        g.d_phi(&f, &mut out);
        let e = worst(&out, &|ip, it, k| -2.0 * g.p[ip].sin() * g.theta[it].cos() * (2.0 * g.phi[k]).sin());
        assert!(e < 1e-13, "∂φ error {e:e}");
    }
}
