use std::io::Write;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::angular::{resolve_coefficients, CoefficientSet};
use super::radial::RadialPlan;
use super::{LocalizedStateSpec, SynthesisError};
use crate::operators::{MomentumGrid, VectorWavefunction};
use crate::scalar::{cis, czero, i_pow, Real};
use crate::specfun::{mu_index, normalized_legendre_column, Vec3c};

/// Tensor grid of position-space sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldGrid<T> {
    pub r: Vec<T>,
    pub theta: Vec<T>,
    pub phi: Vec<T>,
}

impl<T: Real> FieldGrid<T> {
    pub fn new(r: Vec<T>, theta: Vec<T>, phi: Vec<T>) -> Result<Self, SynthesisError> {
        if r.is_empty() || theta.is_empty() || phi.is_empty() {
            return Err(SynthesisError::InvalidSpec("field grid axes must be non-empty".into()));
        }
        if r.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(SynthesisError::InvalidSpec("radii must be finite and non-negative".into()));
        }
        if theta.iter().any(|v| !(*v >= T::zero() && *v <= T::PI())) {
            return Err(SynthesisError::InvalidSpec("polar angles must lie in [0, pi]".into()));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(SynthesisError::InvalidSpec("azimuths must be finite".into()));
        }
        Ok(Self { r, theta, phi })
    }

    /// `r` from 0 to `r_max` and `ϑ` from 0 to π inclusive; `φ` uniform and periodic.
    pub fn uniform(r_max: T, n_r: usize, n_theta: usize, n_phi: usize) -> Result<Self, SynthesisError> {
        if n_r < 2 || n_theta < 2 || n_phi < 1 {
            return Err(SynthesisError::InvalidSpec("field grid needs n_r >= 2, n_theta >= 2, n_phi >= 1".into()));
        }
        let lin = |a: T, b: T, n: usize| -> Vec<T> {
            (0..n).map(|i| a + (b - a) * T::from_usize_exact(i) / T::from_usize_exact(n - 1)).collect()
        };
        let dphi = T::lit(2.0) * T::PI() / T::from_usize_exact(n_phi);
        Self::new(
            lin(T::zero(), r_max, n_r),
            lin(T::zero(), T::PI(), n_theta),
            (0..n_phi).map(|k| dphi * T::from_usize_exact(k)).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sampled `E_μ(r, ϑ, φ, t)`, normalized to unit peak modulus.
#[derive(Debug, Clone)]
pub struct PositionField<T> {
    pub grid: FieldGrid<T>,
    pub t: T,
    /// Layout `[r][ϑ][φ][μ]`.
    pub values: Vec<Complex<T>>,
    /// Factor applied to the raw sum so the grid peak is 1.
    pub normalization: T,
    pub m: i32,
    pub l_max: u32,
    pub tail_estimate: T,
}

/// Serializable digest of a synthesis run.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSummary {
    pub m: i32,
    pub t: f64,
    pub l_max: u32,
    pub tail_estimate: f64,
    pub normalization: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub l2_norm: f64,
}

impl<T: Real> PositionField<T> {
    pub fn index(&self, ir: usize, it: usize, ip: usize, mu: i32) -> usize {
        ((ir * self.grid.theta.len() + it) * self.grid.phi.len() + ip) * 3 + mu_index(mu)
    }

    pub fn value(&self, ir: usize, it: usize, ip: usize, mu: i32) -> Complex<T> {
        self.values[self.index(ir, it, ip, mu)]
    }

    pub fn peak(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    pub fn component_peak(&self, mu: i32) -> T {
        self.values.iter().skip(mu_index(mu)).step_by(3).map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Root sum of squares over all samples.
    pub fn l2_norm(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn relative_l2_distance(&self, other: &Self) -> Result<T, SynthesisError> {
        if self.grid != other.grid || self.values.len() != other.values.len() {
            return Err(SynthesisError::InvalidSpec("fields sampled on different grids".into()));
        }
        let d: T = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(d.sqrt() / self.l2_norm())
    }

    /// Dominant azimuthal mode of component `μ` and the largest other mode
    /// relative to it, from a DFT along every `φ` ring.
    pub fn azimuthal_purity(&self, mu: i32) -> (i32, T) {
        let (nr, nt, np) = (self.grid.r.len(), self.grid.theta.len(), self.grid.phi.len());
        let fft = FftPlanner::new().plan_fft_forward(np);
        let mut power = vec![T::zero(); np];
        let mut row = vec![czero(); np];
        for ir in 0..nr {
            for it in 0..nt {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = self.value(ir, it, k, mu);
                }
                fft.process(&mut row);
                for (p, v) in power.iter_mut().zip(&row) {
                    *p = p.max(v.norm());
                }
            }
        }
        let (best, top) = power.iter().enumerate().fold((0, T::zero()), |acc, (k, &p)| if p > acc.1 { (k, p) } else { acc });
        if top == T::zero() {
            return (0, T::zero());
        }
        let other = power.iter().enumerate().filter(|(k, _)| *k != best).map(|(_, p)| *p).fold(T::zero(), T::max);
        let n = if best > np / 2 { best as i32 - np as i32 } else { best as i32 };
        (n, other / top)
    }

    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            m: self.m,
            t: self.t.as_f64(),
            l_max: self.l_max,
            tail_estimate: self.tail_estimate.as_f64(),
            normalization: self.normalization.as_f64(),
            n_r: self.grid.r.len(),
            n_theta: self.grid.theta.len(),
            n_phi: self.grid.phi.len(),
            l2_norm: self.l2_norm().as_f64(),
        }
    }

    /// Rows `r,theta,phi,t,mu,re,im,abs2`, ordered by `r`, then `ϑ`, `φ`, `μ`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), SynthesisError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "theta", "phi", "t", "mu", "re", "im", "abs2"])?;
        let t = format!("{:e}", self.t.as_f64());
        for (ir, r) in self.grid.r.iter().enumerate() {
            for (it, th) in self.grid.theta.iter().enumerate() {
                for (ip, ph) in self.grid.phi.iter().enumerate() {
                    for mu in [-1, 0, 1] {
                        let v = self.value(ir, it, ip, mu);
                        w.write_record([
                            format!("{:e}", r.as_f64()),
                            format!("{:e}", th.as_f64()),
                            format!("{:e}", ph.as_f64()),
                            t.clone(),
                            mu.to_string(),
                            format!("{:e}", v.re.as_f64()),
                            format!("{:e}", v.im.as_f64()),
                            format!("{:e}", v.norm_sqr().as_f64()),
                        ])?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

struct Term<T> {
    mu: i32,
    n: i32,
    /// `(l, P_{l,n})` pairs that contribute.
    coeffs: Vec<(u32, Complex<T>)>,
}

/// Resolved state ready for evaluation at arbitrary points.
#[derive(Debug, Clone)]
pub struct FieldSynthesizer<T> {
    spec: LocalizedStateSpec<T>,
    coefficients: CoefficientSet<T>,
    plan: RadialPlan<T>,
}

impl<T: Real> FieldSynthesizer<T> {
    pub fn new(spec: &LocalizedStateSpec<T>) -> Result<Self, SynthesisError> {
        let coefficients = resolve_coefficients(spec)?;
        Self::from_parts(spec, coefficients)
    }

    pub fn from_parts(spec: &LocalizedStateSpec<T>, coefficients: CoefficientSet<T>) -> Result<Self, SynthesisError> {
        Ok(Self { spec: spec.clone(), coefficients, plan: RadialPlan::new(spec.radial.clone())? })
    }

    pub fn spec(&self) -> &LocalizedStateSpec<T> {
        &self.spec
    }

    pub fn coefficients(&self) -> &CoefficientSet<T> {
        &self.coefficients
    }

    /// Fails with the tail report if any component of `mus` is truncated.
    pub fn require_accepted(&self, mus: &[i32]) -> Result<(), SynthesisError> {
        for c in &self.coefficients.components {
            if mus.contains(&c.mu) && !c.accepted() {
                return Err(SynthesisError::Truncation { mu: c.mu, l_max: c.l_max, tail: c.tail_estimate.as_f64() });
            }
        }
        Ok(())
    }

    fn terms(&self, mus: &[i32]) -> Vec<Term<T>> {
        let top = self
            .coefficients
            .components
            .iter()
            .flat_map(|c| c.modes.iter().flat_map(|m| m.values.iter().map(|v| v.norm())))
            .fold(T::zero(), T::max);
        let floor = T::lit(1e-15) * top;
        let mut out = Vec::new();
        for c in self.coefficients.components.iter().filter(|c| mus.contains(&c.mu)) {
            for mode in &c.modes {
                let lo = mode.n.unsigned_abs();
                let coeffs: Vec<(u32, Complex<T>)> =
                    (lo..=c.l_max).map(|l| (l, mode.get(l))).filter(|(_, v)| v.norm() > floor).collect();
                if !coeffs.is_empty() {
                    out.push(Term { mu: c.mu, n: mode.n, coeffs });
                }
            }
        }
        out
    }

    fn radial_rows(&self, terms: &[Term<T>], radii: &[T], t: T) -> Result<Vec<Vec<Complex<T>>>, SynthesisError> {
        let l_top = terms.iter().flat_map(|x| x.coeffs.iter().map(|c| c.0)).max().unwrap_or(0) as usize;
        let mut needed = vec![false; l_top + 1];
        for x in terms {
            for c in &x.coeffs {
                needed[c.0 as usize] = true;
            }
        }
        let jobs: Vec<(usize, usize)> =
            (0..=l_top).filter(|&l| needed[l]).flat_map(|l| (0..radii.len()).map(move |i| (l, i))).collect();
        let vals: Vec<Result<Complex<T>, SynthesisError>> =
            jobs.par_iter().map(|&(l, i)| self.plan.transform(l as u32, radii[i], t)).collect();
        let mut rows = vec![vec![czero(); radii.len()]; l_top + 1];
        for (&(l, i), v) in jobs.iter().zip(vals) {
            rows[l][i] = v?;
        }
        Ok(rows)
    }

    /// Unnormalized field at one point, summing only the components in `mus`.
    pub fn raw_point(&self, mus: &[i32], r: T, theta: T, phi: T, t: T) -> Result<Vec3c<T>, SynthesisError> {
        let terms = self.terms(mus);
        let rows = self.radial_rows(&terms, &[r], t)?;
        let mut out = [czero(); 3];
        for x in &terms {
            let l_top = x.coeffs.last().map(|c| c.0).unwrap_or(0);
            let y = normalized_legendre_column(x.n, l_top, theta);
            let lo = x.n.unsigned_abs();
            let s: Complex<T> = x.coeffs.iter().map(|&(l, p)| i_pow::<T>(l as i64) * p * y[(l - lo) as usize] * rows[l as usize][0]).sum();
            out[mu_index(x.mu)] = out[mu_index(x.mu)] + s * cis(T::from_int(x.n as i64) * phi);
        }
        Ok(out)
    }

    /// Unnormalized samples on `grid`, layout `[r][ϑ][φ][μ]`.
    pub fn raw_grid(&self, mus: &[i32], grid: &FieldGrid<T>, t: T) -> Result<Vec<Complex<T>>, SynthesisError> {
        let terms = self.terms(mus);
        let rows = self.radial_rows(&terms, &grid.r, t)?;
        let (nt, np) = (grid.theta.len(), grid.phi.len());
        // angular weights i^l Y_l^n(ϑ, 0) P_{l,n} per term and polar angle
        let ang: Vec<Vec<Vec<Complex<T>>>> = terms
            .iter()
            .map(|x| {
                let l_top = x.coeffs.last().map(|c| c.0).unwrap_or(0);
                let lo = x.n.unsigned_abs();
                grid.theta
                    .iter()
                    .map(|&th| {
                        let y = normalized_legendre_column(x.n, l_top, th);
                        x.coeffs.iter().map(|&(l, p)| i_pow::<T>(l as i64) * p * y[(l - lo) as usize]).collect()
                    })
                    .collect()
            })
            .collect();
        let phases: Vec<Vec<Complex<T>>> =
            terms.iter().map(|x| grid.phi.iter().map(|&f| cis(T::from_int(x.n as i64) * f)).collect()).collect();
        let block = nt * np * 3;
        let mut values = vec![czero(); grid.r.len() * block];
        values.par_chunks_mut(block).enumerate().for_each(|(ir, out)| {
            for (ti, x) in terms.iter().enumerate() {
                let iu = mu_index(x.mu);
                for it in 0..nt {
                    let s: Complex<T> =
                        x.coeffs.iter().zip(&ang[ti][it]).map(|(&(l, _), a)| *a * rows[l as usize][ir]).sum();
                    for ip in 0..np {
                        let k = (it * np + ip) * 3 + iu;
                        out[k] = out[k] + s * phases[ti][ip];
                    }
                }
            }
        });
        Ok(values)
    }

    pub fn synthesize(&self, grid: &FieldGrid<T>, t: T) -> Result<PositionField<T>, SynthesisError> {
        self.require_accepted(&[-1, 0, 1])?;
        let mut values = self.raw_grid(&[-1, 0, 1], grid, t)?;
        let peak = values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
        if peak == T::zero() {
            return Err(SynthesisError::ZeroField);
        }
        let normalization = peak.recip();
        for v in &mut values {
            *v = *v * normalization;
        }
        Ok(PositionField {
            grid: grid.clone(),
            t,
            values,
            normalization,
            m: self.spec.m,
            l_max: self.coefficients.l_max(),
            tail_estimate: self.coefficients.max_tail(),
        })
    }
}

/// `E_μ` on `grid` at time `t`, normalized so the grid peak is 1.
pub fn synthesize_field<T: Real>(
    spec: &LocalizedStateSpec<T>,
    grid: &FieldGrid<T>,
    t: T,
) -> Result<PositionField<T>, SynthesisError> {
    FieldSynthesizer::new(spec)?.synthesize(grid, t)
}

/// The momentum-space state `f(p) g(θ) c(θ, φ) e_λ(θ, φ)` sampled on an operator grid.
pub fn momentum_wavefunction<T: Real>(
    spec: &LocalizedStateSpec<T>,
    lambda: i32,
    grid: Arc<MomentumGrid<T>>,
    alpha: T,
) -> VectorWavefunction<T> {
    VectorWavefunction::from_fn(grid, alpha, |p, theta, phi| {
        let f = spec.radial.eval(p);
        let mut v = spec.amplitude(lambda, theta, phi);
        for x in &mut v {
            *x = *x * f;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{AngularWeight, HelicitySelection, RadialSpectrum};

    fn spec(m: i32) -> LocalizedStateSpec<f64> {
        LocalizedStateSpec::new(
            m,
            HelicitySelection::Plus,
            RadialSpectrum::Exponential { p0: 1.0 },
            AngularWeight::SinPower(m.unsigned_abs() + 1),
        )
    }

    #[test]
    fn normalized_and_pure() {
        let grid = FieldGrid::uniform(6.0, 13, 9, 16).unwrap();
        let f = synthesize_field(&spec(1), &grid, 0.0).unwrap();
        assert!((f.peak() - 1.0).abs() < 1e-14);
        for mu in [-1, 0, 1] {
            let (n, off) = f.azimuthal_purity(mu);
            assert_eq!(n, 1 - mu);
            assert!(off < 1e-10, "mu={mu}: {off:e}");
        }
    }

    #[test]
    fn axis_components_vanish() {
        let grid = FieldGrid::uniform(5.0, 11, 7, 8).unwrap();
        let f = synthesize_field(&spec(1), &grid, 0.0).unwrap();
        let last = grid.theta.len() - 1;
        for ir in 0..grid.r.len() {
            for ip in 0..grid.phi.len() {
                for it in [0, last] {
                    assert!(f.value(ir, it, ip, 0).norm() < 1e-12);
                    assert!(f.value(ir, it, ip, -1).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn point_and_grid_agree() {
        let s = FieldSynthesizer::new(&spec(2)).unwrap();
        let grid = FieldGrid::new(vec![1.3], vec![0.7], vec![2.1]).unwrap();
        let g = s.raw_grid(&[-1, 0, 1], &grid, 0.4).unwrap();
        let p = s.raw_point(&[-1, 0, 1], 1.3, 0.7, 2.1, 0.4).unwrap();
        for k in 0..3 {
            assert!((g[k] - p[k]).norm() < 1e-14 * (1.0 + p[k].norm()));
        }
    }

    #[test]
    fn csv_layout() {
        let grid = FieldGrid::uniform(2.0, 2, 2, 2).unwrap();
        let f = synthesize_field(&spec(0), &grid, 0.0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "r,theta,phi,t,mu,re,im,abs2");
        assert_eq!(lines.len(), 1 + 2 * 2 * 2 * 3);
        assert!(lines[1].starts_with("0e0,0e0,0e0,0e0,-1,"));
    }

    #[test]
    fn truncated_runs_are_refused() {
        let s = LocalizedStateSpec::new(1, HelicitySelection::Plus, RadialSpectrum::Exponential { p0: 1.0 }, AngularWeight::One)
            .with_l_max(12);
        let grid = FieldGrid::uniform(2.0, 3, 3, 4).unwrap();
        assert!(matches!(synthesize_field(&s, &grid, 0.0), Err(SynthesisError::Truncation { mu: -1, .. })));
    }
}
