use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, MomentumGrid, PSpacing};
use super::OperatorError;
use crate::gauge::{helicity_vector, GaugeSpec};
use crate::scalar::{cis, cplx, czero, Real};
use crate::specfun::{Vec3c, MU_VALUES};

/// Three spherical components sampled on a [`MomentumGrid`].
///
/// Storage is `[μ][p][θ][φ]`, `μ` running `-1, 0, +1`.
#[derive(Debug, Clone)]
pub struct VectorWavefunction<T: Real> {
    pub grid: Arc<MomentumGrid<T>>,
    pub values: Vec<Complex<T>>,
    /// Exponent in the `p^α` weighting of the position operator.
    pub alpha: T,
}

impl<T: Real> VectorWavefunction<T> {
    pub fn zeros(grid: Arc<MomentumGrid<T>>, alpha: T) -> Self {
        let n = 3 * grid.points();
        Self { grid, values: vec![czero(); n], alpha }
    }

    /// Samples `f(p, θ, φ)` at every node.
    pub fn from_fn<F>(grid: Arc<MomentumGrid<T>>, alpha: T, f: F) -> Self
    where
        F: Fn(T, T, T) -> Vec3c<T> + Sync,
    {
        let g = grid.clone();
        let mut out = Self::zeros(grid, alpha);
        out.fill_pointwise(|ip, it, k, _| f(g.p[ip], g.theta[it], g.phi[k]));
        out
    }

    pub fn block(&self) -> usize {
        self.grid.points()
    }

    #[inline]
    pub fn index(&self, mu: i32, ip: usize, it: usize, k: usize) -> usize {
        let g = &self.grid;
        (((mu + 1) as usize * g.n_p() + ip) * g.n_theta() + it) * g.n_phi() + k
    }

    pub fn component(&self, mu: i32) -> &[Complex<T>] {
        let b = self.block();
        &self.values[(mu + 1) as usize * b..(mu + 2) as usize * b]
    }

    pub fn point(&self, ip: usize, it: usize, k: usize) -> Vec3c<T> {
        MU_VALUES.map(|mu| self.values[self.index(mu, ip, it, k)])
    }

    /// Replaces every point value by `f(ip, iθ, iφ, current)`.
    pub(crate) fn fill_pointwise<F>(&mut self, f: F)
    where
        F: Fn(usize, usize, usize, Vec3c<T>) -> Vec3c<T> + Sync,
    {
        let b = self.block();
        let (nt, nf) = (self.grid.n_theta(), self.grid.n_phi());
        let plane = nt * nf;
        let (m, rest) = self.values.split_at_mut(b);
        let (z, p) = rest.split_at_mut(b);
        m.par_chunks_mut(plane)
            .zip(z.par_chunks_mut(plane))
            .zip(p.par_chunks_mut(plane))
            .enumerate()
            .for_each(|(ip, ((m, z), p))| {
                for it in 0..nt {
                    for k in 0..nf {
                        let i = it * nf + k;
                        let v = f(ip, it, k, [m[i], z[i], p[i]]);
                        m[i] = v[0];
                        z[i] = v[1];
                        p[i] = v[2];
                    }
                }
            });
    }

    /// Pointwise map into a fresh wavefunction with the same grid and `α`.
    pub fn map_pointwise<F>(&self, f: F) -> Self
    where
        F: Fn(usize, usize, usize, Vec3c<T>) -> Vec3c<T> + Sync,
    {
        let mut out = self.clone();
        out.fill_pointwise(f);
        out
    }

    /// `⟨self, other⟩` with the `p^{-2α}` measure of `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let g = &self.grid;
        let (nt, nf) = (g.n_theta(), g.n_phi());
        let plane = nt * nf;
        let b = self.block();
        // per-shell partial sums are collected and added in order so results
        // do not depend on the thread count
        let shells: Vec<Complex<T>> = (0..g.n_p())
            .into_par_iter()
            .map(|ip| {
                let mut acc = czero::<T>();
                for it in 0..nt {
                    let w = g.measure(ip, it, self.alpha);
                    let mut row = czero::<T>();
                    for c in 0..3 {
                        let base = c * b + ip * plane + it * nf;
                        for k in 0..nf {
                            row = row + self.values[base + k].conj() * other.values[base + k];
                        }
                    }
                    acc = acc + row * w;
                }
                acc
            })
            .collect();
        shells.into_iter().fold(czero(), |a, b| a + b)
    }

    pub fn norm(&self) -> T {
        self.inner(self).re.max(T::zero()).sqrt()
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        out.values.par_iter_mut().for_each(|v| *v = *v * s);
        out
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: Complex<T>, other: &Self) -> Self {
        let mut out = self.clone();
        out.values.par_iter_mut().zip(&other.values).for_each(|(a, b)| *a = *a + *b * s);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(cplx(-T::one(), T::zero()), other)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest modulus on the first or last `p` shell relative to the peak.
    pub fn boundary_decay(&self) -> T {
        let peak = self.max_abs();
        if peak == T::zero() {
            return T::zero();
        }
        let g = &self.grid;
        let last = g.n_p() - 1;
        let mut worst = T::zero();
        for mu in MU_VALUES {
            for it in 0..g.n_theta() {
                for k in 0..g.n_phi() {
                    worst = worst
                        .max(self.values[self.index(mu, 0, it, k)].norm())
                        .max(self.values[self.index(mu, last, it, k)].norm());
                }
            }
        }
        worst / peak
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Text export: `#` header lines with the grid, then CSV rows
    /// `ip,itheta,iphi,mu,re,im` ordered by `ip`, `itheta`, `iphi`, `mu`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<(), OperatorError> {
        let s = &self.grid.spec;
        writeln!(w, "# photon-gauge-kit wavefunction v1")?;
        writeln!(w, "# alpha = {}", self.alpha)?;
        writeln!(w, "# n_p = {}", s.n_p)?;
        writeln!(w, "# p_min = {}", s.p_min)?;
        writeln!(w, "# p_max = {}", s.p_max)?;
        writeln!(w, "# p_spacing = {}", s.p_spacing)?;
        writeln!(w, "# n_theta = {}", s.n_theta)?;
        writeln!(w, "# n_phi = {}", s.n_phi)?;
        writeln!(w, "# p_stencil = {}", s.p_stencil)?;
        writeln!(w, "# theta_stencil = {}", s.theta_stencil)?;
        writeln!(w, "ip,itheta,iphi,mu,re,im")?;
        for ip in 0..s.n_p {
            for it in 0..s.n_theta {
                for k in 0..s.n_phi {
                    for mu in MU_VALUES {
                        let v = self.values[self.index(mu, ip, it, k)];
                        writeln!(w, "{ip},{it},{k},{mu},{},{}", v.re, v.im)?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self, OperatorError> {
        let bad = |m: String| OperatorError::Format(m);
        let mut header = std::collections::BTreeMap::new();
        let mut lines = r.lines().enumerate();
        let mut saw_columns = false;
        for (n, line) in lines.by_ref() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    header.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if line.trim() != "ip,itheta,iphi,mu,re,im" {
                return Err(bad(format!("line {}: expected column header", n + 1)));
            }
            saw_columns = true;
            break;
        }
        if !saw_columns {
            return Err(bad("missing column header".into()));
        }
        let get = |k: &str| header.get(k).ok_or_else(|| bad(format!("missing header key `{k}`")));
        let num = |k: &str| -> Result<f64, OperatorError> {
            get(k)?.parse::<f64>().map_err(|e| bad(format!("header `{k}`: {e}")))
        };
        let int = |k: &str| -> Result<usize, OperatorError> {
            get(k)?.parse::<usize>().map_err(|e| bad(format!("header `{k}`: {e}")))
        };
        let spacing = match get("p_spacing")?.as_str() {
            "uniform" => PSpacing::Uniform,
            "geometric" => PSpacing::Geometric,
            other => return Err(bad(format!("unknown p_spacing `{other}`"))),
        };
        let spec = GridSpec {
            n_p: int("n_p")?,
            p_min: num("p_min")?,
            p_max: num("p_max")?,
            p_spacing: spacing,
            n_theta: int("n_theta")?,
            n_phi: int("n_phi")?,
            p_stencil: int("p_stencil")?,
            theta_stencil: int("theta_stencil")?,
        };
        let grid = Arc::new(MomentumGrid::new(spec)?);
        let mut out = Self::zeros(grid, T::lit(num("alpha")?));
        let mut count = 0usize;
        for (n, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(format!("line {}: expected 6 fields", n + 1)));
            }
            let idx = |s: &str| s.trim().parse::<i64>().map_err(|e| bad(format!("line {}: {e}", n + 1)));
            let val = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("line {}: {e}", n + 1)));
            let (ip, it, k, mu) = (idx(f[0])?, idx(f[1])?, idx(f[2])?, idx(f[3])?);
            if ip < 0
                || it < 0
                || k < 0
                || !(-1..=1).contains(&mu)
                || ip as usize >= spec.n_p
                || it as usize >= spec.n_theta
                || k as usize >= spec.n_phi
            {
                return Err(bad(format!("line {}: index out of range", n + 1)));
            }
            let i = out.index(mu as i32, ip as usize, it as usize, k as usize);
            out.values[i] = cplx(T::lit(val(f[4])?), T::lit(val(f[5])?));
            count += 1;
        }
        if count != out.values.len() {
            return Err(bad(format!("expected {} rows, found {count}", out.values.len())));
        }
        Ok(out)
    }
}

/// `Ψ_{0,λ} = p^α e_λ^(χ)`, the localized state at the origin.
pub fn basis_state<T: Real>(grid: Arc<MomentumGrid<T>>, lambda: i32, gauge: &GaugeSpec<T>, alpha: T) -> VectorWavefunction<T> {
    VectorWavefunction::from_fn(grid, alpha, |p, t, f| {
        helicity_vector(lambda, t, f, gauge).map(|c| c * p.powf(alpha))
    })
}

/// `e^{-i r'·p} Ψ_{0,λ}`, localized at `r'`.
pub fn translated_basis_state<T: Real>(
    grid: Arc<MomentumGrid<T>>,
    lambda: i32,
    gauge: &GaugeSpec<T>,
    alpha: T,
    centre: [T; 3],
) -> VectorWavefunction<T> {
    VectorWavefunction::from_fn(grid, alpha, |p, t, f| {
        let [x, y, z] = crate::gauge::spherical_unit_vectors(t, f)[0].map(|v| v * p);
        let phase = cis(-(centre[0] * x + centre[1] * y + centre[2] * z));
        helicity_vector(lambda, t, f, gauge).map(|c| c * phase * p.powf(alpha))
    })
}

/// Smooth single-helicity test state:
/// `exp(-(p-p_c)²/2σ²) sin^k θ (1 + tilt cos θ + azimuthal sin θ e^{iφ}) e_λ^(χ)`,
/// with `k = |m| + 2` for gauge `χ = -mφ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestState {
    pub lambda: i32,
    pub centre: f64,
    pub width: f64,
    pub tilt: f64,
    pub azimuthal: f64,
}

impl Default for TestState {
    fn default() -> Self {
        Self { lambda: 1, centre: 3.5, width: 0.36, tilt: 0.3, azimuthal: 0.2 }
    }
}

pub fn test_state<T: Real>(grid: Arc<MomentumGrid<T>>, spec: &TestState, gauge: &GaugeSpec<T>, alpha: T) -> VectorWavefunction<T> {
    let k = gauge.linear_m().unwrap_or(0).unsigned_abs() as i32 + 2;
    let (c, w) = (T::lit(spec.centre), T::lit(spec.width));
    let (tilt, az) = (T::lit(spec.tilt), T::lit(spec.azimuthal));
    VectorWavefunction::from_fn(grid, alpha, |p, t, f| {
        let radial = (-(p - c).powi(2) / (T::lit(2.0) * w * w)).exp();
        let (s, co) = t.sin_cos();
        let ang = (cis(f) * (az * s) + cplx(T::one() + tilt * co, T::zero())) * s.powi(k);
        helicity_vector(spec.lambda, t, f, gauge).map(|e| e * ang * radial)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<MomentumGrid<f64>> {
        Arc::new(MomentumGrid::new(GridSpec::COARSE).unwrap())
    }

    #[test]
    fn text_round_trip_is_exact() {
        let g = Arc::new(MomentumGrid::new(GridSpec { n_p: 9, n_theta: 9, n_phi: 8, ..GridSpec::COARSE }).unwrap());
        let psi = test_state(g, &TestState::default(), &GaugeSpec::linear(1), 0.5);
        let mut buf = Vec::new();
        psi.write_text(&mut buf).unwrap();
        let back = VectorWavefunction::<f64>::read_text(buf.as_slice()).unwrap();
        assert_eq!(back.values, psi.values);
        assert_eq!(back.alpha, 0.5);
        assert_eq!(back.grid.spec, psi.grid.spec);
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(first, "ip,itheta,iphi,mu,re,im");
    }

    #[test]
    fn truncated_text_is_rejected() {
        let g = Arc::new(MomentumGrid::new(GridSpec { n_p: 9, n_theta: 9, n_phi: 8, ..GridSpec::COARSE }).unwrap());
        let psi = basis_state(g, 1, &GaugeSpec::zero(), 0.5);
        let mut buf = Vec::new();
        psi.write_text(&mut buf).unwrap();
        buf.truncate(buf.len() - 40);
        assert!(VectorWavefunction::<f64>::read_text(buf.as_slice()).is_err());
    }

    #[test]
    fn norm_of_unit_vector_field() {
        // |e_λ| = 1 so ‖p^α e_λ‖² = ∫ p² dp · 4π
        let g = grid();
        let psi = basis_state(g.clone(), -1, &GaugeSpec::linear(2), 0.5);
        let radial: f64 = g.p.iter().zip(&g.p_weights).map(|(p, w)| w * p * p).sum();
        assert!((psi.norm().powi(2) - 4.0 * std::f64::consts::PI * radial).abs() < 1e-10);
    }

    #[test]
    fn test_state_decays_at_boundary() {
        let psi = test_state(grid(), &TestState::default(), &GaugeSpec::zero(), 0.5);
        assert!(psi.boundary_decay() < 1e-10);
        assert!(psi.is_finite());
    }
}
