use std::sync::Arc;

use num_complex::Complex;

use super::grid::MomentumGrid;
use super::wavefunction::VectorWavefunction;
use super::{Axis, OperatorError};
use crate::gauge::{gauge_gradient, p_dot_s, spherical_unit_vectors, spin_axis, GaugeError, GaugeSpec};
use crate::scalar::{cplx, czero, Real};
use crate::specfun::{spin_matrices, Mat3, Vec3c};

/// Gauge-independent pointwise data, indexed by `iθ * n_phi + iφ`.
pub(crate) struct AngleFields<T: Real> {
    pub rhat: Vec<[T; 3]>,
    pub that: Vec<[T; 3]>,
    pub fhat: Vec<[T; 3]>,
    pub inv_sin: Vec<T>,
    pub pds: Vec<Mat3<T>>,
    pub pxs: Vec<[Mat3<T>; 3]>,
    pub spin: [Mat3<T>; 3],
}

impl<T: Real> AngleFields<T> {
    pub fn new(grid: &MomentumGrid<T>) -> Self {
        let spin = spin_matrices::<T>();
        let n = grid.n_theta() * grid.n_phi();
        let mut f = Self {
            rhat: Vec::with_capacity(n),
            that: Vec::with_capacity(n),
            fhat: Vec::with_capacity(n),
            inv_sin: grid.theta.iter().map(|t| T::one() / t.sin()).collect(),
            pds: Vec::with_capacity(n),
            pxs: Vec::with_capacity(n),
            spin,
        };
        for &t in &grid.theta {
            for &p in &grid.phi {
                let [r, th, ph] = spherical_unit_vectors(t, p);
                f.rhat.push(r);
                f.that.push(th);
                f.fhat.push(ph);
                f.pds.push(p_dot_s(t, p));
                let re = |v: T| cplx(v, T::zero());
                f.pxs.push([0, 1, 2].map(|j| {
                    let (k, l) = ((j + 1) % 3, (j + 2) % 3);
                    spin[l].scale(re(r[k])) - spin[k].scale(re(r[l]))
                }));
            }
        }
        f
    }
}

/// Gauge-dependent pointwise data at `|p| = 1` on the grid angles.
#[derive(Debug, Clone)]
pub struct GaugeFields<T: Real> {
    pub gauge: GaugeSpec<T>,
    /// `p a^(χ)`.
    pub a: Vec<[T; 3]>,
    /// `n = a×p + p̂`, with `S^(χ) = n (S·p̂)`.
    pub n: Vec<[T; 3]>,
    /// `dn[k][j] = p ∂n_j/∂p_k`.
    pub dn: Vec<[[T; 3]; 3]>,
    /// `p ∇χ`.
    pub grad_chi: Vec<[T; 3]>,
    pub chi: Vec<T>,
    /// `θ` rows inside the string exclusion zone.
    pub excluded: Vec<bool>,
}

impl<T: Real> GaugeFields<T> {
    pub fn new(grid: &MomentumGrid<T>, gauge: &GaugeSpec<T>) -> Result<Self, GaugeError> {
        let n = grid.n_theta() * grid.n_phi();
        let zero3 = [T::zero(); 3];
        let mut out = Self {
            gauge: gauge.clone(),
            a: vec![zero3; n],
            n: vec![zero3; n],
            dn: vec![[zero3; 3]; n],
            grad_chi: vec![zero3; n],
            chi: vec![T::zero(); n],
            excluded: vec![false; grid.n_theta()],
        };
        for (it, &t) in grid.theta.iter().enumerate() {
            if gauge.check_off_string(t).is_err() {
                out.excluded[it] = true;
                continue;
            }
            for (k, &f) in grid.phi.iter().enumerate() {
                let i = it * grid.n_phi() + k;
                out.a[i] = crate::gauge::gauge_potential(gauge, T::one(), t, f)?.vector;
                out.n[i] = spin_axis(gauge, t, f)?;
                out.dn[i] = spin_axis_jacobian(gauge, t, f)?;
                out.grad_chi[i] = gauge_gradient(gauge, T::one(), t, f)?;
                out.chi[i] = gauge.chi(t, f);
            }
        }
        Ok(out)
    }
}

/// Fourth-order central differences of `n` in Cartesian momentum at `|p| = 1`.
fn spin_axis_jacobian<T: Real>(gauge: &GaugeSpec<T>, theta: T, phi: T) -> Result<[[T; 3]; 3], GaugeError> {
    let centre = spherical_unit_vectors(theta, phi)[0];
    let h = T::lit(1e-3);
    let n_at = |x: [T; 3]| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let t = (x[2] / r).max(-T::one()).min(T::one()).acos();
        spin_axis(gauge, t, x[1].atan2(x[0]))
    };
    let mut jac = [[T::zero(); 3]; 3];
    for (k, row) in jac.iter_mut().enumerate() {
        let shifted = |s: T| {
            let mut x = centre;
            x[k] = x[k] + s * h;
            n_at(x)
        };
        let (p1, m1, p2, m2) = (shifted(T::one())?, shifted(-T::one())?, shifted(T::lit(2.0))?, shifted(T::lit(-2.0))?);
        for j in 0..3 {
            row[j] = (T::lit(8.0) * (p1[j] - m1[j]) - (p2[j] - m2[j])) / (T::lit(12.0) * h);
        }
    }
    Ok(jac)
}

/// `∂_p`, `∂_θ`, `∂_φ` of every component.
pub(crate) struct Derivs<T> {
    pub dp: Vec<Complex<T>>,
    pub dt: Vec<Complex<T>>,
    pub df: Vec<Complex<T>>,
}

pub(crate) fn derivs<T: Real>(psi: &VectorWavefunction<T>, with_p: bool) -> Derivs<T> {
    let g = &psi.grid;
    let b = psi.block();
    let mut d = Derivs {
        dp: if with_p { vec![czero(); 3 * b] } else { Vec::new() },
        dt: vec![czero(); 3 * b],
        df: vec![czero(); 3 * b],
    };
    for c in 0..3 {
        let src = &psi.values[c * b..(c + 1) * b];
        if with_p {
            g.d_p(src, &mut d.dp[c * b..(c + 1) * b]);
        }
        g.d_theta(src, &mut d.dt[c * b..(c + 1) * b]);
        g.d_phi(src, &mut d.df[c * b..(c + 1) * b]);
    }
    d
}

/// Operator kit bound to one grid and, optionally, one gauge.
pub(crate) struct Ops<T: Real> {
    pub grid: Arc<MomentumGrid<T>>,
    pub angle: AngleFields<T>,
    pub gauge: Option<GaugeFields<T>>,
}

impl<T: Real> Ops<T> {
    pub fn new(grid: Arc<MomentumGrid<T>>, gauge: Option<&GaugeSpec<T>>) -> Result<Self, OperatorError> {
        let angle = AngleFields::new(&grid);
        let gauge = gauge.map(|g| GaugeFields::new(&grid, g)).transpose()?;
        Ok(Self { grid, angle, gauge })
    }

    fn check_support(&self, psi: &VectorWavefunction<T>) -> Result<(), OperatorError> {
        let Some(gf) = &self.gauge else { return Ok(()) };
        let peak = psi.max_abs();
        for (it, &bad) in gf.excluded.iter().enumerate() {
            if !bad {
                continue;
            }
            for ip in 0..self.grid.n_p() {
                for k in 0..self.grid.n_phi() {
                    if psi.point(ip, it, k).iter().any(|v| v.norm() > T::lit(1e-12) * peak) {
                        return Err(GaugeError::StringProximity {
                            theta: self.grid.theta[it].as_f64(),
                            exclusion: gf.gauge.string_exclusion.as_f64(),
                        }
                        .into());
                    }
                }
            }
        }
        Ok(())
    }

    fn grad_component(&self, d: &Derivs<T>, j: usize, b: usize, ip: usize, a: usize, idx: usize) -> Vec3c<T> {
        let p = self.grid.p[ip];
        let it = a / self.grid.n_phi();
        let (r, t, f) = (self.angle.rhat[a][j], self.angle.that[a][j], self.angle.fhat[a][j]);
        let s = self.angle.inv_sin[it];
        [0, 1, 2].map(|c| {
            let i = c * b + idx;
            d.dp[i] * r + (d.dt[i] * t + d.df[i] * (f * s)) / p
        })
    }

    /// `r_j ψ`; includes the gauge term when a gauge is bound and `gauged`.
    pub fn position_with(&self, psi: &VectorWavefunction<T>, d: &Derivs<T>, j: usize, gauged: bool) -> VectorWavefunction<T> {
        let b = psi.block();
        let nf = self.grid.n_phi();
        let plane = self.grid.n_theta() * nf;
        let alpha = psi.alpha;
        let i_unit = cplx(T::zero(), T::one());
        let gf = if gauged { self.gauge.as_ref() } else { None };
        psi.map_pointwise(|ip, it, k, v| {
            let a = it * nf + k;
            let idx = ip * plane + a;
            let p = self.grid.p[ip];
            let g = self.grad_component(d, j, b, ip, a, idx);
            let spin = self.angle.pxs[a][j].apply(&v);
            let rj = self.angle.rhat[a][j] * alpha / p;
            let mut out = [0, 1, 2].map(|c| (g[c] - v[c] * rj) * i_unit + spin[c] / p);
            if let Some(gf) = gf {
                let aj = gf.a[a][j] / p;
                let h = self.angle.pds[a].apply(&v);
                for c in 0..3 {
                    out[c] = out[c] - h[c] * aj;
                }
            }
            out
        })
    }

    pub fn position(&self, psi: &VectorWavefunction<T>, j: usize) -> Result<VectorWavefunction<T>, OperatorError> {
        self.check_support(psi)?;
        let d = derivs(psi, true);
        Ok(self.position_with(psi, &d, j, true))
    }

    pub fn position_all(&self, psi: &VectorWavefunction<T>) -> Result<[VectorWavefunction<T>; 3], OperatorError> {
        self.check_support(psi)?;
        let d = derivs(psi, true);
        Ok([0, 1, 2].map(|j| self.position_with(psi, &d, j, true)))
    }

    pub fn total_j(&self, psi: &VectorWavefunction<T>, j: usize) -> VectorWavefunction<T> {
        let d = derivs(psi, false);
        let b = psi.block();
        let nf = self.grid.n_phi();
        let plane = self.grid.n_theta() * nf;
        let minus_i = cplx(T::zero(), -T::one());
        psi.map_pointwise(|ip, it, k, v| {
            let a = it * nf + k;
            let idx = ip * plane + a;
            let (t, f, s) = (self.angle.that[a][j], self.angle.fhat[a][j], self.angle.inv_sin[it]);
            let spin = self.angle.spin[j].apply(&v);
            [0, 1, 2].map(|c| {
                let i = c * b + idx;
                (d.dt[i] * f - d.df[i] * (t * s)) * minus_i + spin[c]
            })
        })
    }

    /// `p_l ψ`.
    pub fn times_p(&self, psi: &VectorWavefunction<T>, l: usize) -> VectorWavefunction<T> {
        let nf = self.grid.n_phi();
        psi.map_pointwise(|ip, it, k, v| {
            let s = self.grid.p[ip] * self.angle.rhat[it * nf + k][l];
            v.map(|c| c * s)
        })
    }

    pub fn l_chi(&self, psi: &VectorWavefunction<T>, j: usize) -> Result<VectorWavefunction<T>, OperatorError> {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let a = self.position(&self.times_p(psi, l), k)?;
        let b = self.position(&self.times_p(psi, k), l)?;
        Ok(a.sub(&b))
    }

    pub fn s_chi(&self, psi: &VectorWavefunction<T>, j: usize) -> Result<VectorWavefunction<T>, OperatorError> {
        self.check_support(psi)?;
        let gf = self.gauge.as_ref().expect("gauge bound");
        let nf = self.grid.n_phi();
        Ok(psi.map_pointwise(|_, it, k, v| {
            let a = it * nf + k;
            let nj = gf.n[a][j];
            self.angle.pds[a].apply(&v).map(|c| c * nj)
        }))
    }

    /// `(∂n_j/∂p_k)(p̂·S) ψ`.
    pub fn gauge_term(&self, psi: &VectorWavefunction<T>, j: usize, k: usize) -> VectorWavefunction<T> {
        let gf = self.gauge.as_ref().expect("gauge bound");
        let nf = self.grid.n_phi();
        psi.map_pointwise(|ip, it, kk, v| {
            let a = it * nf + kk;
            let s = gf.dn[a][k][j] / self.grid.p[ip];
            self.angle.pds[a].apply(&v).map(|c| c * s)
        })
    }
}

/// Cartesian gradient `(∂_x, ∂_y, ∂_z) ψ`.
pub fn gradient_p<T: Real>(psi: &VectorWavefunction<T>) -> [VectorWavefunction<T>; 3] {
    let ops = Ops { grid: psi.grid.clone(), angle: AngleFields::new(&psi.grid), gauge: None };
    let d = derivs(psi, true);
    let b = psi.block();
    let nf = ops.grid.n_phi();
    let plane = ops.grid.n_theta() * nf;
    [0, 1, 2].map(|j| psi.map_pointwise(|ip, it, k, _| ops.grad_component(&d, j, b, ip, it * nf + k, ip * plane + it * nf + k)))
}

/// Pryce operator `i(∇ - α p̂/p) + p̂×S/p`, component `axis`.
pub fn apply_pryce<T: Real>(psi: &VectorWavefunction<T>, axis: Axis) -> VectorWavefunction<T> {
    let ops = Ops { grid: psi.grid.clone(), angle: AngleFields::new(&psi.grid), gauge: None };
    let d = derivs(psi, true);
    ops.position_with(psi, &d, axis.index(), false)
}

/// `r^(χ) = r_P - a^(χ) (p̂·S)`, component `axis`.
pub fn apply_position<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    axis: Axis,
) -> Result<VectorWavefunction<T>, OperatorError> {
    Ops::new(psi.grid.clone(), Some(gauge))?.position(psi, axis.index())
}

pub fn apply_position_all<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
) -> Result<[VectorWavefunction<T>; 3], OperatorError> {
    Ops::new(psi.grid.clone(), Some(gauge))?.position_all(psi)
}

/// `J = -i p×∇ + S`.
pub fn apply_j<T: Real>(psi: &VectorWavefunction<T>, axis: Axis) -> VectorWavefunction<T> {
    let ops = Ops { grid: psi.grid.clone(), angle: AngleFields::new(&psi.grid), gauge: None };
    ops.total_j(psi, axis.index())
}

/// `L^(χ) = r^(χ) × p`.
pub fn apply_l_chi<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    axis: Axis,
) -> Result<VectorWavefunction<T>, OperatorError> {
    Ops::new(psi.grid.clone(), Some(gauge))?.l_chi(psi, axis.index())
}

/// `S^(χ) = (a^(χ)×p + p̂)(S·p̂)`.
pub fn apply_s_chi<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    axis: Axis,
) -> Result<VectorWavefunction<T>, OperatorError> {
    Ops::new(psi.grid.clone(), Some(gauge))?.s_chi(psi, axis.index())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{basis_state, GridSpec};
    use crate::scalar::cis;

    fn grid() -> Arc<MomentumGrid<f64>> {
        Arc::new(MomentumGrid::new(GridSpec::COARSE).unwrap())
    }

    fn scalar_field(g: &Arc<MomentumGrid<f64>>, f: impl Fn(f64, f64, f64) -> Complex<f64> + Sync) -> VectorWavefunction<f64> {
        VectorWavefunction::from_fn(g.clone(), 0.0, |p, t, ph| [f(p, t, ph), czero(), czero()])
    }

    fn max_err(psi: &VectorWavefunction<f64>, want: impl Fn(f64, f64, f64) -> Complex<f64>) -> f64 {
        let g = &psi.grid;
        let mut worst: f64 = 0.0;
        for ip in 2..g.n_p() - 2 {
            for it in 0..g.n_theta() {
                for k in 0..g.n_phi() {
                    let v = psi.point(ip, it, k)[0];
                    worst = worst.max((v - want(g.p[ip], g.theta[it], g.phi[k])).norm());
                }
            }
        }
        worst
    }

    #[test]
    fn gradient_examples() {
        let g = grid();
        let c = scalar_field(&g, |_, _, _| cplx(2.0, 0.0));
        for d in gradient_p(&c) {
            assert!(d.max_abs() < 1e-10);
        }
        let pz = scalar_field(&g, |p, t, _| cplx(p * t.cos(), 0.0));
        let d = gradient_p(&pz);
        assert!(max_err(&d[0], |_, _, _| czero()) < 1e-7);
        assert!(max_err(&d[2], |_, _, _| cplx(1.0, 0.0)) < 1e-7);
        let g = Arc::new(MomentumGrid::new(GridSpec { p_max: 3.0, ..GridSpec::FINE }).unwrap());
        let wave = scalar_field(&g, |p, t, f| cis(p * t.sin() * f.cos()));
        let d = gradient_p(&wave);
        let ex = max_err(&d[0], |p, t, f| cis(p * t.sin() * f.cos()) * cplx(0.0, 1.0));
        let ey = max_err(&d[1], |_, _, _| czero());
        assert!(ex < 1e-5 && ey < 1e-5, "{ex:e} {ey:e}");
    }

    #[test]
    fn pryce_on_basis_state_is_the_gauge_defect() {
        let g = grid();
        let zero = GaugeSpec::zero();
        let psi = basis_state(g.clone(), 1, &zero, 0.5);
        let ops = Ops::new(g.clone(), Some(&zero)).unwrap();
        for axis in Axis::ALL {
            let rp = apply_pryce(&psi, axis);
            let j = axis.index();
            let nf = g.n_phi();
            let defect = psi.map_pointwise(|ip, it, k, v| {
                let a = it * nf + k;
                let s = ops.gauge.as_ref().unwrap().a[a][j] / g.p[ip];
                ops.angle.pds[a].apply(&v).map(|c| c * s)
            });
            assert!(rp.sub(&defect).norm() / psi.norm() < 1e-4, "axis {axis:?}");
        }
    }

    #[test]
    fn jz_on_basis_state_gives_m() {
        let g = grid();
        for m in -2..=2 {
            let psi = basis_state(g.clone(), 1, &GaugeSpec::linear(m), 0.5);
            let jz = apply_j(&psi, Axis::Z);
            let r = jz.sub(&psi.scaled(cplx(m as f64, 0.0))).norm() / psi.norm();
            assert!(r < 1e-12, "m={m}: {r}");
        }
    }

    #[test]
    fn string_support_is_detected() {
        let g = grid();
        let wide = GaugeSpec::<f64>::zero().with_exclusion(0.2);
        let psi = basis_state(g, 1, &GaugeSpec::zero(), 0.5);
        assert!(matches!(apply_position(&psi, &wide, Axis::X), Err(OperatorError::Gauge(GaugeError::StringProximity { .. }))));
    }
}
