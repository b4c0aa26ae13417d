use serde::Serialize;

use super::apply::Ops;
use super::wavefunction::VectorWavefunction;
use super::{levi_civita, Axis, OperatorError};
use crate::gauge::{helicity_vector, GaugeSpec};
use crate::scalar::{cis, cplx, Real};

/// Relative residuals below this are treated as roundoff and get no order.
const ROUNDOFF: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorReport {
    pub name: String,
    pub residual_norm: f64,
    pub reference_norm: f64,
    pub grid_resolution: (usize, usize, usize),
    pub convergence_order: Option<f64>,
}

impl OperatorReport {
    fn new<T: Real>(name: impl Into<String>, residual: T, reference: T, psi: &VectorWavefunction<T>) -> Self {
        Self {
            name: name.into(),
            residual_norm: residual.as_f64(),
            reference_norm: reference.as_f64(),
            grid_resolution: psi.grid.spec.resolution(),
            convergence_order: None,
        }
    }

    /// `residual_norm / reference_norm`.
    pub fn relative(&self) -> f64 {
        if self.reference_norm == 0.0 {
            self.residual_norm
        } else {
            self.residual_norm / self.reference_norm
        }
    }
}

/// Attaches the observed order from a coarse run, taking `h ∝ 1/N_θ`.
pub fn with_order(coarse: &OperatorReport, mut fine: OperatorReport) -> OperatorReport {
    let (ec, ef) = (coarse.relative(), fine.relative());
    let ratio = fine.grid_resolution.1 as f64 / coarse.grid_resolution.1 as f64;
    fine.convergence_order = if ec > ROUNDOFF && ef > 0.0 && ratio > 1.0 {
        Some((ec / ef).ln() / ratio.ln())
    } else {
        None
    };
    fine
}

/// `‖r^(χ) ψ‖ / ‖ψ‖` over all three components.
pub fn eigenrelation<T: Real>(psi: &VectorWavefunction<T>, gauge: &GaugeSpec<T>) -> Result<OperatorReport, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(gauge))?;
    let r = ops.position_all(psi)?;
    let res = r.iter().map(|v| v.norm().powi(2)).sum::<T>().sqrt();
    Ok(OperatorReport::new(format!("eigenrelation[{gauge}, alpha={}]", psi.alpha), res, psi.norm(), psi))
}

/// `‖[r_j, r_k] ψ‖ / ‖ψ‖`.
pub fn commutator_r_r<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    j: Axis,
    k: Axis,
) -> Result<OperatorReport, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(gauge))?;
    let rk = ops.position(psi, k.index())?;
    let rj = ops.position(psi, j.index())?;
    let c = ops.position(&rk, j.index())?.sub(&ops.position(&rj, k.index())?);
    Ok(OperatorReport::new(format!("[r_{},r_{}][{gauge}]", j.name(), k.name()), c.norm(), psi.norm(), psi))
}

#[derive(Debug, Clone, Serialize)]
pub struct JrCommutator {
    /// Residual of `[J_j, r_k] - iε_{jkl} r_l + i(∂_k n_j)(p̂·S)`.
    pub report: OperatorReport,
    /// Same with `r_k` in place of `r_l`.
    pub printed_form: OperatorReport,
    /// `‖(∂_k n_j)(p̂·S) ψ‖ / ‖ψ‖`.
    pub gauge_term: f64,
}

pub fn commutator_j_r<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    j: Axis,
    k: Axis,
) -> Result<JrCommutator, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(gauge))?;
    let (jj, kk) = (j.index(), k.index());
    let rk = ops.position(psi, kk)?;
    let lhs = ops.total_j(&rk, jj).sub(&ops.position(&ops.total_j(psi, jj), kk)?);
    let gt = ops.gauge_term(psi, jj, kk);
    let i = cplx(T::zero(), T::one());
    let mut contracted = lhs.add_scaled(i, &gt);
    let mut printed = contracted.clone();
    for l in 0..3 {
        let e = levi_civita(jj, kk, l);
        if e != 0 {
            let s = cplx(T::zero(), -T::from_int(e as i64));
            contracted = contracted.add_scaled(s, &ops.position(psi, l)?);
            printed = printed.add_scaled(s, &rk);
        }
    }
    let n = psi.norm();
    let name = |form: &str| format!("[J_{},r_{}]{form}[{gauge}]", j.name(), k.name());
    Ok(JrCommutator {
        report: OperatorReport::new(name(""), contracted.norm(), n, psi),
        printed_form: OperatorReport::new(name(" printed"), printed.norm(), n, psi),
        gauge_term: (gt.norm() / n).as_f64(),
    })
}

/// Largest pointwise `|(∂n_z/∂p_k)(p̂·S) ψ|` over `k`, relative to `max|ψ|`.
pub fn jz_gauge_term<T: Real>(psi: &VectorWavefunction<T>, gauge: &GaugeSpec<T>) -> Result<f64, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(gauge))?;
    let peak = psi.max_abs();
    let worst = (0..3).map(|k| ops.gauge_term(psi, 2, k).max_abs()).fold(T::zero(), |a, b| a.max(b));
    Ok((worst / peak).as_f64())
}

#[derive(Debug, Clone, Serialize)]
pub struct UncertaintyReport {
    pub j: Axis,
    pub k: Axis,
    pub delta_j: f64,
    pub delta_r: f64,
    pub mean_r: f64,
    /// `½ |⟨(∂_k n_j)(p̂·S)⟩|`.
    pub bound: f64,
    pub satisfied: bool,
    pub delta_j2: f64,
    /// `Σ_j |⟨J_j (∂_k n_j)(p̂·S)⟩|`.
    pub j2_bound_printed: f64,
    /// `½ |⟨[J², r_k]⟩|`.
    pub j2_bound_commutator: f64,
    pub j2_printed_satisfied: bool,
    pub j2_commutator_satisfied: bool,
}

fn spread<T: Real>(psi: &VectorWavefunction<T>, a_psi: &VectorWavefunction<T>, norm2: T) -> (T, T) {
    let mean = psi.inner(a_psi).re / norm2;
    let second = a_psi.inner(a_psi).re / norm2;
    (mean, (second - mean * mean).max(T::zero()).sqrt())
}

/// Both sides of `ΔJ_j Δr_k ≥ ½|⟨∂S_j/∂p_k⟩|` and of the `J²` variant.
pub fn uncertainty_check<T: Real>(
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    j: Axis,
    k: Axis,
    tolerance: f64,
) -> Result<UncertaintyReport, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(gauge))?;
    let (jj, kk) = (j.index(), k.index());
    let n2 = psi.inner(psi).re;
    let jpsi = ops.total_j(psi, jj);
    let rpsi = ops.position(psi, kk)?;
    let (_, delta_j) = spread(psi, &jpsi, n2);
    let (mean_r, delta_r) = spread(psi, &rpsi, n2);
    let bound = psi.inner(&ops.gauge_term(psi, jj, kk)).norm() / n2 / T::lit(2.0);

    let jcomp: Vec<_> = (0..3).map(|c| ops.total_j(psi, c)).collect();
    let j2 = jcomp
        .iter()
        .enumerate()
        .map(|(c, v)| ops.total_j(v, c))
        .reduce(|a, b| a.add_scaled(cplx(T::one(), T::zero()), &b))
        .expect("three components");
    let (_, delta_j2) = spread(psi, &j2, n2);
    let printed = (0..3)
        .map(|c| psi.inner(&ops.total_j(&ops.gauge_term(psi, c, kk), c)).norm())
        .sum::<T>()
        / n2;
    let comm = {
        let j2r = {
            let mut acc = None::<VectorWavefunction<T>>;
            for c in 0..3 {
                let t = ops.total_j(&ops.total_j(&rpsi, c), c);
                acc = Some(match acc {
                    None => t,
                    Some(a) => a.add_scaled(cplx(T::one(), T::zero()), &t),
                });
            }
            acc.expect("three components")
        };
        let rj2 = ops.position(&j2, kk)?;
        psi.inner(&j2r.sub(&rj2)).norm() / n2 / T::lit(2.0)
    };
    let f = |v: T| v.as_f64();
    let lhs = f(delta_j * delta_r);
    let lhs2 = f(delta_j2 * delta_r);
    Ok(UncertaintyReport {
        j,
        k,
        delta_j: f(delta_j),
        delta_r: f(delta_r),
        mean_r: f(mean_r),
        bound: f(bound),
        satisfied: lhs >= f(bound) - tolerance,
        delta_j2: f(delta_j2),
        j2_bound_printed: f(printed),
        j2_bound_commutator: f(comm),
        j2_printed_satisfied: lhs2 >= f(printed) - tolerance,
        j2_commutator_satisfied: lhs2 >= f(comm) - tolerance,
    })
}

/// Sign of `⟨ψ, (p̂·S) ψ⟩`.
fn dominant_helicity<T: Real>(ops: &Ops<T>, psi: &VectorWavefunction<T>) -> i32 {
    let nf = ops.grid.n_phi();
    let h = psi.map_pointwise(|_, it, k, v| ops.angle.pds[it * nf + k].apply(&v));
    if psi.inner(&h).re >= T::zero() {
        1
    } else {
        -1
    }
}

/// Residual of `(T r T⁻¹ - r + λ∇(χ'-χ)) ψ` with `T = e^{-iλ(χ'-χ)}` and
/// `r = r^(χ)` of the source gauge.
pub fn gauge_covariance_check<T: Real>(
    psi: &VectorWavefunction<T>,
    from: &GaugeSpec<T>,
    to: &GaugeSpec<T>,
    axis: Axis,
) -> Result<OperatorReport, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(from))?;
    let target = Ops::new(psi.grid.clone(), Some(to))?;
    let (gf, gt) = (ops.gauge.as_ref().expect("gauge"), target.gauge.as_ref().expect("gauge"));
    let lambda = T::from_int(dominant_helicity(&ops, psi) as i64);
    let nf = ops.grid.n_phi();
    let j = axis.index();
    let phase = |a: usize, sign: T| cis(-sign * lambda * (gt.chi[a] - gf.chi[a]));
    let inv = psi.map_pointwise(|_, it, k, v| {
        let t = phase(it * nf + k, -T::one());
        v.map(|c| c * t)
    });
    let conj = ops.position(&inv, j)?.map_pointwise(|_, it, k, v| {
        let t = phase(it * nf + k, T::one());
        v.map(|c| c * t)
    });
    let shift = psi.map_pointwise(|ip, it, k, v| {
        let a = it * nf + k;
        let g = lambda * (gt.grad_chi[a][j] - gf.grad_chi[a][j]) / ops.grid.p[ip];
        v.map(|c| c * g)
    });
    let res = conj.sub(&ops.position(psi, j)?).add_scaled(cplx(T::one(), T::zero()), &shift);
    Ok(OperatorReport::new(format!("covariance[{from}->{to}, r_{}]", axis.name()), res.norm(), psi.norm(), psi))
}

/// Residual of `r^(χ') (Tψ) - T r^(χ) ψ`, which vanishes on a helicity subspace.
pub fn gauge_consistency_check<T: Real>(
    psi: &VectorWavefunction<T>,
    from: &GaugeSpec<T>,
    to: &GaugeSpec<T>,
    axis: Axis,
) -> Result<OperatorReport, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(from))?;
    let target = Ops::new(psi.grid.clone(), Some(to))?;
    let (gf, gt) = (ops.gauge.as_ref().expect("gauge"), target.gauge.as_ref().expect("gauge"));
    let lambda = T::from_int(dominant_helicity(&ops, psi) as i64);
    let nf = ops.grid.n_phi();
    let j = axis.index();
    let rotate = |w: &VectorWavefunction<T>| {
        w.map_pointwise(|_, it, k, v| {
            let a = it * nf + k;
            let t = cis(-lambda * (gt.chi[a] - gf.chi[a]));
            v.map(|c| c * t)
        })
    };
    let res = target.position(&rotate(psi), j)?.sub(&rotate(&ops.position(psi, j)?));
    Ok(OperatorReport::new(format!("consistency[{from}->{to}, r_{}]", axis.name()), res.norm(), psi.norm(), psi))
}

/// `‖(1 - P_λ) φ‖ / ‖φ‖` with `P_λ` the pointwise projector on `e_λ`.
pub fn helicity_leakage<T: Real>(phi: &VectorWavefunction<T>, lambda: i32) -> f64 {
    let g = phi.grid.clone();
    let zero = GaugeSpec::zero();
    let rest = phi.map_pointwise(|_, it, k, v| {
        let e = helicity_vector(lambda, g.theta[it], g.phi[k], &zero);
        let amp = e.iter().zip(&v).fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        [0, 1, 2].map(|c| v[c] - e[c] * amp)
    });
    (rest.norm() / phi.norm()).as_f64()
}

/// `|⟨φ, rψ⟩ - ⟨rφ, ψ⟩| / (‖φ‖ ‖ψ‖)`.
pub fn hermiticity_defect<T: Real>(
    phi: &VectorWavefunction<T>,
    psi: &VectorWavefunction<T>,
    gauge: &GaugeSpec<T>,
    axis: Axis,
) -> Result<f64, OperatorError> {
    let ops = Ops::new(psi.grid.clone(), Some(gauge))?;
    let a = phi.inner(&ops.position(psi, axis.index())?);
    let b = ops.position(phi, axis.index())?.inner(psi);
    Ok(((a - b).norm() / (phi.norm() * psi.norm())).as_f64())
}
