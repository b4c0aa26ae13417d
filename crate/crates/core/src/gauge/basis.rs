use num_complex::Complex;
use serde::Serialize;

use super::{spherical_unit_vectors, GaugeSpec};
use crate::scalar::{cis, cplx, Real};
use crate::specfun::{rotation_matrix, spin_matrices, Mat3, Vec3c, MU_VALUES};

/// Helicity basis vector `e_λ^(χ)(θ, φ) = e_λ^(0) e^{-iλχ}` in `μ` components.
///
/// On the poles the limit is taken along `φ = 0`.
pub fn helicity_vector<T: Real>(lambda: i32, theta: T, phi: T, gauge: &GaugeSpec<T>) -> Vec3c<T> {
    let phi = pole_phi(theta, phi);
    let d = rotation_matrix(phi, theta, T::zero());
    let phase = cis(-T::from_int(lambda as i64) * gauge.chi(theta, phi));
    d.column(lambda).map(|c| c * phase)
}

fn pole_phi<T: Real>(theta: T, phi: T) -> T {
    if theta <= T::zero() || theta >= T::PI() {
        T::zero()
    } else {
        phi
    }
}

/// `Σ_k p̂_k S_k` at `(θ, φ)`.
pub fn p_dot_s<T: Real>(theta: T, phi: T) -> Mat3<T> {
    let [p, _, _] = spherical_unit_vectors(theta, phi);
    let s = spin_matrices::<T>();
    (0..3).fold(Mat3::zero(), |acc, k| acc + s[k].scale(cplx(p[k], T::zero())))
}

#[derive(Debug, Clone)]
pub struct HelicityTriad<T> {
    pub theta: T,
    pub phi: T,
    pub e_minus: Vec3c<T>,
    pub e_zero: Vec3c<T>,
    pub e_plus: Vec3c<T>,
    pub gauge: GaugeSpec<T>,
}

impl<T: Real> HelicityTriad<T> {
    /// `e_λ` for `λ ∈ {-1, 0, 1}`.
    pub fn vector(&self, lambda: i32) -> &Vec3c<T> {
        match lambda {
            -1 => &self.e_minus,
            0 => &self.e_zero,
            _ => &self.e_plus,
        }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for a in MU_VALUES {
            for b in MU_VALUES {
                let want = if a == b { T::one() } else { T::zero() };
                worst = worst.max((inner(self.vector(a), self.vector(b)) - cplx(want, T::zero())).norm());
            }
        }
        worst
    }

    /// Largest residual of `(S·p̂) e_λ = λ e_λ` over the triad.
    pub fn helicity_error(&self) -> T {
        let h = p_dot_s(self.theta, pole_phi(self.theta, self.phi));
        let mut worst = T::zero();
        for lam in MU_VALUES {
            let v = self.vector(lam);
            let hv = h.apply(v);
            for i in 0..3 {
                worst = worst.max((hv[i] - v[i] * T::from_int(lam as i64)).norm());
            }
        }
        worst
    }
}


/// `⟨a, b⟩ = Σ a_μ* b_μ`.
pub fn inner<T: Real>(a: &Vec3c<T>, b: &Vec3c<T>) -> Complex<T> {
    a.iter().zip(b).fold(cplx(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn triad<T: Real>(theta: T, phi: T, gauge: &GaugeSpec<T>) -> HelicityTriad<T> {
    let d = rotation_matrix(pole_phi(theta, phi), theta, T::zero());
    HelicityTriad {
        theta,
        phi,
        e_minus: helicity_vector(-1, theta, phi, gauge),
        e_zero: d.column(0),
        e_plus: helicity_vector(1, theta, phi, gauge),
        gauge: gauge.clone(),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecompositionRow {
    pub mu: i32,
    pub s_z: i32,
    pub l_z: i32,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub probability: f64,
}

/// `e_λ^(-mφ)` at `(θ, φ = 0)` split over `S_z` eigenvectors `u_μ`; each
/// row carries `l_z = λm - μ` so that `s_z + l_z = j_z = λm`.
#[derive(Debug, Clone, Serialize)]
pub struct AngularMomentumDecomposition {
    pub m: i32,
    pub lambda: i32,
    pub theta: f64,
    pub rows: [DecompositionRow; 3],
}

impl AngularMomentumDecomposition {
    pub fn probability_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.probability).sum()
    }
}

/// The `λ = -1` rows follow from `D_{μ,-1} = D*_{-μ,+1}`.
pub fn sz_lz_decomposition<T: Real>(m: i32, lambda: i32, theta: T) -> AngularMomentumDecomposition {
    let plus = helicity_vector(1, theta, T::zero(), &GaugeSpec::linear(m));
    let rows = MU_VALUES.map(|mu| {
        let amp = if lambda >= 0 { plus[(mu + 1) as usize] } else { plus[(1 - mu) as usize].conj() };
        DecompositionRow {
            mu,
            s_z: mu,
            l_z: lambda.signum() * m - mu,
            amplitude_re: amp.re.as_f64(),
            amplitude_im: amp.im.as_f64(),
            probability: amp.norm_sqr().as_f64(),
        }
    });
    AngularMomentumDecomposition { m, lambda: lambda.signum(), theta: theta.as_f64(), rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisExpectations {
    pub s_z: f64,
    pub l_z: f64,
    pub j_z: f64,
}

/// Probability-weighted `⟨S_z⟩`, `⟨L_z⟩` and the sharp `j_z`.
pub fn basis_expectations<T: Real>(m: i32, lambda: i32, theta: T) -> BasisExpectations {
    let d = sz_lz_decomposition(m, lambda, theta);
    let s_z = d.rows.iter().map(|r| r.s_z as f64 * r.probability).sum();
    let l_z = d.rows.iter().map(|r| r.l_z as f64 * r.probability).sum();
    BasisExpectations { s_z, l_z, j_z: (lambda.signum() * m) as f64 }
}

/// `T = e^{-iλ(χ' - χ)}` with `e^(χ') = T e^(χ)`.
pub fn gauge_transform_phase<T: Real>(
    from: &GaugeSpec<T>,
    to: &GaugeSpec<T>,
    lambda: i32,
    theta: T,
    phi: T,
) -> Complex<T> {
    let phi = pole_phi(theta, phi);
    cis(-T::from_int(lambda as i64) * (to.chi(theta, phi) - from.chi(theta, phi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &Vec3c<f64>, b: [(f64, f64); 3], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, (re, im))| (x - cplx(re, im)).norm() < tol)
    }

    #[test]
    fn helicity_vector_examples() {
        let z = GaugeSpec::<f64>::zero();
        assert!(close(&helicity_vector(1, 0.0, 0.0, &z), [(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 1e-15));
        let eq = [(-0.5, 0.0), (-FRAC_1_SQRT_2, 0.0), (0.5, 0.0)];
        assert!(close(&helicity_vector(1, PI / 2.0, 0.0, &z), eq, 1e-15));
        assert!(close(&helicity_vector(1, PI / 2.0, 0.0, &GaugeSpec::linear(1)), eq, 1e-15));
    }

    #[test]
    fn triad_invariants() {
        let g = GaugeSpec::<f64>::linear(2);
        let t = triad(PI / 3.0, 1.1, &g);
        assert!(t.orthonormality_error() < 1e-14);
        assert!(t.helicity_error() < 1e-14);
        let hp = p_dot_s(PI / 3.0, 1.1).apply(&t.e_plus);
        assert!(hp.iter().zip(&t.e_plus).all(|(a, b)| (a - b).norm() < 1e-14));
        let z = triad(0.0, 0.0, &GaugeSpec::zero());
        assert!(close(&z.e_zero, [(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)], 1e-16));
    }

    #[test]
    fn e_zero_is_momentum_direction() {
        let (t, f) = (0.9f64, -2.2f64);
        let tri = triad(t, f, &GaugeSpec::zero());
        let want = [
            (t.sin() * f.cos() * FRAC_1_SQRT_2, t.sin() * f.sin() * FRAC_1_SQRT_2),
            (t.cos(), 0.0),
            (t.sin() * f.cos() * FRAC_1_SQRT_2, -t.sin() * f.sin() * FRAC_1_SQRT_2),
        ];
        assert!(close(&tri.e_zero, want, 1e-15));
    }

    #[test]
    fn decomposition_examples() {
        let d = sz_lz_decomposition(1, 1, PI / 3.0);
        let p: Vec<f64> = d.rows.iter().map(|r| r.probability).collect();
        for (got, want) in p.iter().zip([1.0 / 16.0, 3.0 / 8.0, 9.0 / 16.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let d = sz_lz_decomposition(3, 1, 0.0f64);
        assert!((d.rows[2].probability - 1.0).abs() < 1e-16 && d.rows[2].l_z == 2);
        assert!((sz_lz_decomposition(-1, -1, 2.2f64).probability_sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectations() {
        let e = basis_expectations(0, 1, PI / 2.0);
        assert!(e.s_z.abs() < 1e-15 && e.l_z.abs() < 1e-15 && e.j_z == 0.0);
        let e = basis_expectations(1, 1, PI / 3.0);
        assert!((e.s_z - 0.5).abs() < 1e-15 && (e.l_z - 0.5).abs() < 1e-15 && e.j_z == 1.0);
        let e = basis_expectations(-2, 1, PI);
        assert!((e.s_z + 1.0).abs() < 1e-15 && (e.l_z + 1.0).abs() < 1e-15 && e.j_z == -2.0);
        // negative helicity mirrors the spin weight
        let e = basis_expectations(2, -1, 0.4f64);
        assert!((e.s_z + 0.4f64.cos()).abs() < 1e-15 && e.j_z == -2.0);
    }

    #[test]
    fn transform_phase_examples() {
        let (z, l1) = (GaugeSpec::<f64>::zero(), GaugeSpec::linear(1));
        assert_eq!(gauge_transform_phase(&l1, &l1, 1, 0.3, 0.7), cplx(1.0, 0.0));
        assert!((gauge_transform_phase(&z, &l1, 1, 1.0, PI / 2.0) - cplx(0.0, 1.0)).norm() < 1e-15);
        let prod = gauge_transform_phase(&z, &l1, 1, 1.0, 0.4) * gauge_transform_phase(&z, &l1, -1, 1.0, 0.4);
        assert!((prod - cplx(1.0, 0.0)).norm() < 1e-15);
        let e0 = helicity_vector(1, 1.0, 0.4, &z);
        let e1 = helicity_vector(1, 1.0, 0.4, &l1);
        let t = gauge_transform_phase(&z, &l1, 1, 1.0, 0.4);
        assert!(e0.iter().zip(&e1).all(|(a, b)| (a * t - b).norm() < 1e-15));
    }
}
