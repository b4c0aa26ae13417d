use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::scalar::{cis, cplx, czero, Real};

/// Spherical components ordered `μ = -1, 0, +1`.
pub type Vec3c<T> = [Complex<T>; 3];

pub const MU_VALUES: [i32; 3] = [-1, 0, 1];

/// Array slot of spherical index `μ`.
#[inline]
pub fn mu_index(mu: i32) -> usize {
    debug_assert!((-1..=1).contains(&mu));
    (mu + 1) as usize
}

/// Dense complex 3×3 matrix in the `μ` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T>(pub [[Complex<T>; 3]; 3]);

pub type Spin1Matrix<T> = Mat3<T>;

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Self([[czero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([cplx(T::one(), T::zero()); 3])
    }

    pub fn diag(d: Vec3c<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v = *v * s;
            }
        }
        m
    }

    pub fn apply(&self, v: &Vec3c<T>) -> Vec3c<T> {
        let mut out = [czero(); 3];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }

    pub fn det(&self) -> Complex<T> {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Element `(μ, μ')` using spherical labels.
    pub fn at(&self, mu: i32, mu_p: i32) -> Complex<T> {
        self.0[mu_index(mu)][mu_index(mu_p)]
    }

    pub fn column(&self, j: usize) -> Vec3c<T> {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j] + self.0[i][2] * rhs.0[2][j];
            }
        }
        m
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = m.0[i][j] + rhs.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(cplx(-T::one(), T::zero()))
    }
}

impl<T> Index<(usize, usize)> for Mat3<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.0[i][j]
    }
}

/// `(S_1, S_2, S_3)` for spin 1 in the `μ` basis.
pub fn spin_matrices<T: Real>() -> [Spin1Matrix<T>; 3] {
    let z = czero::<T>();
    let h = T::one() / T::SQRT_2();
    let r = |v: T| cplx(v, T::zero());
    let i = |v: T| cplx(T::zero(), v);
    let s1 = Mat3([[z, r(h), z], [r(h), z, r(-h)], [z, r(-h), z]]);
    let s2 = Mat3([[z, i(h), z], [i(-h), z, i(-h)], [z, i(h), z]]);
    let s3 = Mat3::diag([r(-T::one()), z, r(T::one())]);
    [s1, s2, s3]
}

/// `e^{-iθS}` for any spin-1 generator, using `S³ = S`.
fn exp_generator<T: Real>(s: &Spin1Matrix<T>, theta: T) -> Mat3<T> {
    Mat3::identity() + s.scale(cplx(T::zero(), -theta.sin())) + (*s * *s).scale(cplx(theta.cos() - T::one(), T::zero()))
}

/// Euler angles `(φ, θ, χ)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles<T> {
    pub phi: T,
    pub theta: T,
    pub chi: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix<T> {
    pub matrix: Mat3<T>,
    pub angles: EulerAngles<T>,
}

impl<T: Real> RotationMatrix<T> {
    /// `D_{μλ}`.
    pub fn at(&self, mu: i32, lambda: i32) -> Complex<T> {
        self.matrix.at(mu, lambda)
    }

    /// Column `λ`, which is the helicity-`λ` basis vector for `λ = ±1`.
    pub fn column(&self, lambda: i32) -> Vec3c<T> {
        self.matrix.column(mu_index(lambda))
    }
}

/// `D = e^{-iS₃φ} e^{-iS₂θ} e^{-iS₃χ}`.
pub fn rotation_matrix<T: Real>(phi: T, theta: T, chi: T) -> RotationMatrix<T> {
    let [_, s2, _] = spin_matrices::<T>();
    let z_phase = |a: T| Mat3::diag([cis(a), cplx(T::one(), T::zero()), cis(-a)]);
    let matrix = z_phase(phi) * exp_generator(&s2, theta) * z_phase(chi);
    RotationMatrix { matrix, angles: EulerAngles { phi, theta, chi } }
}

/// Cartesian `(x, y, z)` components to spherical `μ` components `u_μ† V`.
pub fn cartesian_to_spherical<T: Real>(v: &Vec3c<T>) -> Vec3c<T> {
    let h = T::one() / T::SQRT_2();
    let iy = v[1] * cplx(T::zero(), T::one());
    [(v[0] + iy) * h, v[2], (v[0] - iy) * h]
}

/// Inverse of [`cartesian_to_spherical`]: `V = Σ_μ V_μ u_μ`.
pub fn spherical_to_cartesian<T: Real>(v: &Vec3c<T>) -> Vec3c<T> {
    let h = T::one() / T::SQRT_2();
    let i = cplx(T::zero(), T::one());
    [(v[0] + v[2]) * h, (v[2] - v[0]) * i * h, v[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type M = Mat3<f64>;

    fn eps(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn spin_algebra() {
        let s = spin_matrices::<f64>();
        assert_eq!(s[2], M::diag([cplx(-1.0, 0.0), czero(), cplx(1.0, 0.0)]));
        for a in &s {
            assert!(a.max_abs_diff(&a.adjoint()) < 1e-15);
        }
        for i in 0..3 {
            for j in 0..3 {
                let mut want = M::zero();
                for k in 0..3 {
                    want = want + s[k].scale(cplx(0.0, eps(i, j, k)));
                }
                assert!(s[i].commutator(&s[j]).max_abs_diff(&want) < 1e-15, "[S{i},S{j}]");
            }
        }
        let casimir = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
        assert!(casimir.max_abs_diff(&M::identity().scale(cplx(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn cartesian_generators_agree() {
        // (S_k)_{ij} = -i ε_{kij} in Cartesian components
        let s = spin_matrices::<f64>();
        let v = [cplx(0.3, -0.2), cplx(-1.1, 0.4), cplx(0.5, 0.9)];
        for k in 0..3 {
            let mut cart = [czero(); 3];
            for i in 0..3 {
                for j in 0..3 {
                    cart[i] += cplx(0.0, -eps(k, i, j)) * v[j];
                }
            }
            let via_mu = spherical_to_cartesian(&s[k].apply(&cartesian_to_spherical(&v)));
            for i in 0..3 {
                assert!((via_mu[i] - cart[i]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rotation_identity_and_unitarity() {
        let d = rotation_matrix(0.0, 0.0, 0.0);
        assert!(d.matrix.max_abs_diff(&M::identity()) < 1e-16);
        for &(a, b, c) in &[(0.3, 1.2, -0.7), (2.9, 3.1, 0.1), (-1.0, 0.01, 5.0)] {
            let d = rotation_matrix(a, b, c).matrix;
            assert!((d * d.adjoint()).max_abs_diff(&M::identity()) < 1e-13);
            assert!((d.det() - cplx(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn helicity_column_and_conjugation() {
        let (phi, theta) = (0.8f64, 1.1f64);
        let d = rotation_matrix(phi, theta, 0.0);
        let (c, s) = (theta.cos(), theta.sin());
        let want = [
            cis(phi) * (c - 1.0) / 2.0,
            cplx(-s / 2f64.sqrt(), 0.0),
            cis(-phi) * (c + 1.0) / 2.0,
        ];
        let col = d.column(1);
        for i in 0..3 {
            assert!((col[i] - want[i]).norm() < 1e-15);
        }
        let d = rotation_matrix(phi, theta, -0.4);
        for mu in MU_VALUES {
            for lam in MU_VALUES {
                assert!((d.at(mu, lam) - d.at(-mu, -lam).conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn chi_enters_as_right_phase() {
        let chi = 0.9;
        let full = rotation_matrix(0.4, 2.0, chi).matrix;
        let split = rotation_matrix(0.4, 2.0, 0.0).matrix * M::diag([cis(chi), cplx(1.0, 0.0), cis(-chi)]);
        assert!(full.max_abs_diff(&split) < 1e-13);
    }

    #[test]
    fn z_rotation_by_pi_on_x() {
        // rotating x̂ by π about z gives -x̂
        let x = cartesian_to_spherical(&[cplx(1.0, 0.0), czero(), czero()]);
        let out = spherical_to_cartesian(&rotation_matrix(PI, 0.0, 0.0).matrix.apply(&x));
        assert!((out[0] + 1.0).norm() < 1e-15 && out[1].norm() < 1e-15);
    }
}
