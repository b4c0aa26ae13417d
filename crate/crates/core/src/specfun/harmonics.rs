use num_complex::Complex;

use super::SpecfunError;
use crate::scalar::{cis, Real};

/// `(l, n)` pair with `|n| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SphericalHarmonicIndex {
    l: u32,
    n: i32,
}

impl SphericalHarmonicIndex {
    pub fn new(l: i64, n: i64) -> Result<Self, SpecfunError> {
        if l < 0 || n.abs() > l || l > u32::MAX as i64 {
            return Err(SpecfunError::InvalidIndex { l, n });
        }
        Ok(Self { l: l as u32, n: n as i32 })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn n(&self) -> i32 {
        self.n
    }
}

/// Orthonormal `Y_l^n(θ, 0)` for every `l` in `|n|..=l_max`, returned as a
/// vector indexed by `l - |n|`.
///
/// Uses the normalised three-term recurrence so no factorials are formed;
/// stable well past `l = 1000`.
pub fn normalized_legendre_column<T: Real>(n: i32, l_max: u32, theta: T) -> Vec<T> {
    let m = n.unsigned_abs();
    if l_max < m {
        return Vec::new();
    }
    let x = theta.cos();
    let s = theta.sin().abs();
    let four_pi = T::lit(4.0) * T::PI();
    let mut pmm = T::one() / four_pi.sqrt();
    for k in 1..=m {
        let kf = T::from_usize_exact(k as usize);
        pmm = -pmm * s * ((T::lit(2.0) * kf + T::one()) / (T::lit(2.0) * kf)).sqrt();
    }
    let mut out = Vec::with_capacity((l_max - m + 1) as usize);
    out.push(pmm);
    if l_max == m {
        return finish(out, n);
    }
    let mf = T::from_usize_exact(m as usize);
    let mut p1 = (T::lit(2.0) * mf + T::lit(3.0)).sqrt() * x * pmm;
    out.push(p1);
    let mut p0 = pmm;
    for l in (m + 2)..=l_max {
        let lf = T::from_usize_exact(l as usize);
        let a = ((T::lit(4.0) * lf * lf - T::one()) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - T::one();
        let b = ((lm1 * lm1 - mf * mf) / (T::lit(4.0) * lm1 * lm1 - T::one())).sqrt();
        let p = a * (x * p1 - b * p0);
        p0 = p1;
        p1 = p;
        out.push(p);
    }
    finish(out, n)
}

fn finish<T: Real>(mut column: Vec<T>, n: i32) -> Vec<T> {
    // Y_l^{-m}(θ,0) = (-1)^m Y_l^m(θ,0) since the φ = 0 value is real.
    if n < 0 && n.unsigned_abs() % 2 == 1 {
        for v in &mut column {
            *v = -*v;
        }
    }
    column
}

/// `Y_l^n(θ, 0)`, which is real.
pub fn sph_harm_theta<T: Real>(idx: SphericalHarmonicIndex, theta: T) -> T {
    let col = normalized_legendre_column(idx.n, idx.l, theta);
    *col.last().expect("column has at least one entry")
}

/// Orthonormal spherical harmonic `Y_l^n(θ, φ)` with Condon–Shortley phase.
pub fn sph_harm<T: Real>(idx: SphericalHarmonicIndex, theta: T, phi: T) -> Complex<T> {
    cis(T::from_int(idx.n as i64) * phi) * sph_harm_theta(idx, theta)
}
