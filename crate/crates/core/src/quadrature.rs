//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{czero, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("adaptive quadrature did not converge: estimate {value}, error estimate {error:e} (requested {tolerance:e})")]
    NoConvergence { value: f64, error: f64, tolerance: f64 },
    #[error("invalid quadrature order {0}")]
    InvalidOrder(usize),
}

/// Gauss–Legendre rule on [-1, 1].
///
/// Nodes are returned in increasing order.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Newton iteration on `P_n` started from the Tricomi estimate.
    pub fn new(n: usize) -> Result<Self, QuadratureError> {
        if n == 0 {
            return Err(QuadratureError::InvalidOrder(n));
        }
        // Work in f64 and convert; Newton in f32 stalls for larger n.
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_and_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        })
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> (Vec<T>, Vec<T>) {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let x = self.nodes.iter().map(|&t| mid + half * t).collect();
        let w = self.weights.iter().map(|&w| w * half).collect();
        (x, w)
    }

    pub fn integrate<F: Fn(T) -> T>(&self, a: T, b: T, f: F) -> T {
        let (x, w) = self.mapped(a, b);
        x.iter().zip(&w).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod / 7-point Gauss evaluation: (kronrod, |kronrod - gauss|).
pub fn gauss_kronrod_15<T: Real, F>(f: &F, a: T, b: T) -> (Complex<T>, T)
where
    F: Fn(T) -> Complex<T>,
{
    let (k, e, _) = kronrod_panel(f, a, b);
    (k, e)
}

/// Also returns `∫|f|` on the panel, which bounds the attainable accuracy.
fn kronrod_panel<T: Real, F>(f: &F, a: T, b: T) -> (Complex<T>, T, T)
where
    F: Fn(T) -> Complex<T>,
{
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let fc = f(mid);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut abs = fc.norm() * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let (lo, hi) = (f(mid - dx), f(mid + dx));
        let s = lo + hi;
        kron = kron + s * T::lit(WGK[j]);
        abs = abs + (lo.norm() + hi.norm()) * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * T::lit(WG[j / 2]);
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm(), abs * half.abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: Complex<T>,
    pub error: T,
    pub evaluations: usize,
}

/// Adaptive bisection with G7/K15 panels until the summed error estimate is
/// below `abs_tol`.
pub fn adaptive_gk<T: Real, F>(
    f: &F,
    a: T,
    b: T,
    abs_tol: T,
    max_depth: u32,
) -> Result<Integral<T>, QuadratureError>
where
    F: Fn(T) -> Complex<T>,
{
    let (out, converged) = adaptive_gk_estimate(f, a, b, abs_tol, max_depth);
    if !converged {
        return Err(QuadratureError::NoConvergence {
            value: out.value.norm().as_f64(),
            error: out.error.as_f64(),
            tolerance: abs_tol.as_f64(),
        });
    }
    Ok(out)
}

/// Same as [`adaptive_gk`] but always returns the best estimate together with
/// a flag telling whether every panel met its share of the tolerance.
pub fn adaptive_gk_estimate<T: Real, F>(f: &F, a: T, b: T, abs_tol: T, max_depth: u32) -> (Integral<T>, bool)
where
    F: Fn(T) -> Complex<T>,
{
    let mut out = Integral { value: czero(), error: T::zero(), evaluations: 0 };
    let mut failed = false;
    recurse(f, a, b, abs_tol, max_depth, &mut out, &mut failed);
    (out, !failed)
}

fn recurse<T: Real, F>(
    f: &F,
    a: T,
    b: T,
    tol: T,
    depth: u32,
    out: &mut Integral<T>,
    failed: &mut bool,
) where
    F: Fn(T) -> Complex<T>,
{
    let (v, e, abs) = kronrod_panel(f, a, b);
    out.evaluations += 15;
    // differences at the rounding level of the panel cannot be reduced by bisection
    let floor = T::lit(50.0) * T::epsilon() * abs;
    if e <= tol.max(floor) || depth == 0 {
        if e > tol.max(floor) {
            *failed = true;
        }
        out.value = out.value + v;
        out.error = out.error + e;
        return;
    }
    let mid = (a + b) / T::lit(2.0);
    let half_tol = tol / T::lit(2.0);
    recurse(f, a, mid, half_tol, depth - 1, out, failed);
    recurse(f, mid, b, half_tol, depth - 1, out, failed);
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::<f64>::new(12).unwrap();
        // degree 23 is the highest exact degree for 12 nodes
        for k in 0..=23u32 {
            let got = gl.integrate(-1.0, 1.0, |x| x.powi(k as i32));
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "k={k}: {got} vs {want}");
        }
        let total: f64 = gl.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_nodes_sorted_and_symmetric() {
        let gl = GaussLegendre::<f64>::new(47).unwrap();
        for w in gl.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..47 {
            assert!((gl.nodes[i] + gl.nodes[46 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_gk_matches_closed_form() {
        // ∫_0^π e^{ix} dx = 2i
        let f = |x: f64| Complex64::new(x.cos(), x.sin());
        let r = adaptive_gk(&f, 0.0, std::f64::consts::PI, 1e-14, 30).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn adaptive_gk_reports_failure() {
        let f = |x: f64| Complex64::new(1.0 / x.sqrt(), 0.0);
        let err = adaptive_gk(&f, 0.0, 1.0, 1e-15, 2).unwrap_err();
        assert!(matches!(err, QuadratureError::NoConvergence { .. }));
    }

    #[test]
    fn f32_rule_is_usable() {
        let gl = GaussLegendre::<f32>::new(8).unwrap();
        let got = gl.integrate(0.0, 1.0, |x| x * x);
        assert!((got - 1.0 / 3.0).abs() < 1e-6);
    }
}
