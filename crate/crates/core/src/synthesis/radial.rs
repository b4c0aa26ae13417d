use num_complex::Complex;
use serde::Serialize;

use super::SynthesisError;
use crate::quadrature::{adaptive_gk, adaptive_gk_estimate};
use crate::scalar::{cis, cplx, czero, Real};
use crate::specfun::sph_bessel;

/// Piecewise-linear `f(p)` on increasing nodes, zero outside the table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialTable<T> {
    p: Vec<T>,
    f: Vec<T>,
}

impl<T: Real> RadialTable<T> {
    pub fn new(p: Vec<T>, f: Vec<T>) -> Result<Self, SynthesisError> {
        if p.len() < 2 || p.len() != f.len() {
            return Err(SynthesisError::InvalidSpec("radial table needs at least two (p, f) pairs".into()));
        }
        if p[0] < T::zero() || p.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SynthesisError::InvalidSpec("radial table nodes must be non-negative and strictly increasing".into()));
        }
        if f.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(SynthesisError::InvalidSpec("radial table values must be finite and non-negative".into()));
        }
        Ok(Self { p, f })
    }

    pub fn nodes(&self) -> &[T] {
        &self.p
    }

    pub fn values(&self) -> &[T] {
        &self.f
    }

    pub fn eval(&self, p: T) -> T {
        let n = self.p.len();
        if p < self.p[0] || p > self.p[n - 1] {
            return T::zero();
        }
        let i = self.p.partition_point(|&x| x <= p).clamp(1, n - 1);
        let (a, b) = (self.p[i - 1], self.p[i]);
        let s = (p - a) / (b - a);
        self.f[i - 1] * (T::one() - s) + self.f[i] * s
    }
}

/// Momentum profile `f(p)` of a localized state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialSpectrum<T> {
    /// `p^α e^{-p/p₀}`
    PowerLawCutoff { alpha: T, p0: T },
    /// `e^{-p/p₀}`
    Exponential { p0: T },
    Tabulated(RadialTable<T>),
}

impl<T: Real> RadialSpectrum<T> {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        match self {
            Self::PowerLawCutoff { alpha, p0 } => {
                if !(p0.is_finite() && *p0 > T::zero()) {
                    return Err(SynthesisError::InvalidSpec("cutoff scale p0 must be positive".into()));
                }
                if !(alpha.is_finite() && *alpha > T::lit(-1.5)) {
                    return Err(SynthesisError::InvalidSpec("power-law exponent must exceed -3/2".into()));
                }
                Ok(())
            }
            Self::Exponential { p0 } if !(p0.is_finite() && *p0 > T::zero()) => {
                Err(SynthesisError::InvalidSpec("cutoff scale p0 must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, p: T) -> T {
        match self {
            Self::PowerLawCutoff { alpha, p0 } => {
                if p <= T::zero() {
                    return if *alpha > T::zero() { T::zero() } else if *alpha == T::zero() { T::one() } else { T::infinity() };
                }
                p.powf(*alpha) * (-p / *p0).exp()
            }
            Self::Exponential { p0 } => (-p / *p0).exp(),
            Self::Tabulated(t) => t.eval(p),
        }
    }

    /// Characteristic momentum: `p₀`, or an eighth of the table span.
    pub fn scale(&self) -> T {
        match self {
            Self::PowerLawCutoff { p0, .. } | Self::Exponential { p0 } => *p0,
            Self::Tabulated(t) => (t.p[t.p.len() - 1] - t.p[0]) / T::lit(8.0),
        }
    }

    fn power(&self) -> T {
        match self {
            Self::PowerLawCutoff { alpha, .. } => *alpha,
            _ => T::zero(),
        }
    }

    fn integral<G: Fn(T) -> T>(&self, a: T, b: T, g: G) -> T {
        let f = |p: T| cplx(g(p), T::zero());
        match adaptive_gk(&f, a, b, T::lit(1e-15) * (T::one() + b), 40) {
            Ok(i) => i.value.re,
            Err(_) => T::nan(),
        }
    }

    /// Momentum beyond which `∫ p² f dp` has relative tail below `rel_tol`.
    pub fn cutoff(&self, rel_tol: T) -> T {
        match self {
            Self::Tabulated(t) => t.p[t.p.len() - 1],
            _ => {
                let p0 = self.scale();
                let k = T::lit(2.0) + self.power();
                let total = self.integral(T::zero(), T::lit(400.0) * p0 * (T::one() + k), |p| p * p * self.eval(p));
                let mut p = T::lit(2.0) * k * p0 + p0;
                loop {
                    // ∫_P^∞ p^k e^{-p/p₀} ≤ P^k e^{-P/p₀} p₀ / (1 - k p₀/P) for P > k p₀
                    let bound = p.powf(k) * (-p / p0).exp() * p0 / (T::one() - k * p0 / p);
                    if bound < rel_tol * total {
                        return p;
                    }
                    p = p + p0;
                }
            }
        }
    }

    /// Relative tail of the norm integral `∫ p² f² dp` beyond `p_max`.
    pub fn norm_tail(&self, p_max: T) -> T {
        if let Self::Tabulated(t) = self {
            return if p_max >= t.p[t.p.len() - 1] { T::zero() } else { T::one() };
        }
        let far = T::lit(800.0) * self.scale() * (T::lit(3.0) + self.power());
        let w = |p: T| (p * self.eval(p)).powi(2);
        let head = self.integral(T::zero(), p_max, w);
        let tail = if far > p_max { self.integral(p_max, far, w) } else { T::zero() };
        tail / (head + tail)
    }
}

/// Precomputed integration range for repeated radial transforms of one spectrum.
#[derive(Debug, Clone)]
pub struct RadialPlan<T> {
    spectrum: RadialSpectrum<T>,
    p_max: T,
    envelope: T,
}

const CUTOFF_TOL: f64 = 1e-20;

impl<T: Real> RadialPlan<T> {
    pub fn new(spectrum: RadialSpectrum<T>) -> Result<Self, SynthesisError> {
        spectrum.validate()?;
        let p_max = spectrum.cutoff(T::lit(CUTOFF_TOL));
        let lo = match &spectrum {
            RadialSpectrum::Tabulated(t) => t.p[0],
            _ => T::zero(),
        };
        let envelope = spectrum.integral(lo, p_max, |p| p * p * spectrum.eval(p));
        if !(envelope.is_finite() && envelope > T::zero()) {
            return Err(SynthesisError::InvalidSpec("radial spectrum has no weight".into()));
        }
        Ok(Self { spectrum, p_max, envelope })
    }

    pub fn spectrum(&self) -> &RadialSpectrum<T> {
        &self.spectrum
    }

    pub fn p_max(&self) -> T {
        self.p_max
    }

    /// `∫ p² f(p)`, an upper bound on every `|R_l(r, t)|`.
    pub fn envelope(&self) -> T {
        self.envelope
    }

    fn breakpoints(&self, r: T, t: T) -> Vec<T> {
        let osc = r.max(t.abs());
        let mut width = self.spectrum.scale();
        if osc > T::zero() {
            width = width.min(T::PI() / osc);
        }
        let mut out = Vec::new();
        match &self.spectrum {
            RadialSpectrum::Tabulated(tab) => {
                for w in tab.p.windows(2) {
                    let n = ((w[1] - w[0]) / width).ceil().to_usize().unwrap_or(1).max(1);
                    for i in 0..n {
                        out.push(w[0] + (w[1] - w[0]) * T::from_usize_exact(i) / T::from_usize_exact(n));
                    }
                }
                out.push(tab.p[tab.p.len() - 1]);
            }
            _ => {
                let n = (self.p_max / width).ceil().to_usize().unwrap_or(1).max(1);
                for i in 0..=n {
                    out.push(self.p_max * T::from_usize_exact(i) / T::from_usize_exact(n));
                }
            }
        }
        out
    }

    /// `∫ dp p² f(p) j_l(p r) e^{-i p t}` with `c = ħ = 1`.
    pub fn transform(&self, l: u32, r: T, t: T) -> Result<Complex<T>, SynthesisError> {
        if r < T::zero() {
            return Err(SynthesisError::InvalidSpec("radius must be non-negative".into()));
        }
        if r == T::zero() && l > 0 {
            return Ok(czero());
        }
        let h = |p: T| {
            let j = if r == T::zero() { T::one() } else { sph_bessel(l, p * r) };
            cis(-p * t) * (p * p * self.spectrum.eval(p) * j)
        };
        let knots = self.breakpoints(r, t);
        let tol = T::lit(1e-16) * self.envelope / T::from_usize_exact(knots.len());
        let mut sum = czero();
        let mut err = T::zero();
        let mut failed = false;
        for w in knots.windows(2) {
            let (i, ok) = adaptive_gk_estimate(&h, w[0], w[1], tol, 24);
            sum = sum + i.value;
            err = err + i.error;
            failed |= !ok;
        }
        // G7/K15 differences overstate the error of smooth panels by orders of
        // magnitude; only flag panels that remain far off after full bisection.
        if failed && err > T::lit(1e-10).max(T::lit(1e3) * T::epsilon()) * self.envelope {
            return Err(SynthesisError::RadialConvergence { l, r: r.as_f64(), t: t.as_f64(), error: err.as_f64() });
        }
        Ok(sum)
    }
}

/// One-off radial transform; build a [`RadialPlan`] when evaluating many.
pub fn radial_transform<T: Real>(radial: &RadialSpectrum<T>, l: u32, r: T, t: T) -> Result<Complex<T>, SynthesisError> {
    RadialPlan::new(radial.clone())?.transform(l, r, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_l0_closed_form() {
        let plan = RadialPlan::new(RadialSpectrum::Exponential { p0: 1.0f64 }).unwrap();
        for k in 0..=40 {
            let r = 0.5 * k as f64;
            let got = plan.transform(0, r, 0.0).unwrap();
            let want = 2.0 / (1.0 + r * r).powi(2);
            assert!((got.re - want).abs() / want < 1e-10 && got.im.abs() < 1e-12 * want.max(1e-3), "r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn higher_l_vanishes_at_origin() {
        let s = RadialSpectrum::PowerLawCutoff { alpha: 0.5f64, p0: 2.0 };
        for l in 1..6 {
            assert_eq!(radial_transform(&s, l, 0.0, 0.7).unwrap(), czero());
        }
        let v = radial_transform(&RadialSpectrum::Exponential { p0: 1.0f64 }, 0, 0.0, 0.0).unwrap();
        assert!((v.re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn time_dependence_closed_form() {
        // ∫ p² e^{-p} e^{-ipt} dp = 2 / (1 + i t)³
        let plan = RadialPlan::new(RadialSpectrum::Exponential { p0: 1.0f64 }).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let got = plan.transform(0, 0.0, t).unwrap();
            let want = Complex::new(2.0, 0.0) / Complex::new(1.0, t).powi(3);
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn tabulated_matches_analytic_profile() {
        let p: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let f: Vec<f64> = p.iter().map(|p| (-p).exp()).collect();
        let s = RadialSpectrum::Tabulated(RadialTable::new(p, f).unwrap());
        let got = radial_transform(&s, 0, 1.0, 0.0).unwrap().re;
        assert!((got - 0.5).abs() < 1e-4, "{got}");
    }

    #[test]
    fn cutoff_and_tail() {
        let s = RadialSpectrum::PowerLawCutoff { alpha: 0.5f64, p0: 1.0 };
        let p = s.cutoff(1e-12);
        assert!(p > 20.0 && p < 60.0, "{p}");
        assert!(s.norm_tail(p) < 1e-10);
        assert!(s.norm_tail(2.0) > 1e-3);
        assert!(RadialSpectrum::Exponential { p0: -1.0f64 }.validate().is_err());
        assert!(RadialSpectrum::PowerLawCutoff { alpha: -2.0f64, p0: 1.0 }.validate().is_err());
    }
}
