use crate::scalar::Real;

/// Spherical Bessel function of the first kind `j_l(x)` for `x >= 0`.
///
/// Negative `x` is treated through `j_l(-x) = (-1)^l j_l(x)`.
pub fn sph_bessel<T: Real>(l: u32, x: T) -> T {
    if x < T::zero() {
        let v = sph_bessel(l, -x);
        return if l.is_multiple_of(2) { v } else { -v };
    }
    sph_bessel_sequence(l, x)[l as usize]
}

/// `j_0(x), ..., j_{l_max}(x)`.
///
/// Small arguments use the power series, `x >= l_max` recurs upward from the
/// closed forms of `j_0` and `j_1`, and everything else runs Miller's
/// downward recurrence normalised with `Σ (2k+1) j_k² = 1`.
pub fn sph_bessel_sequence<T: Real>(l_max: u32, x: T) -> Vec<T> {
    let n = l_max as usize + 1;
    let x = x.abs();
    if x == T::zero() {
        let mut out = vec![T::zero(); n];
        out[0] = T::one();
        return out;
    }
    if x < T::lit(0.5) {
        return (0..=l_max).map(|l| series(l, x)).collect();
    }
    if x >= T::from_usize_exact(l_max as usize) {
        return upward(n, x);
    }
    downward(n, x)
}

fn series<T: Real>(l: u32, x: T) -> T {
    // x^l/(2l+1)!! Σ_k (-x²/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    let mut lead = T::one();
    for k in 1..=l {
        lead = lead * x / T::from_usize_exact(2 * k as usize + 1);
        if lead == T::zero() {
            return T::zero();
        }
    }
    let half_x2 = x * x / T::lit(2.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..60usize {
        term = -term * half_x2 / (T::from_usize_exact(k) * T::from_usize_exact(2 * l as usize + 2 * k + 1));
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn upward<T: Real>(n: usize, x: T) -> Vec<T> {
    let (s, c) = (x.sin(), x.cos());
    let mut out = Vec::with_capacity(n);
    out.push(s / x);
    if n > 1 {
        out.push(s / (x * x) - c / x);
    }
    for l in 1..n.saturating_sub(1) {
        let next = T::from_usize_exact(2 * l + 1) / x * out[l] - out[l - 1];
        out.push(next);
    }
    out
}

fn downward<T: Real>(n: usize, x: T) -> Vec<T> {
    // Start far enough above max(l_max, x) that the seed error has decayed.
    let top = n + 20 + (10.0 * x.as_f64().max(n as f64).sqrt()) as usize;
    let big = T::max_value().sqrt();
    let mut out = vec![T::zero(); n];
    let mut above = T::zero();
    let mut cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    for k in (0..top).rev() {
        if k < n {
            out[k] = cur;
        }
        norm = norm + T::from_usize_exact(2 * k + 1) * cur * cur;
        if k == 0 {
            break;
        }
        let below = T::from_usize_exact(2 * k + 1) / x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > big {
            let scale = T::one() / big;
            cur = cur * scale;
            above = above * scale;
            norm = norm * scale * scale;
            for v in out.iter_mut() {
                *v = *v * scale;
            }
        }
    }
    let mut factor = T::one() / norm.sqrt();
    // The sum rule fixes magnitude only; take the sign from j_0 or j_1.
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let reference = if j0.abs() >= j1.abs() || n < 2 {
        (j0, out[0])
    } else {
        (j1, out[1])
    };
    if (reference.0 < T::zero()) != (reference.1 < T::zero()) {
        factor = -factor;
    }
    out.iter().map(|&v| v * factor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values from mpmath at 40 digits
    const FROZEN: &[(u32, f64, f64)] = &[
        (0, 0.5, 0.958_851_077_208_406_000_55),
        (1, 1.0, 0.301_168_678_939_756_789_25),
        (5, 0.3, 2.329_582_556_729_027_303_7e-7),
        (10, 2.5, 6.050_436_229_638_539_781_2e-7),
        (20, 7.0, 3.416_414_225_336_439_51e-9),
        (32, 100.0, -0.010_246_321_422_238_065_58),
        (64, 10.0, 3.208_826_548_903_551_936_6e-46),
        (64, 60.0, 0.003_985_803_424_180_692_329_6),
        (64, 1000.0, 8.731_553_997_881_024_115_1e-5),
        (3, 500.0, -0.001_756_366_073_887_637_997_3),
        (40, 1e-3, 1.547_505_320_043_551_849_1e-181),
        (12, 13.5, 0.087_822_241_865_853_064_187),
    ];

    #[test]
    fn frozen_values() {
        for &(l, x, want) in FROZEN {
            let got = sph_bessel(l, x);
            assert!(((got - want) / want).abs() < 1e-12, "j_{l}({x}) = {got:e}, want {want:e}");
        }
    }

    #[test]
    fn trivial_values() {
        assert_eq!(sph_bessel(0, 0.0), 1.0);
        assert_eq!(sph_bessel(3, 0.0), 0.0);
        assert!(sph_bessel(0, std::f64::consts::PI).abs() < 1e-16);
        let x = 1.0f64;
        assert!((sph_bessel(1, x) - (x.sin() / (x * x) - x.cos() / x)).abs() < 1e-15);
    }

    #[test]
    fn recurrence_holds() {
        for l in 1..=32u32 {
            for &x in &[0.1f64, 0.7, 3.0, 9.5, 31.0, 47.0, 100.0] {
                let s = sph_bessel_sequence(l + 1, x);
                let lhs = s[l as usize - 1] + s[l as usize + 1];
                let rhs = (2 * l + 1) as f64 * s[l as usize] / x;
                let scale = lhs.abs().max(rhs.abs()).max(s[l as usize - 1].abs());
                assert!((lhs - rhs).abs() <= 1e-10 * scale, "l={l} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn sequence_agrees_across_branches() {
        // x = 8 sits in the downward branch for l_max = 20 and the upward one for l_max = 5
        let a = sph_bessel_sequence(20, 8.0f64);
        let b = sph_bessel_sequence(5, 8.0f64);
        for l in 0..=5 {
            assert!((a[l] - b[l]).abs() < 1e-14, "l={l}");
        }
    }

    #[test]
    fn negative_argument_parity() {
        assert!((sph_bessel(3, -2.0f64) + sph_bessel(3, 2.0)).abs() < 1e-16);
    }

    #[test]
    fn f32_close_to_f64() {
        for &(l, x) in &[(0u32, 2.0f32), (4, 3.0), (10, 25.0)] {
            let a = sph_bessel(l, x) as f64;
            let b = sph_bessel(l, x as f64);
            assert!((a - b).abs() < 1e-5, "l={l} x={x}");
        }
    }
}
