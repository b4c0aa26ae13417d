use super::SpecfunError;
use crate::scalar::Real;

/// Associated Legendre function `P_l^n(x)` with the Condon–Shortley phase.
///
/// Upward recurrence in `l` from the diagonal seed
/// `P_n^n = (-1)^n (2n-1)!! (1-x²)^{n/2}`. Negative orders use
/// `P_l^{-n} = (-1)^n (l-n)!/(l+n)! P_l^n`.
pub fn assoc_legendre<T: Real>(l: i64, n: i64, x: T) -> Result<T, SpecfunError> {
    if l < 0 || n.abs() > l {
        return Err(SpecfunError::InvalidIndex { l, n });
    }
    if x.abs() > T::one() || x.is_nan() {
        return Err(SpecfunError::OutOfDomain(x.as_f64()));
    }
    let m = n.abs();
    let positive = legendre_nonneg(l, m, x);
    if n >= 0 {
        return Ok(positive);
    }
    // (l-m)!/(l+m)! as a running product keeps this finite for moderate l.
    let mut ratio = T::one();
    for k in (l - m + 1)..=(l + m) {
        ratio = ratio / T::from_int(k);
    }
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    Ok(sign * ratio * positive)
}

fn legendre_nonneg<T: Real>(l: i64, m: i64, x: T) -> T {
    let s = (T::one() - x * x).max(T::zero()).sqrt();
    let mut pmm = T::one();
    let mut odd = T::one();
    for _ in 0..m {
        pmm = -pmm * odd * s;
        odd = odd + T::lit(2.0);
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * T::from_int(2 * m + 1) * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let p = (T::from_int(2 * ll - 1) * x * pm1 - T::from_int(ll + m - 1) * pm2) / T::from_int(ll - m);
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(assoc_legendre(0, 0, 0.3).unwrap(), 1.0);
        assert!((assoc_legendre(1, 0, 0.5f64).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn p21_matches_closed_form() {
        // closed form -3x sqrt(1-x^2), evaluated independently
        let x: f64 = 0.5;
        let want = -3.0 * x * (1.0 - x * x).sqrt();
        assert!((want - (-1.299_038_105_68)).abs() < 1e-11);
        assert!((assoc_legendre(2, 1, x).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_for_low_degree() {
        for &x in &[-0.9f64, -0.2, 0.0, 0.4, 0.99] {
            let s = (1.0 - x * x).sqrt();
            let cases = [
                (1, 1, -s),
                (2, 0, 0.5 * (3.0 * x * x - 1.0)),
                (2, 2, 3.0 * s * s),
                (3, 0, 0.5 * (5.0 * x * x * x - 3.0 * x)),
                (3, 1, -1.5 * (5.0 * x * x - 1.0) * s),
                (3, 3, -15.0 * s * s * s),
                (2, -1, 0.5 * x * s),
            ];
            for (l, n, want) in cases {
                let got = assoc_legendre(l, n, x).unwrap();
                assert!((got - want).abs() < 1e-13, "P_{l}^{n}({x}) = {got}, want {want}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(assoc_legendre(1, 2, 0.1), Err(SpecfunError::InvalidIndex { .. })));
        assert!(matches!(assoc_legendre(2, 1, 1.5), Err(SpecfunError::OutOfDomain(_))));
    }
}
