use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GaugeError;
use crate::scalar::Real;

/// `χ(θ, φ)` sampled on a tensor grid: strictly increasing `θ` inside
/// `(0, π)` and `n_phi` uniform, periodic `φ_k = 2πk / n_phi`.
///
/// Derivative tables are built once by central differences; lookups use
/// tensor cubic Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct GaugeTable<T> {
    theta: Vec<T>,
    n_phi: usize,
    chi: Vec<T>,
    d_theta: Vec<T>,
    d_phi: Vec<T>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    theta: f64,
    phi: f64,
    chi: f64,
}

impl<T: Real> GaugeTable<T> {
    /// `chi` is row-major in `θ` then `φ`.
    pub fn new(theta: Vec<T>, n_phi: usize, chi: Vec<T>) -> Result<Self, GaugeError> {
        if theta.len() < 4 || n_phi < 4 {
            return Err(GaugeError::Table(format!(
                "need at least 4 θ and 4 φ samples, got {} × {}",
                theta.len(),
                n_phi
            )));
        }
        if chi.len() != theta.len() * n_phi {
            return Err(GaugeError::Table(format!(
                "expected {} χ values, got {}",
                theta.len() * n_phi,
                chi.len()
            )));
        }
        if theta[0] <= T::zero() || *theta.last().unwrap() >= T::PI() {
            return Err(GaugeError::Table("θ samples must lie inside (0, π)".into()));
        }
        if theta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GaugeError::Table("θ samples must be strictly increasing".into()));
        }
        if chi.iter().any(|c| !c.is_finite()) {
            return Err(GaugeError::Table("non-finite χ value".into()));
        }
        let n_theta = theta.len();
        let h_phi = T::lit(2.0) * T::PI() / T::from_usize_exact(n_phi);
        let at = |i: usize, k: usize| chi[i * n_phi + k];
        let mut d_theta = vec![T::zero(); chi.len()];
        let mut d_phi = vec![T::zero(); chi.len()];
        for i in 0..n_theta {
            // three-point, second-order weights on the non-uniform θ nodes
            let (j0, c) = if i == 0 {
                (0, fd_weights(theta[i], &theta[0..3]))
            } else if i == n_theta - 1 {
                (n_theta - 3, fd_weights(theta[i], &theta[n_theta - 3..]))
            } else {
                (i - 1, fd_weights(theta[i], &theta[i - 1..i + 2]))
            };
            for k in 0..n_phi {
                d_theta[i * n_phi + k] = c[0] * at(j0, k) + c[1] * at(j0 + 1, k) + c[2] * at(j0 + 2, k);
                let next = at(i, (k + 1) % n_phi);
                let prev = at(i, (k + n_phi - 1) % n_phi);
                d_phi[i * n_phi + k] = (next - prev) / (T::lit(2.0) * h_phi);
            }
        }
        Ok(Self { theta, n_phi, chi, d_theta, d_phi })
    }

    /// Samples `f` on the given `θ` nodes and `n_phi` uniform `φ` nodes.
    pub fn from_fn<F: Fn(T, T) -> T>(theta: Vec<T>, n_phi: usize, f: F) -> Result<Self, GaugeError> {
        let phis = phi_nodes::<T>(n_phi);
        let chi = theta.iter().flat_map(|&t| phis.iter().map(move |&p| (t, p))).map(|(t, p)| f(t, p)).collect();
        Self::new(theta, n_phi, chi)
    }

    /// Midpoint `θ` nodes `(i + ½)π / n`.
    pub fn midpoint_theta(n: usize) -> Vec<T> {
        (0..n)
            .map(|i| (T::from_usize_exact(i) + T::lit(0.5)) * T::PI() / T::from_usize_exact(n))
            .collect()
    }

    pub fn theta_nodes(&self) -> &[T] {
        &self.theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn chi(&self, theta: T, phi: T) -> T {
        self.interpolate(&self.chi, theta, phi)
    }

    /// Interpolated `(∂χ/∂θ, ∂χ/∂φ)`.
    pub fn derivatives(&self, theta: T, phi: T) -> (T, T) {
        (self.interpolate(&self.d_theta, theta, phi), self.interpolate(&self.d_phi, theta, phi))
    }

    fn interpolate(&self, values: &[T], theta: T, phi: T) -> T {
        let n_theta = self.theta.len();
        let upper = self.theta.partition_point(|&t| t <= theta);
        let start = upper.saturating_sub(2).min(n_theta - 4);
        let wt = lagrange4(&self.theta[start..start + 4], theta);

        let two_pi = T::lit(2.0) * T::PI();
        let h = two_pi / T::from_usize_exact(self.n_phi);
        let mut u = (phi / h) % T::from_usize_exact(self.n_phi);
        if u < T::zero() {
            u = u + T::from_usize_exact(self.n_phi);
        }
        let k = u.floor().to_usize().unwrap_or(0).min(self.n_phi - 1);
        let frac = u - T::from_usize_exact(k);
        let offsets = [-T::one(), T::zero(), T::one(), T::lit(2.0)];
        let wf = lagrange4(&offsets, frac);

        let mut acc = T::zero();
        for (a, &w_t) in wt.iter().enumerate() {
            let row = (start + a) * self.n_phi;
            for (b, &w_f) in wf.iter().enumerate() {
                let kk = (k + self.n_phi + b - 1) % self.n_phi;
                acc = acc + w_t * w_f * values[row + kk];
            }
        }
        acc
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, GaugeError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let rows: Vec<Row> = rdr.deserialize().collect::<Result<_, _>>()?;
        if rows.is_empty() {
            return Err(GaugeError::Table("empty table".into()));
        }
        let first = rows[0].theta;
        let n_phi = rows.iter().take_while(|r| r.theta == first).count();
        if !rows.len().is_multiple_of(n_phi) {
            return Err(GaugeError::Table(format!("{} rows is not a multiple of n_phi = {n_phi}", rows.len())));
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut theta = Vec::with_capacity(rows.len() / n_phi);
        for (b, block) in rows.chunks(n_phi).enumerate() {
            let t = block[0].theta;
            for (k, r) in block.iter().enumerate() {
                if r.theta != t {
                    return Err(GaugeError::Table(format!("row {}: θ changes inside a φ block", b * n_phi + k + 2)));
                }
                let want = two_pi * k as f64 / n_phi as f64;
                if (r.phi - want).abs() > 1e-9 * two_pi {
                    return Err(GaugeError::Table(format!(
                        "row {}: φ = {} but uniform periodic grid expects {want}",
                        b * n_phi + k + 2,
                        r.phi
                    )));
                }
            }
            theta.push(T::lit(t));
        }
        let chi = rows.iter().map(|r| T::lit(r.chi)).collect();
        Self::new(theta, n_phi, chi)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, GaugeError> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), GaugeError> {
        let mut w = csv::Writer::from_writer(writer);
        let phis = phi_nodes::<f64>(self.n_phi);
        for (i, t) in self.theta.iter().enumerate() {
            for (k, &p) in phis.iter().enumerate() {
                w.serialize(Row { theta: t.as_f64(), phi: p, chi: self.chi[i * self.n_phi + k].as_f64() })?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn phi_nodes<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|k| T::lit(2.0) * T::PI() * T::from_usize_exact(k) / T::from_usize_exact(n))
        .collect()
}

/// First-derivative weights at `x0` on three nodes.
fn fd_weights<T: Real>(x0: T, x: &[T]) -> [T; 3] {
    let mut w = [T::zero(); 3];
    for j in 0..3 {
        // d/dx of the Lagrange basis polynomial ℓ_j at x0
        let mut denom = T::one();
        for m in 0..3 {
            if m != j {
                denom = denom * (x[j] - x[m]);
            }
        }
        let mut num = T::zero();
        for a in 0..3 {
            if a == j {
                continue;
            }
            let mut prod = T::one();
            for m in 0..3 {
                if m != j && m != a {
                    prod = prod * (x0 - x[m]);
                }
            }
            num = num + prod;
        }
        w[j] = num / denom;
    }
    w
}

fn lagrange4<T: Real>(x: &[T], x0: T) -> [T; 4] {
    let mut w = [T::one(); 4];
    for j in 0..4 {
        for m in 0..4 {
            if m != j {
                w[j] = w[j] * (x0 - x[m]) / (x[j] - x[m]);
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth(t: f64, p: f64) -> f64 {
        0.3 * t.sin().powi(2) * p.cos() + 0.1 * t.cos()
    }

    #[test]
    fn reproduces_nodes_and_interpolates() {
        let theta = GaugeTable::<f64>::midpoint_theta(40);
        let table = GaugeTable::from_fn(theta.clone(), 32, smooth).unwrap();
        let p = 2.0 * std::f64::consts::PI * 5.0 / 32.0;
        assert!((table.chi(theta[7], p) - smooth(theta[7], p)).abs() < 1e-15);
        assert!((table.chi(1.234, 4.321) - smooth(1.234, 4.321)).abs() < 1e-5);
        // φ outside [0, 2π) wraps
        assert!((table.chi(1.0, 0.5 - 4.0 * std::f64::consts::PI) - table.chi(1.0, 0.5)).abs() < 1e-14);
    }

    #[test]
    fn derivative_tables_are_second_order() {
        let err = |n: usize| {
            let table = GaugeTable::<f64>::from_fn(GaugeTable::midpoint_theta(n), n, smooth).unwrap();
            let (dt, dp) = table.derivatives(1.1, 2.0);
            let want_t = 0.6 * 1.1f64.sin() * 1.1f64.cos() * 2.0f64.cos() - 0.1 * 1.1f64.sin();
            let want_p = -0.3 * 1.1f64.sin().powi(2) * 2.0f64.sin();
            (dt - want_t).abs().max((dp - want_p).abs())
        };
        let order = (err(32) / err(64)).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn csv_round_trip() {
        let table = GaugeTable::<f64>::from_fn(GaugeTable::midpoint_theta(6), 8, smooth).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("theta,phi,chi\n"));
        let back = GaugeTable::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.chi, table.chi);
        assert_eq!(back.n_phi(), 8);
    }

    #[test]
    fn rejects_bad_tables() {
        let bad_phi = "theta,phi,chi\n0.5,0,0\n0.5,1,0\n";
        assert!(GaugeTable::<f64>::read_csv(bad_phi.as_bytes()).is_err());
        assert!(GaugeTable::<f64>::new(vec![0.0, 1.0, 2.0, 3.0], 4, vec![0.0; 16]).is_err());
        assert!(GaugeTable::<f64>::new(vec![0.5, 0.4, 2.0, 3.0], 4, vec![0.0; 16]).is_err());
    }
}
