//! Gauge potential maps, Dirac-string flux and the monopole curl test.

use anyhow::Result;
use photon_gauge_core::gauge::{gauge_potential, monopole_curl_check, string_flux, Pole};
use photon_gauge_core::Gauge;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{halving_order, parse_gauge};
use crate::config::{GaugeConfig, RunConfig};
use crate::output::{Assertion, Report, Sink};

#[derive(Debug, Serialize)]
struct PotentialRow<'a> {
    gauge: &'a str,
    theta: f64,
    phi: f64,
    a_theta: f64,
    a_phi: f64,
    a_x: f64,
    a_y: f64,
    a_z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxRow {
    pub gauge: String,
    pub pole: Pole,
    pub flux: f64,
    /// `1 - m` north, `-(1 + m)` south for `linear:m`.
    pub expected: Option<f64>,
}

#[derive(Debug, Serialize)]
struct MonopoleRow<'a> {
    gauge: &'a str,
    point: usize,
    p: f64,
    theta: f64,
    phi: f64,
    step: f64,
    relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonopoleOrder {
    pub gauge: String,
    pub point: usize,
    pub order: f64,
}

/// Off-string sample points `(p, θ, φ)` drawn from the seeded stream.
pub fn monopole_points(c: &GaugeConfig) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    (0..c.monopole_points)
        .map(|_| {
            let p = rng.random_range(0.5..2.0);
            let cos_t: f64 = rng.random_range(-0.9..0.9);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            (p, cos_t.acos(), phi)
        })
        .collect()
}

pub fn flux_rows(gauge: &Gauge, p: f64) -> Result<Vec<FluxRow>> {
    let m = gauge.linear_m();
    let mut rows = Vec::new();
    for pole in [Pole::North, Pole::South] {
        let expected = m.map(|m| match pole {
            Pole::North => (1 - m) as f64,
            Pole::South => -(1 + m) as f64,
        });
        rows.push(FluxRow { gauge: gauge.to_string(), pole, flux: string_flux(gauge, p, pole)?, expected });
    }
    Ok(rows)
}

/// Per-point convergence order of the central-difference curl over the
/// configured step halvings, with the raw error table.
fn monopole_table<'a>(
    gauge: &Gauge,
    name: &'a str,
    c: &GaugeConfig,
    points: &[(f64, f64, f64)],
    rows: &mut Vec<MonopoleRow<'a>>,
) -> Result<Vec<MonopoleOrder>> {
    let mut orders = Vec::new();
    for (i, &(p, theta, phi)) in points.iter().enumerate() {
        let mut errors = Vec::new();
        for k in 0..=c.monopole_halvings {
            let step = c.monopole_step / 2f64.powi(k as i32);
            let e = monopole_curl_check(gauge, p, theta, phi, step)?.relative_error;
            rows.push(MonopoleRow { gauge: name, point: i, p, theta, phi, step, relative_error: e });
            errors.push(e);
        }
        orders.push(MonopoleOrder { gauge: gauge.to_string(), point: i, order: halving_order(&errors) });
    }
    Ok(orders)
}

pub fn monopole_orders(gauge: &Gauge, c: &GaugeConfig) -> Result<Vec<MonopoleOrder>> {
    let mut scratch = Vec::new();
    monopole_table(gauge, "", c, &monopole_points(c), &mut scratch)
}

pub fn run(config: &RunConfig, sink: &Sink) -> Result<Report> {
    let c = &config.gauge;
    let tol = &config.verify.tolerances;
    let gauges: Vec<Gauge> =
        c.gauges.iter().map(|g| parse_gauge(g).map(|g| g.with_exclusion(c.exclusion))).collect::<Result<_>>()?;
    let thetas: Vec<f64> = (0..c.n_theta).map(|i| std::f64::consts::PI * (i as f64 + 0.5) / c.n_theta as f64).collect();
    let phis: Vec<f64> = (0..c.n_phi).map(|k| std::f64::consts::TAU * k as f64 / c.n_phi as f64).collect();
    let points = monopole_points(c);

    let mut potential = Vec::new();
    let mut flux = Vec::new();
    let mut monopole = Vec::new();
    let mut orders = Vec::new();
    for (g, name) in gauges.iter().zip(&c.gauges) {
        for &theta in &thetas {
            for &phi in &phis {
                let a = gauge_potential(g, c.p, theta, phi)?;
                potential.push(PotentialRow {
                    gauge: name,
                    theta,
                    phi,
                    a_theta: a.theta_component,
                    a_phi: a.phi_component,
                    a_x: a.vector[0],
                    a_y: a.vector[1],
                    a_z: a.vector[2],
                });
            }
        }
        flux.extend(flux_rows(g, c.p)?);
        orders.extend(monopole_table(g, name, c, &points, &mut monopole)?);
    }

    let flux_err = flux.iter().filter_map(|r| r.expected.map(|e| (r.flux - e).abs()));
    let mut assertions = vec![Assertion::worst_below("string flux error", flux_err, tol.flux)];
    assertions.push(Assertion::worst_within(
        "monopole curl order",
        orders.iter().map(|o| o.order),
        2.0,
        tol.monopole_order_window,
    ));
    let files = vec![
        sink.csv("gauge_potential.csv", &potential)?,
        sink.csv("gauge_flux.csv", &flux)?,
        sink.csv("gauge_monopole.csv", &monopole)?,
        sink.csv("gauge_monopole_order.csv", &orders)?,
        sink.text("plot_gauge.py", include_str!("../plots/plot_gauge.py"))?,
    ];
    Ok(Report { assertions, files })
}
