//! Spin/orbital split of the `LinearM(m)` helicity vectors over a polar sweep.

use anyhow::Result;
use photon_gauge_core::gauge::{basis_expectations, sz_lz_decomposition, triad, GaugeSpec};
use serde::Serialize;

use super::linspace;
use crate::config::RunConfig;
use crate::output::{Assertion, Report, Sink};

#[derive(Debug, Serialize)]
struct BasisRow {
    m: i32,
    lambda: i32,
    theta: f64,
    p_minus: f64,
    p_zero: f64,
    p_plus: f64,
    probability_sum: f64,
    s_z: f64,
    l_z: f64,
    s_z_plus_l_z: f64,
    j_z: f64,
}

#[derive(Debug, Serialize)]
struct DecompositionCsv {
    m: i32,
    lambda: i32,
    theta: f64,
    mu: i32,
    s_z: i32,
    l_z: i32,
    re: f64,
    im: f64,
    probability: f64,
}

#[derive(Debug, Serialize)]
struct TriadRow {
    m: i32,
    theta: f64,
    lambda: i32,
    mu: i32,
    re: f64,
    im: f64,
}

pub fn run(config: &RunConfig, sink: &Sink) -> Result<Report> {
    let c = &config.basis;
    let tol = &config.verify.tolerances;
    let thetas = linspace(0.0, std::f64::consts::PI, c.n_theta);
    let mut rows = Vec::new();
    let mut dec = Vec::new();
    let mut triads = Vec::new();
    let (mut worst_sum, mut worst_jz) = (0.0f64, 0.0f64);
    for &m in &c.m_values {
        for &theta in &thetas {
            let t = triad(theta, 0.0, &GaugeSpec::linear(m));
            for lambda in [-1, 0, 1] {
                for (k, mu) in [-1, 0, 1].into_iter().enumerate() {
                    let v = t.vector(lambda)[k];
                    triads.push(TriadRow { m, theta, lambda, mu, re: v.re, im: v.im });
                }
            }
            for &lambda in &c.lambdas {
                let d = sz_lz_decomposition(m, lambda, theta);
                let e = basis_expectations(m, lambda, theta);
                let p = d.rows.map(|r| r.probability);
                worst_sum = worst_sum.max((d.probability_sum() - 1.0).abs());
                worst_jz = worst_jz.max((e.s_z + e.l_z - e.j_z).abs());
                rows.push(BasisRow {
                    m,
                    lambda,
                    theta,
                    p_minus: p[0],
                    p_zero: p[1],
                    p_plus: p[2],
                    probability_sum: d.probability_sum(),
                    s_z: e.s_z,
                    l_z: e.l_z,
                    s_z_plus_l_z: e.s_z + e.l_z,
                    j_z: e.j_z,
                });
                for r in d.rows {
                    dec.push(DecompositionCsv {
                        m,
                        lambda,
                        theta,
                        mu: r.mu,
                        s_z: r.s_z,
                        l_z: r.l_z,
                        re: r.amplitude_re,
                        im: r.amplitude_im,
                        probability: r.probability,
                    });
                }
            }
        }
    }
    let files = vec![
        sink.csv("basis.csv", &rows)?,
        sink.csv("basis_decomposition.csv", &dec)?,
        sink.csv("basis_triads.csv", &triads)?,
        sink.text("plot_basis.py", include_str!("../plots/plot_basis.py"))?,
    ];
    let assertions = vec![
        Assertion::below("basis probability sum - 1", worst_sum, tol.probability),
        Assertion::below("basis s_z + l_z - j_z", worst_jz, tol.expectation),
    ];
    Ok(Report { assertions, files })
}
