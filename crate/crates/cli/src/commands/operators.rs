//! Two-grid checks of the commuting-component position operator.

use std::sync::Arc;

use anyhow::Result;
use photon_gauge_core::gauge::{GaugeSpec, GaugeTable};
use photon_gauge_core::operators::{
    basis_state, commutator_r_r, eigenrelation, gauge_covariance_check, jz_gauge_term, test_state, uncertainty_check,
    with_order, Axis, MomentumGrid, OperatorReport, UncertaintyReport,
};
use photon_gauge_core::{Gauge, Grid};
use serde::Serialize;

use super::parse_gauge;
use crate::config::{OperatorsConfig, RunConfig};
use crate::output::{Assertion, Report, Sink};

pub const PAIRS: [(Axis, Axis); 3] = [(Axis::X, Axis::Y), (Axis::Y, Axis::Z), (Axis::Z, Axis::X)];

pub struct Grids {
    pub coarse: Arc<Grid>,
    pub fine: Arc<Grid>,
}

impl Grids {
    pub fn new(c: &OperatorsConfig) -> Result<Self> {
        Ok(Self { coarse: Arc::new(MomentumGrid::new(c.coarse)?), fine: Arc::new(MomentumGrid::new(c.fine)?) })
    }

    fn both(&self) -> [&Arc<Grid>; 2] {
        [&self.coarse, &self.fine]
    }
}

fn gauges(c: &OperatorsConfig) -> Result<Vec<Gauge>> {
    c.gauges.iter().map(|g| parse_gauge(g)).collect()
}

/// `[r_j, r_k]` on the test state for every gauge and pair, fine grid with
/// the coarse-to-fine order attached.
pub fn commutators(c: &OperatorsConfig, grids: &Grids) -> Result<Vec<OperatorReport>> {
    let alpha = c.alphas[0];
    let mut out = Vec::new();
    for g in gauges(c)? {
        let [coarse, fine] = grids.both().map(|gr| test_state(gr.clone(), &c.state, &g, alpha));
        for (j, k) in PAIRS {
            let rc = commutator_r_r(&coarse, &g, j, k)?;
            out.push(with_order(&rc, commutator_r_r(&fine, &g, j, k)?));
        }
    }
    Ok(out)
}

/// `‖r Ψ_{0,λ}‖ / ‖Ψ_{0,λ}‖` on the fine grid for `λ = ±1` and every `α`.
pub fn eigenrelations(c: &OperatorsConfig, grids: &Grids) -> Result<Vec<OperatorReport>> {
    let mut out = Vec::new();
    for g in gauges(c)? {
        for &alpha in &c.alphas {
            for lambda in [1, -1] {
                let psi = basis_state(grids.fine.clone(), lambda, &g, alpha);
                let mut r = eigenrelation(&psi, &g)?;
                r.name = format!("eigenrelation[{g}, lambda={lambda}, alpha={alpha}]");
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// `χ = a sin²θ cos φ`, sampled at `factor` times the grid's `N_θ` per axis.
pub fn covariance_table(c: &OperatorsConfig, grid: &Grid) -> Result<Gauge> {
    let n = c.covariance_table_factor * grid.n_theta();
    let a = c.covariance_amplitude;
    let table = GaugeTable::from_fn(GaugeTable::midpoint_theta(n), n, |t: f64, p: f64| a * t.sin().powi(2) * p.cos())?;
    Ok(GaugeSpec::tabulated(table, format!("table:{a}*sin^2(theta)cos(phi)")))
}

/// Covariance of `r` from the zero gauge to the configured linear target
/// and to the tabulated gauge, all three axes.
pub fn covariances(c: &OperatorsConfig, grids: &Grids) -> Result<(Vec<OperatorReport>, Vec<OperatorReport>)> {
    let from = GaugeSpec::zero();
    let linear = parse_gauge(&c.covariance_target)?;
    let tables = [covariance_table(c, &grids.coarse)?, covariance_table(c, &grids.fine)?];
    let alpha = c.alphas[0];
    let [coarse, fine] = grids.both().map(|gr| test_state(gr.clone(), &c.state, &from, alpha));
    let mut lin = Vec::new();
    let mut tab = Vec::new();
    for axis in Axis::ALL {
        let rc = gauge_covariance_check(&coarse, &from, &linear, axis)?;
        lin.push(with_order(&rc, gauge_covariance_check(&fine, &from, &linear, axis)?));
        let rc = gauge_covariance_check(&coarse, &from, &tables[0], axis)?;
        tab.push(with_order(&rc, gauge_covariance_check(&fine, &from, &tables[1], axis)?));
    }
    Ok((lin, tab))
}

#[derive(Debug, Clone, Serialize)]
pub struct JzRow {
    pub gauge: String,
    /// Pointwise `|(∂n_z/∂p_k)(p̂·S) ψ|` relative to `max|ψ|`.
    pub gauge_term: f64,
    pub uncertainty: Vec<UncertaintyReport>,
}

/// `J_z` compatibility for each configured gauge, fine grid.
pub fn jz_compatibility(c: &OperatorsConfig, grids: &Grids) -> Result<Vec<JzRow>> {
    let mut out = Vec::new();
    for g in gauges(c)? {
        let psi = test_state(grids.fine.clone(), &c.state, &g, c.alphas[0]);
        let gauge_term = jz_gauge_term(&psi, &g)?;
        let uncertainty =
            Axis::ALL.iter().map(|&k| uncertainty_check(&psi, &g, Axis::Z, k, c.tolerances.bound)).collect::<Result<_, _>>()?;
        out.push(JzRow { gauge: g.to_string(), gauge_term, uncertainty });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct ReportRow<'a> {
    check: &'a str,
    name: &'a str,
    n_p: usize,
    n_theta: usize,
    n_phi: usize,
    residual: f64,
    reference: f64,
    relative: f64,
    order: Option<f64>,
}

fn rows<'a>(check: &'a str, reports: &'a [OperatorReport]) -> impl Iterator<Item = ReportRow<'a>> {
    reports.iter().map(move |r| ReportRow {
        check,
        name: &r.name,
        n_p: r.grid_resolution.0,
        n_theta: r.grid_resolution.1,
        n_phi: r.grid_resolution.2,
        residual: r.residual_norm,
        reference: r.reference_norm,
        relative: r.relative(),
        order: r.convergence_order,
    })
}

#[derive(Debug, Serialize)]
struct OperatorsJson<'a> {
    commutators: &'a [OperatorReport],
    eigenrelations: &'a [OperatorReport],
    covariance_linear: &'a [OperatorReport],
    covariance_table: &'a [OperatorReport],
    jz: &'a [JzRow],
}

fn order(r: &OperatorReport) -> f64 {
    r.convergence_order.unwrap_or(f64::NAN)
}

pub fn run(config: &RunConfig, sink: &Sink) -> Result<Report> {
    let c = &config.operators;
    let t = &c.tolerances;
    let grids = Grids::new(c)?;
    log::info!("commutators");
    let comm = commutators(c, &grids)?;
    log::info!("eigenrelations");
    let eig = eigenrelations(c, &grids)?;
    log::info!("covariance");
    let (lin, tab) = covariances(c, &grids)?;
    log::info!("J_z compatibility");
    let jz = jz_compatibility(c, &grids)?;

    let rel = |rs: &[OperatorReport]| rs.iter().map(|r| r.relative()).collect::<Vec<_>>();
    let assertions = vec![
        Assertion::worst_below("[r_j, r_k] fine residual", rel(&comm), t.residual),
        Assertion::worst_within("[r_j, r_k] order", comm.iter().map(order), t.order, t.order_window),
        Assertion::worst_below("eigenrelation", rel(&eig), t.residual),
        Assertion::worst_below(format!("covariance zero->{}", c.covariance_target), rel(&lin), t.residual),
        Assertion::worst_below("covariance zero->table", rel(&tab), t.residual),
        Assertion::worst_within("covariance zero->table order", tab.iter().map(order), t.order, t.covariance_order_window),
        Assertion::worst_below("J_z gauge term", jz.iter().map(|r| r.gauge_term), t.gauge_term),
        Assertion::worst_below("(J_z, r_k) uncertainty bound", jz.iter().flat_map(|r| r.uncertainty.iter().map(|u| u.bound)), t.bound),
    ];

    let table: Vec<ReportRow> = rows("commutator", &comm)
        .chain(rows("eigenrelation", &eig))
        .chain(rows("covariance_linear", &lin))
        .chain(rows("covariance_table", &tab))
        .collect();
    let files = vec![
        sink.csv("operators.csv", &table)?,
        sink.json(
            "operators.json",
            &OperatorsJson { commutators: &comm, eigenrelations: &eig, covariance_linear: &lin, covariance_table: &tab, jz: &jz },
        )?,
    ];
    Ok(Report { assertions, files })
}
