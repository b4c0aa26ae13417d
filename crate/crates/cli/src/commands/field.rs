//! Position-space field synthesis: vortex windings, axis nulls, the
//! annular ring and gauge invariance of the synthesized field.

use anyhow::Result;
use photon_gauge_core::synthesis::{
    annular_profile, field_gauge_invariance, on_axis_null, vortex_winding, FieldGrid, FieldSynthesizer,
    LocalizedStateSpec, PositionField, RadialSpectrum,
};
use photon_gauge_core::Field;
use serde::Serialize;

use super::{parse_gauge, state_spec};
use crate::config::RunConfig;
use crate::output::{Assertion, Report, Sink};

#[derive(Debug, Clone, Serialize)]
pub struct WindingRow {
    pub m: i32,
    pub mu: i32,
    /// `λm - μ` for a single-helicity state.
    pub expected: Option<i32>,
    pub winding: Option<i32>,
    pub r: f64,
    pub theta: f64,
    /// Largest on-axis `|E_μ|` relative to the field peak.
    pub axis_relative: Option<f64>,
    pub error: Option<String>,
}

/// Contour ring used for the windings: middle radius, polar angle nearest π/2.
pub fn contour(grid: &FieldGrid<f64>) -> (usize, usize) {
    let ir = (grid.r.len() / 2).max(1).min(grid.r.len() - 1);
    let it = (0..grid.theta.len())
        .min_by(|&a, &b| {
            let d = |i: usize| (grid.theta[i] - std::f64::consts::FRAC_PI_2).abs();
            d(a).total_cmp(&d(b))
        })
        .unwrap_or(0);
    (ir, it)
}

pub fn winding_table(spec: &LocalizedStateSpec<f64>, field: &Field) -> Vec<WindingRow> {
    let (ir, it) = contour(&field.grid);
    let lambdas = spec.helicity.lambdas();
    [-1, 0, 1]
        .into_iter()
        .map(|mu| {
            let expected = (lambdas.len() == 1).then(|| spec.azimuthal_index(lambdas[0], mu));
            let (winding, error) = match vortex_winding(field, mu, ir, it) {
                Ok(n) => (Some(n), None),
                Err(e) => (None, Some(e.to_string())),
            };
            WindingRow {
                m: spec.m,
                mu,
                expected,
                winding,
                r: field.grid.r[ir],
                theta: field.grid.theta[it],
                axis_relative: on_axis_null(field, mu),
                error,
            }
        })
        .collect()
}

pub fn field_grid(config: &RunConfig) -> Result<FieldGrid<f64>> {
    let g = &config.field.grid;
    Ok(FieldGrid::uniform(g.r_max, g.n_r, g.n_theta, g.n_phi)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Invariance {
    pub gauge_a: String,
    pub gauge_b: String,
    /// Relative L2 distance with the compensating phase applied in gauge B.
    pub compensated: f64,
    /// Same without the phase.
    pub uncompensated: f64,
}

pub fn invariance(spec: &LocalizedStateSpec<f64>, other: &str, grid: &FieldGrid<f64>, t: f64) -> Result<Invariance> {
    let b = parse_gauge(other)?;
    let compensated = field_gauge_invariance(spec, &spec.clone().with_gauge(b.clone(), true), grid, t)?;
    let uncompensated = field_gauge_invariance(spec, &spec.clone().with_gauge(b, false), grid, t)?;
    Ok(Invariance { gauge_a: spec.gauge.to_string(), gauge_b: other.to_string(), compensated, uncompensated })
}

#[derive(Debug, Serialize)]
struct ProfileRow {
    r: f64,
    intensity: f64,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    p0: f64,
    peak_radius: f64,
}

#[derive(Debug, Serialize)]
struct FieldJson<'a> {
    summary: photon_gauge_core::synthesis::FieldSummary,
    components: Vec<ComponentTail>,
    invariance: &'a Invariance,
    ring_peak_radius: f64,
}

#[derive(Debug, Serialize)]
struct ComponentTail {
    lambda: i32,
    mu: i32,
    l_max: u32,
    tail_estimate: f64,
    accepted: bool,
}

fn with_p0(spec: &LocalizedStateSpec<f64>, p0: f64) -> LocalizedStateSpec<f64> {
    let mut s = spec.clone();
    s.radial = match s.radial {
        RadialSpectrum::PowerLawCutoff { alpha, .. } => RadialSpectrum::PowerLawCutoff { alpha, p0 },
        _ => RadialSpectrum::Exponential { p0 },
    };
    s
}

fn field_csv(field: &PositionField<f64>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    field.write_csv(&mut buf)?;
    Ok(buf)
}

pub fn run(config: &RunConfig, sink: &Sink) -> Result<Report> {
    let c = &config.field;
    let tol = &config.verify.tolerances;
    let spec = state_spec(c)?;
    let grid = field_grid(config)?;
    log::info!("synthesizing m={} on {} points", c.m, grid.len());
    let synth = FieldSynthesizer::new(&spec)?;
    let field = synth.synthesize(&grid, c.t)?;
    let windings = winding_table(&spec, &field);

    log::info!("ring profile");
    let ring = annular_profile(&spec, c.ring.r_max, c.ring.n_r)?;
    let mut sweep = Vec::new();
    for &p0 in &c.ring.p0_sweep {
        sweep.push(SweepRow { p0, peak_radius: annular_profile(&with_p0(&spec, p0), c.ring.r_max, c.ring.n_r)?.peak_radius });
    }
    log::info!("gauge invariance against {}", c.invariance_gauge);
    let inv = invariance(&spec, &c.invariance_gauge, &grid, c.t)?;

    let mismatches = windings.iter().filter(|w| w.expected.is_some() && w.winding != w.expected).count();
    let nulls = windings.iter().filter(|w| w.expected.is_some_and(|n| n != 0)).map(|w| w.axis_relative.unwrap_or(f64::NAN));
    let mut sorted: Vec<&SweepRow> = sweep.iter().collect();
    sorted.sort_by(|a, b| a.p0.total_cmp(&b.p0));
    let non_monotone = sorted.windows(2).filter(|w| !(w[1].peak_radius < w[0].peak_radius)).count();
    let assertions = vec![
        Assertion::below("winding mismatches", mismatches as f64, 0.5),
        Assertion::worst_below("on-axis |E_mu| / peak", nulls, tol.axis_null),
        Assertion::below("ring radius increases with p0", non_monotone as f64, 0.5),
        Assertion::below("compensated A/B distance", inv.compensated, tol.invariance),
        Assertion::above("uncompensated A/B distance", inv.uncompensated, tol.control),
    ];

    let components = synth
        .coefficients()
        .components
        .iter()
        .map(|p| ComponentTail { lambda: p.lambda, mu: p.mu, l_max: p.l_max, tail_estimate: p.tail_estimate, accepted: p.accepted() })
        .collect();
    let profile: Vec<ProfileRow> = ring.radii.iter().zip(&ring.intensity).map(|(&r, &intensity)| ProfileRow { r, intensity }).collect();
    let files = vec![
        sink.write("field.csv", field_csv(&field)?)?,
        sink.csv("field_winding.csv", &windings)?,
        sink.csv("field_ring_profile.csv", &profile)?,
        sink.csv("field_ring_sweep.csv", &sweep)?,
        sink.json(
            "field.json",
            &FieldJson { summary: field.summary(), components, invariance: &inv, ring_peak_radius: ring.peak_radius },
        )?,
        sink.text("plot_field.py", include_str!("../plots/plot_field.py"))?,
        sink.text("plot_ring.py", include_str!("../plots/plot_ring.py"))?,
    ];
    Ok(Report { assertions, files })
}
