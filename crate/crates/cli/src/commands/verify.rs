//! The acceptance suite: thirteen criteria, each decided on measured numbers.

use std::f64::consts::PI;
use std::fmt;

use anyhow::Result;
use photon_gauge_core::gauge::{basis_expectations, gauge_transform_phase, helicity_vector, sz_lz_decomposition, triad, GaugeSpec};
use photon_gauge_core::specfun::rotation_matrix;
use photon_gauge_core::synthesis::{
    angular_coefficients, radial_transform, AngularWeight, FieldSynthesizer, HelicitySelection, LocalizedStateSpec,
    RadialSpectrum, TAIL_TOLERANCE,
};
use photon_gauge_core::Gauge;
use serde::Serialize;

use super::field::{field_grid, invariance, winding_table};
use super::gauge::{flux_rows, monopole_orders};
use super::operators::{commutators, covariances, eigenrelations, jz_compatibility, Grids};
use super::{linspace, parse_gauge};
use crate::config::RunConfig;
use crate::output::{Assertion, Report, Sink};

pub const CRITERIA: [&str; 13] = [
    "basis expectations",
    "triad identities",
    "Dirac-string flux",
    "monopole law",
    "commuting components",
    "position eigenrelation",
    "gauge covariance",
    "J_z compatibility",
    "c_l selectivity",
    "radial-transform oracle",
    "vortex winding",
    "field gauge invariance",
    "determinism",
];

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.assertions.is_empty() && self.assertions.iter().all(|a| a.passed)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let parts: Vec<String> = self.assertions.iter().map(|a| a.to_string()).collect();
        write!(f, "[{status}] {:02} {}: {}", self.id, self.name, parts.join("; "))?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

/// Runs criterion `id` (1-based). Errors become a failing criterion.
pub fn criterion(id: usize, config: &RunConfig) -> Criterion {
    let name = CRITERIA[id - 1];
    let result = match id {
        1 => basis_expectations_check(config),
        2 => triad_identities(config),
        3 => dirac_flux(config),
        4 => monopole_law(config),
        5 => commuting_components(config),
        6 => position_eigenrelation(config),
        7 => gauge_covariance(config),
        8 => jz_compatibility_check(config),
        9 => selectivity(config),
        10 => radial_oracle(config),
        11 => vortex_winding_check(config),
        12 => field_invariance(config),
        13 => determinism(config),
        _ => unreachable!("criteria are numbered 1 to 13"),
    };
    match result {
        Ok((assertions, note)) => Criterion { id, name, assertions, note },
        Err(e) => Criterion {
            id,
            name,
            assertions: vec![Assertion::below("error", f64::NAN, 0.0)],
            note: Some(format!("{e:#}")),
        },
    }
}

type Outcome = Result<(Vec<Assertion>, Option<String>)>;

fn basis_expectations_check(config: &RunConfig) -> Outcome {
    let tol = &config.verify.tolerances;
    let (mut sz, mut lz, mut prob) = (0.0f64, 0.0f64, 0.0f64);
    for m in -2..=2 {
        for lambda in [1, -1] {
            for theta in linspace(0.0, PI, 64) {
                let e = basis_expectations(m, lambda, theta);
                sz = sz.max((e.s_z - theta.cos()).abs());
                lz = lz.max((e.l_z - (m as f64 - theta.cos())).abs());
                prob = prob.max((sz_lz_decomposition(m, lambda, theta).probability_sum() - 1.0).abs());
            }
        }
    }
    Ok((
        vec![
            Assertion::below("|<S_z> - cos(theta)|", sz, tol.expectation),
            Assertion::below("|<L_z> - (m - cos(theta))|", lz, tol.expectation),
            Assertion::below("|sum P - 1|", prob, tol.probability),
        ],
        None,
    ))
}

fn max_diff(a: &[num_complex::Complex<f64>; 3], b: &[num_complex::Complex<f64>; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn triad_identities(config: &RunConfig) -> Outcome {
    let gauges: Vec<Gauge> = [0, 1, -1, 2, -2].map(|m| if m == 0 { GaugeSpec::zero() } else { GaugeSpec::linear(m) }).to_vec();
    let (mut ortho, mut hel, mut phase, mut dcol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..32 {
        let theta = PI * (i as f64 + 0.5) / 32.0;
        for k in 0..32 {
            let phi = 2.0 * PI * k as f64 / 32.0;
            for g in &gauges {
                let t = triad(theta, phi, g);
                ortho = ortho.max(t.orthonormality_error());
                hel = hel.max(t.helicity_error());
                for lambda in [1, -1] {
                    let e = helicity_vector(lambda, theta, phi, g);
                    let d = rotation_matrix(phi, theta, g.chi(theta, phi)).column(lambda);
                    dcol = dcol.max(max_diff(&e, &d));
                    for h in &gauges {
                        let c = gauge_transform_phase(g, h, lambda, theta, phi);
                        let want = e.map(|v| v * c);
                        phase = phase.max(max_diff(&helicity_vector(lambda, theta, phi, h), &want));
                    }
                }
            }
        }
    }
    let tol = config.verify.tolerances.triad;
    Ok((
        vec![
            Assertion::below("orthonormality", ortho, tol),
            Assertion::below("helicity eigenrelation", hel, tol),
            Assertion::below("gauge phase rule", phase, tol),
            Assertion::below("D-column identity", dcol, tol),
        ],
        None,
    ))
}

fn dirac_flux(config: &RunConfig) -> Outcome {
    let sign = config.verify.potential_sign;
    let mut worst = 0.0f64;
    for m in -2..=2 {
        for row in flux_rows(&GaugeSpec::linear(m), config.gauge.p)? {
            let want = row.expected.expect("linear gauge");
            worst = worst.max((sign * row.flux - want).abs());
        }
    }
    let note = (sign != 1.0).then(|| format!("potential sign {sign}"));
    Ok((vec![Assertion::below("max |flux - (1-m, -(1+m))|", worst, config.verify.tolerances.flux)], note))
}

fn monopole_law(config: &RunConfig) -> Outcome {
    let mut orders = Vec::new();
    for g in &config.gauge.gauges {
        orders.extend(monopole_orders(&parse_gauge(g)?.with_exclusion(config.gauge.exclusion), &config.gauge)?);
    }
    let w = config.verify.tolerances.monopole_order_window;
    Ok((vec![Assertion::worst_within("curl order", orders.iter().map(|o| o.order), 2.0, w)], None))
}

fn commuting_components(config: &RunConfig) -> Outcome {
    let tol = &config.verify.tolerances;
    let reports = commutators(&config.operators, &Grids::new(&config.operators)?)?;
    Ok((
        vec![
            Assertion::worst_below("fine residual", reports.iter().map(|r| r.relative()), tol.commutator),
            Assertion::worst_within(
                "order",
                reports.iter().map(|r| r.convergence_order.unwrap_or(f64::NAN)),
                2.0,
                tol.commutator_order_window,
            ),
        ],
        None,
    ))
}

fn position_eigenrelation(config: &RunConfig) -> Outcome {
    let reports = eigenrelations(&config.operators, &Grids::new(&config.operators)?)?;
    let tol = config.verify.tolerances.eigenrelation;
    Ok((vec![Assertion::worst_below("|r psi| / |psi|", reports.iter().map(|r| r.relative()), tol)], None))
}

fn gauge_covariance(config: &RunConfig) -> Outcome {
    let tol = &config.verify.tolerances;
    let (lin, tab) = covariances(&config.operators, &Grids::new(&config.operators)?)?;
    Ok((
        vec![
            Assertion::worst_below(
                format!("zero->{} residual", config.operators.covariance_target),
                lin.iter().map(|r| r.relative()),
                tol.covariance,
            ),
            Assertion::worst_below("zero->table residual", tab.iter().map(|r| r.relative()), tol.covariance),
            Assertion::worst_within(
                "zero->table order",
                tab.iter().map(|r| r.convergence_order.unwrap_or(f64::NAN)),
                2.0,
                tol.covariance_order_window,
            ),
        ],
        None,
    ))
}

fn jz_compatibility_check(config: &RunConfig) -> Outcome {
    let tol = &config.verify.tolerances;
    let rows = jz_compatibility(&config.operators, &Grids::new(&config.operators)?)?;
    Ok((
        vec![
            Assertion::worst_below("gauge term", rows.iter().map(|r| r.gauge_term), tol.jz_term),
            Assertion::worst_below(
                "uncertainty bound",
                rows.iter().flat_map(|r| r.uncertainty.iter().map(|u| u.bound)),
                tol.uncertainty_bound,
            ),
        ],
        None,
    ))
}

fn selectivity(config: &RunConfig) -> Outcome {
    let tol = config.verify.tolerances.selectivity;
    let spec = |m: i32, g: AngularWeight<f64>| {
        LocalizedStateSpec::new(m, HelicitySelection::Plus, RadialSpectrum::Exponential { p0: 1.0 }, g)
    };
    let cases: [(i32, AngularWeight<f64>, i32, &[u32]); 3] =
        [(1, AngularWeight::One, 0, &[1]), (1, AngularWeight::One, 1, &[0, 1]), (0, AngularWeight::SinTheta, 0, &[0, 2])];
    let (mut leak, mut weakest) = (0.0f64, f64::INFINITY);
    for (m, g, mu, support) in cases {
        let c = angular_coefficients(&spec(m, g), 1, mu, 20)?;
        let top = c.entries.iter().map(|e| e.1.norm()).fold(0.0, f64::max);
        for &l in support {
            let v = c.entries.iter().find(|e| e.0 == l).map_or(0.0, |e| e.1.norm());
            weakest = weakest.min(v / top);
        }
        for (l, v) in &c.entries {
            if !support.contains(l) {
                leak = leak.max(v.norm() / top);
            }
        }
    }
    Ok((
        vec![
            Assertion::below("largest coefficient outside the support", leak, tol),
            Assertion::above("smallest coefficient on the support", weakest, tol),
        ],
        None,
    ))
}

fn radial_oracle(config: &RunConfig) -> Outcome {
    let spectrum = RadialSpectrum::Exponential { p0: 1.0 };
    let mut worst = 0.0f64;
    for r in linspace(0.0, 20.0, 81) {
        let got = radial_transform(&spectrum, 0, r, 0.0)?;
        let want = 2.0 / (1.0 + r * r).powi(2);
        worst = worst.max((got - want).norm() / want);
    }
    Ok((vec![Assertion::below("relative error on [0, 20]", worst, config.verify.tolerances.radial)], None))
}

fn vortex_winding_check(config: &RunConfig) -> Outcome {
    let grid = field_grid(config)?;
    let (mut mismatches, mut nulls, mut tail) = (0usize, 0.0f64, 0.0f64);
    let mut notes = Vec::new();
    for m in 0..=2 {
        let mut spec = LocalizedStateSpec::new(
            m,
            HelicitySelection::Plus,
            RadialSpectrum::Exponential { p0: config.field.p0 },
            AngularWeight::SinPower(m.unsigned_abs() + 1),
        );
        spec.l_max = config.verify.field_l_max;
        let synth = FieldSynthesizer::new(&spec)?;
        tail = tail.max(synth.coefficients().max_tail());
        let field = match synth.synthesize(&grid, 0.0) {
            Ok(f) => f,
            Err(e) => {
                notes.push(format!("m={m}: {e}"));
                mismatches += 3;
                nulls = f64::NAN;
                continue;
            }
        };
        for w in winding_table(&spec, &field) {
            if w.winding != w.expected {
                mismatches += 1;
                if let Some(e) = w.error {
                    notes.push(format!("m={m} mu={}: {e}", w.mu));
                }
            }
            if w.expected != Some(0) {
                nulls = nulls.max(w.axis_relative.unwrap_or(f64::NAN));
            }
        }
    }
    let tol = &config.verify.tolerances;
    Ok((
        vec![
            Assertion::below("winding mismatches", mismatches as f64, 0.5),
            Assertion::below("on-axis |E_mu| / peak", nulls, tol.axis_null),
            Assertion::below("angular tail", tail, TAIL_TOLERANCE),
        ],
        (!notes.is_empty()).then(|| notes.join("; ")),
    ))
}

fn field_invariance(config: &RunConfig) -> Outcome {
    let spec = LocalizedStateSpec::new(
        1,
        HelicitySelection::Plus,
        RadialSpectrum::Exponential { p0: config.field.p0 },
        AngularWeight::SinPower(4),
    );
    let inv = invariance(&spec, &config.field.invariance_gauge, &field_grid(config)?, 0.0)?;
    let tol = &config.verify.tolerances;
    Ok((
        vec![
            Assertion::below("compensated relative L2", inv.compensated, tol.invariance),
            Assertion::above("uncompensated relative L2", inv.uncompensated, tol.control),
        ],
        None,
    ))
}

/// Data files of `basis`, `gauge` and `field`, generated twice in memory.
fn determinism(config: &RunConfig) -> Outcome {
    let once = || -> Result<_> {
        let sink = Sink::memory();
        super::basis::run(config, &sink)?;
        super::gauge::run(config, &sink)?;
        super::field::run(config, &sink)?;
        Ok(sink.files())
    };
    let (a, b) = (once()?, once()?);
    let differing: Vec<&String> = a.keys().chain(b.keys()).filter(|k| a.get(*k) != b.get(*k)).collect();
    let note = (!differing.is_empty()).then(|| format!("differing: {differing:?}"));
    Ok((vec![Assertion::below("files differing between runs", differing.len() as f64, 0.5)], note))
}

#[derive(Debug, Serialize)]
struct VerifyRow<'a> {
    id: usize,
    criterion: &'a str,
    assertion: &'a str,
    measured: f64,
    comparison: crate::output::Comparison,
    target: Option<f64>,
    tolerance: f64,
    passed: bool,
}

pub fn run(config: &RunConfig, sink: &Sink) -> Result<Report> {
    let mut criteria = Vec::new();
    for id in 1..=CRITERIA.len() {
        let c = criterion(id, config);
        println!("{c}");
        criteria.push(c);
    }
    let rows: Vec<VerifyRow> = criteria
        .iter()
        .flat_map(|c| {
            c.assertions.iter().map(move |a| VerifyRow {
                id: c.id,
                criterion: c.name,
                assertion: &a.name,
                measured: a.measured,
                comparison: a.comparison,
                target: a.target,
                tolerance: a.tolerance,
                passed: a.passed,
            })
        })
        .collect();
    let files = vec![sink.csv("verify.csv", &rows)?, sink.json("verify.json", &criteria)?];
    let assertions = criteria
        .iter()
        .flat_map(|c| {
            c.assertions.iter().map(move |a| Assertion { name: format!("{:02} {}: {}", c.id, c.name, a.name), ..a.clone() })
        })
        .collect();
    Ok(Report { assertions, files })
}
