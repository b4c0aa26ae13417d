//! Run configuration.
//!
//! A run is described by a TOML file whose every key has a default, so an
//! empty file (or no file at all) is a valid configuration. Values given on
//! the command line as `--set block.key=value` are applied on top of the
//! file. See `docs/config.md` at the repository root for the full key list.

use std::path::Path;

use photon_gauge_core::gauge::GaugeSpec;
use photon_gauge_core::operators::{GridSpec, PSpacing, TestState};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("--set {0}: expected key=value")]
    SetSyntax(String),
    #[error("--set {key}: `{segment}` is not a table")]
    SetPath { key: String, segment: String },
    #[error("unsupported schema_version {0} (this build reads version {SCHEMA_VERSION})")]
    Schema(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{key}: {message}")]
    Value { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: i64,
    pub basis: BasisConfig,
    pub gauge: GaugeConfig,
    pub operators: OperatorsConfig,
    pub field: FieldConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            basis: BasisConfig::default(),
            gauge: GaugeConfig::default(),
            operators: OperatorsConfig::default(),
            field: FieldConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub m_values: Vec<i32>,
    pub lambdas: Vec<i32>,
    /// Polar samples from 0 to π inclusive.
    pub n_theta: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { m_values: vec![-2, -1, 0, 1, 2], lambdas: vec![1, -1], n_theta: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    /// `zero`, `linear:M` or `table:PATH`.
    pub gauges: Vec<String>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub p: f64,
    pub exclusion: f64,
    pub monopole_points: usize,
    pub monopole_step: f64,
    pub monopole_halvings: usize,
    pub seed: u64,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        Self {
            gauges: ["zero", "linear:1", "linear:-1", "linear:2", "linear:-2"].map(String::from).to_vec(),
            n_theta: 32,
            n_phi: 32,
            p: 1.0,
            exclusion: 1e-6,
            monopole_points: 10,
            monopole_step: 0.04,
            monopole_halvings: 3,
            seed: 20_240_917,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorsConfig {
    pub gauges: Vec<String>,
    pub alphas: Vec<f64>,
    pub coarse: GridSpec,
    pub fine: GridSpec,
    pub state: TestState,
    pub covariance_target: String,
    /// The tabulated covariance gauge has this many times the grid's `N_θ`
    /// samples per axis.
    pub covariance_table_factor: usize,
    /// Amplitude `a` of the tabulated gauge `χ = a sin²θ cos φ`.
    pub covariance_amplitude: f64,
    pub tolerances: OperatorTolerances,
}

impl Default for OperatorsConfig {
    fn default() -> Self {
        Self {
            gauges: ["zero", "linear:1", "linear:-1"].map(String::from).to_vec(),
            alphas: vec![0.5, -0.5],
            coarse: GridSpec::COARSE,
            fine: GridSpec::FINE,
            state: TestState::default(),
            covariance_target: "linear:2".into(),
            covariance_table_factor: 4,
            covariance_amplitude: 0.25,
            tolerances: OperatorTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorTolerances {
    pub residual: f64,
    pub order: f64,
    pub order_window: f64,
    pub covariance_order_window: f64,
    pub gauge_term: f64,
    pub bound: f64,
}

impl Default for OperatorTolerances {
    fn default() -> Self {
        Self { residual: 1e-5, order: 2.0, order_window: 0.3, covariance_order_window: 0.3, gauge_term: 1e-10, bound: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Exponential,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularKind {
    One,
    SinTheta,
    SinPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Helicity {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGridConfig {
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    pub r_max: f64,
    pub n_r: usize,
    pub p0_sweep: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub m: i32,
    pub helicity: Helicity,
    pub spectrum: SpectrumKind,
    pub p0: f64,
    /// Exponent of the power-law spectrum `p^α e^{-p/p₀}`.
    pub alpha: f64,
    pub angular: AngularKind,
    /// Power for `sin_power`; unset means `|m| + 3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
    pub gauge: String,
    pub compensate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<u32>,
    pub t: f64,
    pub grid: FieldGridConfig,
    pub ring: RingConfig,
    /// Second gauge for the A/B invariance comparison.
    pub invariance_gauge: String,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            m: 1,
            helicity: Helicity::Plus,
            spectrum: SpectrumKind::Exponential,
            p0: 1.0,
            alpha: 0.0,
            angular: AngularKind::SinPower,
            power: None,
            gauge: "linear:1".into(),
            compensate: true,
            l_max: None,
            t: 0.0,
            grid: FieldGridConfig { r_max: 6.0, n_r: 13, n_theta: 13, n_phi: 24 },
            ring: RingConfig { r_max: 8.0, n_r: 80, p0_sweep: vec![0.5, 1.0, 2.0, 4.0] },
            invariance_gauge: "zero".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Multiplies the measured string flux; `-1` is the tampered-sign control.
    pub potential_sign: f64,
    /// Fixed expansion order for the winding criterion; unset lets it adapt.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_l_max: Option<u32>,
    pub tolerances: VerifyTolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { potential_sign: 1.0, field_l_max: None, tolerances: VerifyTolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTolerances {
    pub expectation: f64,
    pub probability: f64,
    pub triad: f64,
    pub flux: f64,
    pub monopole_order_window: f64,
    pub commutator: f64,
    pub commutator_order_window: f64,
    pub eigenrelation: f64,
    pub covariance: f64,
    pub covariance_order_window: f64,
    pub jz_term: f64,
    pub uncertainty_bound: f64,
    pub selectivity: f64,
    pub radial: f64,
    pub axis_null: f64,
    pub invariance: f64,
    pub control: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            expectation: 1e-12,
            probability: 1e-13,
            triad: 1e-13,
            flux: 1e-8,
            monopole_order_window: 0.2,
            commutator: 1e-5,
            commutator_order_window: 0.3,
            eigenrelation: 1e-5,
            covariance: 1e-5,
            covariance_order_window: 0.3,
            jz_term: 1e-10,
            uncertainty_bound: 1e-10,
            selectivity: 1e-10,
            radial: 1e-10,
            axis_null: 1e-10,
            invariance: 1e-8,
            control: 1e-2,
        }
    }
}

impl RunConfig {
    /// Defaults, overlaid with `path` (if any), overlaid with `sets`.
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self, ConfigError> {
        let mut table = match Value::try_from(Self::default()).expect("defaults serialize") {
            Value::Table(t) => t,
            _ => unreachable!("config serializes to a table"),
        };
        if let Some(path) = path {
            let name = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: name.clone(), source })?;
            let file: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax { path: name, message: e.to_string() })?;
            merge(&mut table, file);
        }
        for set in sets {
            apply_set(&mut table, set)?;
        }
        Self::from_table(table)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let mut table = match Value::try_from(Self::default()).expect("defaults serialize") {
            Value::Table(t) => t,
            _ => unreachable!("config serializes to a table"),
        };
        let file: Table =
            text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax { path: "<inline>".into(), message: e.to_string() })?;
        merge(&mut table, file);
        Self::from_table(table)
    }

    fn from_table(table: Table) -> Result<Self, ConfigError> {
        match table.get("schema_version") {
            Some(Value::Integer(SCHEMA_VERSION)) => {}
            Some(v) => return Err(ConfigError::Schema(v.to_string())),
            None => return Err(ConfigError::Schema("missing".into())),
        }
        let config: Self = table.try_into().map_err(|e: toml::de::Error| ConfigError::Invalid(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.basis;
        range("basis.n_theta", b.n_theta, 2, 4096)?;
        nonempty("basis.m_values", &b.m_values)?;
        helicities("basis.lambdas", &b.lambdas)?;

        let g = &self.gauge;
        nonempty("gauge.gauges", &g.gauges)?;
        for s in &g.gauges {
            gauge_spec("gauge.gauges", s)?;
        }
        range("gauge.n_theta", g.n_theta, 2, 4096)?;
        range("gauge.n_phi", g.n_phi, 1, 4096)?;
        positive("gauge.p", g.p)?;
        positive("gauge.exclusion", g.exclusion)?;
        range("gauge.monopole_points", g.monopole_points, 1, 10_000)?;
        positive("gauge.monopole_step", g.monopole_step)?;
        range("gauge.monopole_halvings", g.monopole_halvings, 1, 20)?;

        let o = &self.operators;
        nonempty("operators.gauges", &o.gauges)?;
        for s in &o.gauges {
            linear_gauge("operators.gauges", s)?;
        }
        nonempty("operators.alphas", &o.alphas)?;
        grid_spec("operators.coarse", &o.coarse)?;
        grid_spec("operators.fine", &o.fine)?;
        if o.fine.n_theta <= o.coarse.n_theta {
            return Err(invalid("operators.fine.n_theta", "must exceed operators.coarse.n_theta"));
        }
        if o.state.lambda.abs() != 1 {
            return Err(invalid("operators.state.lambda", "must be 1 or -1"));
        }
        positive("operators.state.width", o.state.width)?;
        linear_gauge("operators.covariance_target", &o.covariance_target)?;
        range("operators.covariance_table_factor", o.covariance_table_factor, 1, 16)?;
        finite("operators.covariance_amplitude", o.covariance_amplitude)?;
        let t = &o.tolerances;
        for (k, v) in [
            ("residual", t.residual),
            ("order_window", t.order_window),
            ("covariance_order_window", t.covariance_order_window),
            ("gauge_term", t.gauge_term),
            ("bound", t.bound),
        ] {
            positive(&format!("operators.tolerances.{k}"), v)?;
        }
        finite("operators.tolerances.order", t.order)?;

        let f = &self.field;
        positive("field.p0", f.p0)?;
        if f.spectrum == SpectrumKind::PowerLaw && !(f.alpha > -1.5) {
            return Err(invalid("field.alpha", "must exceed -1.5"));
        }
        gauge_spec("field.gauge", &f.gauge)?;
        gauge_spec("field.invariance_gauge", &f.invariance_gauge)?;
        if let Some(l) = f.l_max {
            range("field.l_max", l as usize, 1, 4096)?;
        }
        finite("field.t", f.t)?;
        positive("field.grid.r_max", f.grid.r_max)?;
        range("field.grid.n_r", f.grid.n_r, 2, 1024)?;
        range("field.grid.n_theta", f.grid.n_theta, 3, 1024)?;
        range("field.grid.n_phi", f.grid.n_phi, 3, 1024)?;
        positive("field.ring.r_max", f.ring.r_max)?;
        range("field.ring.n_r", f.ring.n_r, 3, 100_000)?;
        for p in &f.ring.p0_sweep {
            positive("field.ring.p0_sweep", *p)?;
        }

        let v = &self.verify;
        finite("verify.potential_sign", v.potential_sign)?;
        if let Some(l) = v.field_l_max {
            range("verify.field_l_max", l as usize, 1, 4096)?;
        }
        let t = &v.tolerances;
        for (k, x) in [
            ("expectation", t.expectation),
            ("probability", t.probability),
            ("triad", t.triad),
            ("flux", t.flux),
            ("monopole_order_window", t.monopole_order_window),
            ("commutator", t.commutator),
            ("commutator_order_window", t.commutator_order_window),
            ("eigenrelation", t.eigenrelation),
            ("covariance", t.covariance),
            ("covariance_order_window", t.covariance_order_window),
            ("jz_term", t.jz_term),
            ("uncertainty_bound", t.uncertainty_bound),
            ("selectivity", t.selectivity),
            ("radial", t.radial),
            ("axis_null", t.axis_null),
            ("invariance", t.invariance),
            ("control", t.control),
        ] {
            positive(&format!("verify.tolerances.{k}"), x)?;
        }
        Ok(())
    }
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// `a.b.c=value`; the value is read as TOML, falling back to a bare string.
fn apply_set(table: &mut Table, set: &str) -> Result<(), ConfigError> {
    let (key, raw) = set.split_once('=').ok_or_else(|| ConfigError::SetSyntax(set.into()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::SetSyntax(set.into()));
    }
    let value = format!("v = {}", raw.trim())
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for seg in &parts[..parts.len() - 1] {
        let next = cur.entry(seg.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = match next {
            Value::Table(t) => t,
            _ => return Err(ConfigError::SetPath { key: key.into(), segment: seg.to_string() }),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), message: message.into() }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be finite, got {v}")))
    }
}

fn range(key: &str, v: usize, lo: usize, hi: usize) -> Result<(), ConfigError> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(invalid(key, format!("must lie in [{lo}, {hi}], got {v}")))
    }
}

fn nonempty<T>(key: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        Err(invalid(key, "must not be empty"))
    } else {
        Ok(())
    }
}

fn helicities(key: &str, v: &[i32]) -> Result<(), ConfigError> {
    nonempty(key, v)?;
    if v.iter().any(|l| l.abs() != 1) {
        return Err(invalid(key, "entries must be 1 or -1"));
    }
    Ok(())
}

fn gauge_spec(key: &str, s: &str) -> Result<GaugeSpec<f64>, ConfigError> {
    GaugeSpec::parse(s).map_err(|e| invalid(key, e.to_string()))
}

fn linear_gauge(key: &str, s: &str) -> Result<(), ConfigError> {
    if gauge_spec(key, s)?.linear_m().is_none() {
        return Err(invalid(key, format!("`{s}` must be `zero` or `linear:M`")));
    }
    Ok(())
}

fn grid_spec(key: &str, g: &GridSpec) -> Result<(), ConfigError> {
    range(&format!("{key}.n_p"), g.n_p, 8, 1024)?;
    range(&format!("{key}.n_theta"), g.n_theta, 8, 512)?;
    range(&format!("{key}.n_phi"), g.n_phi, 4, 512)?;
    range(&format!("{key}.p_stencil"), g.p_stencil, 3, 15)?;
    range(&format!("{key}.theta_stencil"), g.theta_stencil, 3, 15)?;
    positive(&format!("{key}.p_min"), g.p_min)?;
    if !(g.p_max > g.p_min) {
        return Err(invalid(&format!("{key}.p_max"), "must exceed p_min"));
    }
    if g.p_spacing == PSpacing::Geometric && g.p_min <= 0.0 {
        return Err(invalid(&format!("{key}.p_min"), "geometric spacing needs p_min > 0"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        assert_eq!(RunConfig::from_toml("").unwrap(), c);
    }

    #[test]
    fn partial_tables_keep_defaults() {
        let c = RunConfig::from_toml("[operators.fine]\nn_p = 80\n").unwrap();
        assert_eq!(c.operators.fine.n_p, 80);
        assert_eq!(c.operators.fine.n_theta, GridSpec::FINE.n_theta);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::from_toml("[field]\nmm = 2\n").unwrap_err();
        assert!(e.to_string().contains("mm"), "{e}");
        assert!(RunConfig::from_toml("bogus = 1\n").is_err());
    }

    #[test]
    fn schema_version_is_checked() {
        assert!(matches!(RunConfig::from_toml("schema_version = 2\n"), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn sets_override_and_parse_values() {
        let sets = ["field.m=2", "field.gauge=zero", "verify.field_l_max=3", "operators.alphas=[0.5]"].map(String::from);
        let c = RunConfig::load(None, &sets).unwrap();
        assert_eq!(c.field.m, 2);
        assert_eq!(c.field.gauge, "zero");
        assert_eq!(c.verify.field_l_max, Some(3));
        assert_eq!(c.operators.alphas, vec![0.5]);
        assert!(RunConfig::load(None, &["field.m".into()]).is_err());
        assert!(RunConfig::load(None, &["field.m.x=1".into()]).is_err());
    }

    #[test]
    fn tolerances_must_be_positive() {
        let e = RunConfig::load(None, &["verify.tolerances.flux=0".into()]).unwrap_err();
        assert!(e.to_string().contains("verify.tolerances.flux"), "{e}");
        assert!(RunConfig::load(None, &["operators.fine.n_theta=4".into()]).is_err());
        assert!(RunConfig::load(None, &["field.gauge=spiral".into()]).is_err());
    }
}
