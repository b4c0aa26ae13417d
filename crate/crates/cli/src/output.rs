//! Data sinks and run summaries.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Where a command writes its files: a directory, or memory for
/// comparisons between runs.
pub enum Sink {
    Dir(PathBuf),
    Memory(RefCell<BTreeMap<String, Vec<u8>>>),
}

impl Sink {
    pub fn dir(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        std::fs::create_dir_all(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Sink::Dir(path))
    }

    pub fn memory() -> Self {
        Sink::Memory(RefCell::new(BTreeMap::new()))
    }

    pub fn path(&self) -> Option<&Path> {
        match self {
            Sink::Dir(p) => Some(p),
            Sink::Memory(_) => None,
        }
    }

    pub fn write(&self, name: &str, bytes: Vec<u8>) -> Result<String> {
        match self {
            Sink::Dir(dir) => {
                let path = dir.join(name);
                std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            }
            Sink::Memory(files) => {
                files.borrow_mut().insert(name.to_string(), bytes);
            }
        }
        Ok(name.to_string())
    }

    pub fn csv<S: Serialize>(&self, name: &str, rows: &[S]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        self.write(name, w.into_inner().context("flushing csv")?)
    }

    pub fn json<S: Serialize>(&self, name: &str, value: &S) -> Result<String> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, bytes)
    }

    pub fn text(&self, name: &str, text: &str) -> Result<String> {
        self.write(name, text.as_bytes().to_vec())
    }

    /// Snapshot of a memory sink; empty for a directory.
    pub fn files(&self) -> BTreeMap<String, Vec<u8>> {
        match self {
            Sink::Dir(_) => BTreeMap::new(),
            Sink::Memory(files) => files.borrow().clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    Above,
    Within,
}

/// One pass/fail check with the number it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub comparison: Comparison,
    /// Centre of the window for `within`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn below(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let passed = measured < tolerance;
        Self { name: name.into(), measured, comparison: Comparison::Below, target: None, tolerance, passed }
    }

    pub fn above(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let passed = measured > tolerance;
        Self { name: name.into(), measured, comparison: Comparison::Above, target: None, tolerance, passed }
    }

    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Self { name: name.into(), measured, comparison: Comparison::Within, target: Some(target), tolerance, passed }
    }

    /// Largest of several measurements; NaN or an empty set fails.
    pub fn worst_below(name: impl Into<String>, measured: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        Self::below(name, worst(measured), tolerance)
    }

    /// Measurement furthest from `target`.
    pub fn worst_within(name: impl Into<String>, measured: impl IntoIterator<Item = f64>, target: f64, tolerance: f64) -> Self {
        let mut pick = f64::NAN;
        let mut dev = -1.0;
        for v in measured {
            let d = if v.is_nan() { f64::INFINITY } else { (v - target).abs() };
            if d > dev {
                dev = d;
                pick = v;
            }
        }
        Self::within(name, pick, target, tolerance)
    }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut out = f64::NAN;
    for v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        if out.is_nan() || v > out {
            out = v;
        }
    }
    out
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.comparison {
            Comparison::Below => write!(f, "{} = {:.3e} (< {:.1e})", self.name, self.measured, self.tolerance),
            Comparison::Above => write!(f, "{} = {:.3e} (> {:.1e})", self.name, self.measured, self.tolerance),
            Comparison::Within => {
                write!(f, "{} = {:.3} ({} ± {})", self.name, self.measured, self.target.unwrap_or(0.0), self.tolerance)
            }
        }
    }
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub assertions: Vec<Assertion>,
    pub files: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary<'a, C: Serialize> {
    pub command: &'a str,
    pub config: &'a C,
    pub assertions: &'a [Assertion],
    pub passed: bool,
    pub files: &'a [String],
    pub wall_time_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assertion_directions() {
        assert!(Assertion::below("a", 1e-9, 1e-8).passed);
        assert!(!Assertion::below("a", f64::NAN, 1e-8).passed);
        assert!(Assertion::above("a", 0.1, 1e-2).passed);
        assert!(Assertion::within("a", 2.1, 2.0, 0.3).passed);
        assert!(!Assertion::within("a", 7.6, 2.0, 0.3).passed);
    }

    #[test]
    fn worst_picks_the_failing_value() {
        assert_eq!(Assertion::worst_below("a", [1e-9, 3e-6, 2e-7], 1e-5).measured, 3e-6);
        assert!(Assertion::worst_below("a", [1e-9, f64::NAN], 1e-5).measured.is_nan());
        assert_eq!(Assertion::worst_within("a", [2.1, 1.6, 2.2], 2.0, 0.3).measured, 1.6);
        assert!(!Assertion::worst_within("a", [2.0, f64::NAN], 2.0, 0.3).passed);
    }

    #[test]
    fn memory_sink_keeps_bytes() {
        let s = Sink::memory();
        #[derive(Serialize)]
        struct Row {
            x: f64,
            y: i32,
        }
        s.csv("a.csv", &[Row { x: 0.5, y: 1 }]).unwrap();
        assert_eq!(s.files()["a.csv"], b"x,y\n0.5,1\n");
    }
}
