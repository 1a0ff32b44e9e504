//! Structured pass/fail results and shared run settings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detail {
    pub name: String,
    pub value: f64,
}

/// Outcome of one numerical check. `pass` holds exactly when `residual <= tol`
/// (a NaN residual never passes), unless the report aggregates subordinate
/// checks, in which case it passes when every subordinate check passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check_name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub details: Vec<Detail>,
}

impl Report {
    pub fn from_residual(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Report {
            check_name: name.into(),
            residual,
            tol,
            pass: residual <= tol,
            details: Vec::new(),
        }
    }

    pub fn with_detail(mut self, name: impl Into<String>, value: f64) -> Self {
        self.details.push(Detail {
            name: name.into(),
            value,
        });
        self
    }

    pub fn detail(&self, name: &str) -> Option<f64> {
        self.details
            .iter()
            .find(|d| d.name == name)
            .map(|d| d.value)
    }

    /// Aggregates `subs` into one report. The residual is the largest
    /// `residual / tol` ratio, so the aggregate tolerance is one.
    pub fn all(name: impl Into<String>, subs: &[Report]) -> Self {
        let mut ratio: f64 = 0.0;
        let mut pass = true;
        let mut details = Vec::new();
        for s in subs {
            let r = if s.tol > 0.0 {
                s.residual / s.tol
            } else if s.pass {
                0.0
            } else {
                f64::INFINITY
            };
            ratio = if r.is_nan() {
                f64::NAN
            } else if ratio.is_nan() {
                ratio
            } else {
                ratio.max(r)
            };
            pass &= s.pass;
            details.push(Detail {
                name: format!("{}.residual", s.check_name),
                value: s.residual,
            });
        }
        Report {
            check_name: name.into(),
            residual: ratio,
            tol: 1.0,
            pass,
            details,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Tolerances and sampling controls shared by the validation suites.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub tol: f64,
    pub postol: f64,
    pub seed: u64,
    pub points: usize,
    pub grid: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-9,
            postol: 1e-9,
            seed: 20240601,
            points: 20,
            grid: 512,
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }
}

impl RunConfig {
    /// Seed override read from `DBR_SEED`, if set and parseable.
    pub fn seed_from_env() -> Option<u64> {
        std::env::var("DBR_SEED").ok()?.trim().parse().ok()
    }
}
