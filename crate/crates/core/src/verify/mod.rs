//! Randomized and golden checks of the theory against the implementation.
//!
//! Instance `i` of a suite run with seed `s` draws from a ChaCha8 stream
//! keyed by `(s, i)`, so instances run in parallel and any failure can be
//! replayed alone with [`replay`].

pub mod generate;
mod golden;
mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use golden::golden_examples;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Adjoint,
    Normal,
    Spectra,
    Range,
    Mapping,
    Cso,
    Model,
    Anderson,
    Perturb,
    Golden,
}

impl Suite {
    pub const RANDOMIZED: [Suite; 9] = [
        Suite::Adjoint,
        Suite::Normal,
        Suite::Spectra,
        Suite::Range,
        Suite::Mapping,
        Suite::Cso,
        Suite::Model,
        Suite::Anderson,
        Suite::Perturb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Adjoint => "adjoint",
            Suite::Normal => "normal",
            Suite::Spectra => "spectra",
            Suite::Range => "range",
            Suite::Mapping => "mapping",
            Suite::Cso => "cso",
            Suite::Model => "model",
            Suite::Anderson => "anderson",
            Suite::Perturb => "perturb",
            Suite::Golden => "golden",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::RANDOMIZED
            .into_iter()
            .chain([Suite::Golden])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// One evaluated check within one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub check: String,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Default)]
pub(crate) struct Recorder {
    outcomes: Vec<Outcome>,
}

impl Recorder {
    pub(crate) fn flag(&mut self, check: &str, passed: bool, detail: impl FnOnce() -> String) {
        self.push(check, passed, 0.0, detail);
    }

    /// Passes when `residual ≤ bound`; NaN fails.
    pub(crate) fn bound(&mut self, check: &str, residual: f64, bound: f64) {
        self.push(check, residual <= bound, residual, || format!("{residual:e} > {bound:e}"));
    }

    pub(crate) fn push(&mut self, check: &str, passed: bool, residual: f64, detail: impl FnOnce() -> String) {
        self.outcomes.push(Outcome {
            check: check.to_string(),
            passed,
            residual,
            detail: if passed { String::new() } else { detail() },
        });
    }

    pub(crate) fn into_outcomes(self) -> Vec<Outcome> {
        self.outcomes
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub seed: u64,
    pub instance: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub instances: usize,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<Failure>,
    pub max_residual: f64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn assemble(suite: Suite, seed: u64, per_instance: Vec<Vec<Outcome>>, wall_time: Duration) -> Self {
        let mut checks: Vec<CheckSummary> = Vec::new();
        let mut failures = Vec::new();
        let instances = per_instance.len();
        for (instance, outcomes) in per_instance.into_iter().enumerate() {
            for o in outcomes {
                let idx = match checks.iter().position(|c| c.check == o.check) {
                    Some(i) => i,
                    None => {
                        checks.push(CheckSummary {
                            check: o.check.clone(),
                            passed: 0,
                            failed: 0,
                            max_residual: 0.0,
                        });
                        checks.len() - 1
                    }
                };
                let summary = &mut checks[idx];
                if o.residual.is_finite() {
                    summary.max_residual = summary.max_residual.max(o.residual);
                }
                if o.passed {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                    failures.push(Failure {
                        check: o.check,
                        seed,
                        instance,
                        detail: o.detail,
                    });
                }
            }
        }
        let max_residual = checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
        SuiteReport {
            suite,
            seed,
            instances,
            checks,
            failures,
            max_residual,
            wall_time,
        }
    }
}

/// The generator for instance `instance` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance as u64);
    rng
}

/// Runs one instance; evaluation errors are recorded as failures.
pub fn replay(suite: Suite, seed: u64, instance: usize) -> Vec<Outcome> {
    let mut rng = instance_rng(seed, instance);
    let mut rec = Recorder::default();
    if let Err(e) = suites::run(suite, instance, &mut rng, &mut rec) {
        rec.flag("evaluation", false, || e.to_string());
    }
    rec.into_outcomes()
}

/// Runs `count` instances of a randomized suite. [`Suite::Golden`] ignores
/// `seed` and `count`.
pub fn run_suite(suite: Suite, seed: u64, count: usize) -> SuiteReport {
    if suite == Suite::Golden {
        return golden_examples();
    }
    let start = Instant::now();
    let per_instance: Vec<Vec<Outcome>> = (0..count)
        .into_par_iter()
        .map(|i| replay(suite, seed, i))
        .collect();
    SuiteReport::assemble(suite, seed, per_instance, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::RANDOMIZED.into_iter().chain([Suite::Golden]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nosuch".parse::<Suite>(), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn every_suite_passes_a_few_instances() {
        for suite in Suite::RANDOMIZED {
            let report = run_suite(suite, 11, 3);
            assert!(report.passed(), "{suite}: {:#?}", report.failures);
            assert!(!report.checks.is_empty());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&run_suite(Suite::Spectra, 5, 4)).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Spectra, 5, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn golden_examples_pass() {
        let report = golden_examples();
        assert!(report.passed(), "{:#?}", report.failures);
    }
}
