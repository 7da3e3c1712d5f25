//! Self-checking suites with measured residuals.
//!
//! Each suite returns a list of [`Criterion`] values, one per checked
//! property, with the measured quantity, its bound and the elapsed time.
//! Suites without a user model run on pinned fixtures.

pub mod fixtures;
mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ExponentModel;

pub use suites::{
    density_suite, lemmas_suite, mobius_suite, simulate_suite, theorem_suite,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Mobius,
    Lemmas,
    Theorem,
    Density,
    Simulate,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Mobius,
        Suite::Lemmas,
        Suite::Theorem,
        Suite::Density,
        Suite::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Mobius => "mobius",
            Suite::Lemmas => "lemmas",
            Suite::Theorem => "theorem",
            Suite::Density => "density",
            Suite::Simulate => "simulate",
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
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown suite {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// Strictly greater than the bound.
    Above,
}

impl Relation {
    fn holds(self, measured: f64, bound: f64) -> bool {
        match self {
            Relation::AtMost => measured <= bound,
            Relation::AtLeast => measured >= bound,
            Relation::Above => measured > bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub outcome: Outcome,
    pub elapsed_ms: f64,
    pub detail: String,
}

impl Criterion {
    pub fn check(
        id: &str,
        description: impl Into<String>,
        measured: f64,
        relation: Relation,
        bound: f64,
    ) -> Self {
        // NaN never passes
        let outcome = if relation.holds(measured, bound) {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        Criterion {
            id: id.to_string(),
            description: description.into(),
            measured,
            relation,
            bound,
            outcome,
            elapsed_ms: 0.0,
            detail: String::new(),
        }
    }

    pub fn skipped(id: &str, description: impl Into<String>, reason: impl Into<String>) -> Self {
        Criterion {
            id: id.to_string(),
            description: description.into(),
            measured: f64::NAN,
            relation: Relation::AtMost,
            bound: f64::NAN,
            outcome: Outcome::Skipped,
            elapsed_ms: 0.0,
            detail: reason.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            Outcome::Skipped => write!(f, "SKIP {}: {}", self.id, self.detail),
            o => {
                write!(
                    f,
                    "{} {}: {:.3e} {} {:.3e} ({:.1} ms)",
                    if o == Outcome::Pass { "PASS" } else { "FAIL" },
                    self.id,
                    self.measured,
                    self.relation.symbol(),
                    self.bound,
                    self.elapsed_ms
                )?;
                // failures carry their explanation on the same line
                if o == Outcome::Fail && !self.detail.is_empty() {
                    write!(f, " [{}]", self.detail)?;
                }
                Ok(())
            }
        }
    }
}

/// A named numeric table attached to a suite report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub criteria: Vec<Criterion>,
    pub tables: Vec<Table>,
    pub elapsed_ms: f64,
}

impl SuiteReport {
    /// No criterion failed. A fully skipped suite counts as passing.
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> Vec<&Criterion> {
        self.criteria
            .iter()
            .filter(|c| c.outcome == Outcome::Fail)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Monte Carlo sample size for the simulation suite.
    pub samples: usize,
}

impl VerifyOptions {
    pub fn new(seed: u64) -> Self {
        VerifyOptions {
            seed,
            samples: 200_000,
        }
    }
}

/// Runs one suite, on `model` when given and on the pinned fixtures otherwise.
pub fn run_suite(
    suite: Suite,
    model: Option<&dyn ExponentModel>,
    opts: &VerifyOptions,
) -> Result<SuiteReport> {
    let start = Instant::now();
    let (criteria, tables) = match suite {
        Suite::Mobius => mobius_suite(model, opts)?,
        Suite::Lemmas => lemmas_suite(model, opts)?,
        Suite::Theorem => theorem_suite(model, opts)?,
        Suite::Density => density_suite(model, opts)?,
        Suite::Simulate => simulate_suite(model, opts)?,
    };
    Ok(SuiteReport {
        suite,
        criteria,
        tables,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
