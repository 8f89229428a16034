//! Numerical verification of the barrier calculus and the step analysis, and
//! reproduction of the two counterexamples to the original step analysis.
//!
//! Every check aggregates many samples into one [`CheckReport`] carrying the
//! worst sample. Failures are reported, never raised.

pub mod barrier_checks;
pub mod bounds;
pub mod counterexample;
pub mod sampling;
pub mod step_checks;

use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_2017;

/// Default sample count per check.
pub const DEFAULT_SAMPLES: usize = 1000;

/// `1e-9 max(1, |rhs|)`
pub fn default_slack(rhs: f64) -> f64 {
    1e-9 * rhs.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Passes when `lhs <= rhs + slack`.
    AtMost,
    /// Passes when `lhs > rhs`; used for reproduced violations.
    Exceeds,
}

impl Relation {
    fn holds(self, lhs: f64, rhs: f64, slack: f64) -> bool {
        match self {
            Relation::AtMost => lhs <= rhs + slack,
            Relation::Exceeds => lhs > rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Exceeds => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub id: String,
    pub instance: String,
    /// Left and right sides of the worst sample.
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub relation: Relation,
    pub samples: usize,
    pub failures: usize,
    pub pass: bool,
}

impl CheckReport {
    /// `rhs + slack - lhs` for `AtMost`, `lhs - rhs` for `Exceeds`.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::AtMost => self.rhs + self.slack - self.lhs,
            Relation::Exceeds => self.lhs - self.rhs,
        }
    }

    /// One line-delimited record.
    pub fn record(&self) -> String {
        format!(
            "{} {} instance={} lhs={:.17e} {} rhs={:.17e} slack={:.3e} margin={:.6e} samples={} failures={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.instance,
            self.lhs,
            self.relation.symbol(),
            self.rhs,
            self.slack,
            self.margin(),
            self.samples,
            self.failures
        )
    }
}

/// Folds samples of one inequality into a report on the worst one.
#[derive(Debug, Clone)]
pub struct Accumulator {
    id: String,
    instance: String,
    relation: Relation,
    samples: usize,
    failures: usize,
    worst: Option<(f64, f64, f64, f64)>,
}

impl Accumulator {
    pub fn new(id: impl Into<String>, instance: impl Into<String>) -> Self {
        Self::with_relation(id, instance, Relation::AtMost)
    }

    pub fn with_relation(id: impl Into<String>, instance: impl Into<String>, relation: Relation) -> Self {
        Self {
            id: id.into(),
            instance: instance.into(),
            relation,
            samples: 0,
            failures: 0,
            worst: None,
        }
    }

    /// Records `lhs <= rhs` under the default slack.
    pub fn observe(&mut self, lhs: f64, rhs: f64) {
        self.observe_with(lhs, rhs, default_slack(rhs));
    }

    /// A NaN on either side counts as a failure.
    pub fn observe_with(&mut self, lhs: f64, rhs: f64, slack: f64) {
        self.samples += 1;
        let ok = self.relation.holds(lhs, rhs, slack);
        if !ok {
            self.failures += 1;
        }
        let excess = match self.relation {
            Relation::AtMost => lhs - rhs - slack,
            Relation::Exceeds => rhs - lhs,
        };
        let excess = if excess.is_nan() { f64::INFINITY } else { excess };
        if self.worst.is_none_or(|w| excess > w.3) {
            self.worst = Some((lhs, rhs, slack, excess));
        }
    }

    /// Records a sample that could not be evaluated.
    pub fn observe_error(&mut self) {
        self.observe_with(f64::NAN, 0.0, 0.0);
    }

    pub fn finish(self) -> CheckReport {
        let (lhs, rhs, slack, _) = self.worst.unwrap_or((0.0, 0.0, 0.0, 0.0));
        CheckReport {
            id: self.id,
            instance: self.instance,
            lhs,
            rhs,
            slack,
            relation: self.relation,
            samples: self.samples,
            failures: self.failures,
            pass: self.failures == 0 && self.samples > 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    SelfConcordance,
    Predictor,
    Corrector,
    Counterexamples,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "selfconcordance" => Ok(Suite::SelfConcordance),
            "predictor" => Ok(Suite::Predictor),
            "corrector" => Ok(Suite::Corrector),
            "counterexamples" => Ok(Suite::Counterexamples),
            other => Err(Error::Parameter(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// Independent generator per check so that reports do not depend on which
/// other checks ran.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let with_barrier = matches!(suite, Suite::All | Suite::SelfConcordance);
    let with_predictor = matches!(suite, Suite::All | Suite::Predictor);
    let with_corrector = matches!(suite, Suite::All | Suite::Corrector);
    if with_barrier {
        out.extend(barrier_checks::run_all(cfg)?);
    }
    if with_predictor {
        out.extend(step_checks::check_predictor_bounds(cfg)?);
        out.extend(step_checks::certify_predictor_presets());
    }
    if with_corrector {
        out.extend(step_checks::check_corrector_bounds(cfg)?);
        out.extend(step_checks::certify_corrector_presets());
    }
    if with_predictor || with_corrector {
        let phases = step_checks::check_phase_invariants(cfg)?;
        out.extend(phases.into_iter().filter(|r| {
            (with_predictor && r.id.contains("predictor")) || (with_corrector && r.id.contains("corrector"))
        }));
        let identities = step_checks::check_step_identities(cfg.samples.clamp(1, 100), cfg.seed)?;
        out.extend(identities.into_iter().filter(|r| {
            (with_predictor && r.id.contains("predictor")) || (with_corrector && r.id.contains("corrector"))
        }));
    }
    if matches!(suite, Suite::All | Suite::Counterexamples) {
        out.extend(counterexample::reproduce_counterexamples()?.reports());
    }
    Ok(out)
}

/// Line-delimited report of every check.
pub fn report_text(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "{}", r.record());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_keeps_worst_sample() {
        let mut acc = Accumulator::new("demo", "unit");
        acc.observe(0.5, 1.0);
        acc.observe(0.9, 1.0);
        acc.observe(0.1, 1.0);
        let r = acc.finish();
        assert!(r.pass);
        assert_eq!((r.lhs, r.rhs, r.samples), (0.9, 1.0, 3));

        let mut acc = Accumulator::new("demo", "unit");
        acc.observe(1.0 + 2e-9, 1.0);
        acc.observe(f64::NAN, 1.0);
        let r = acc.finish();
        assert_eq!(r.failures, 2);
        assert!(r.lhs.is_nan());
    }

    #[test]
    fn slack_policy() {
        assert_eq!(default_slack(0.5), 1e-9);
        assert_close!(default_slack(-100.0), 1e-7, 1e-22);
        let mut acc = Accumulator::new("demo", "unit");
        acc.observe(1.0 + 5e-10, 1.0);
        assert!(acc.finish().pass);
    }

    #[test]
    fn exceeds_relation_is_strict() {
        let mut acc = Accumulator::with_relation("v", "unit", Relation::Exceeds);
        acc.observe_with(1.0, 1.0, 0.0);
        assert!(!acc.finish().pass);
    }

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert_eq!(
            "selfconcordance".parse::<Suite>().unwrap(),
            Suite::SelfConcordance
        );
        assert!("bogus".parse::<Suite>().is_err());
    }
}
