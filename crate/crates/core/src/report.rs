//! Pass/fail reports for the condition checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One named check with an optional human-readable counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub id: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

/// Ordered list of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, id: impl Into<String>, counterexample: Option<String>) {
        self.checks.push(ConditionCheck {
            id: id.into(),
            passed: counterexample.is_none(),
            counterexample,
        });
    }

    pub fn pass(&mut self, id: impl Into<String>) {
        self.record(id, None);
    }

    pub fn fail(&mut self, id: impl Into<String>, counterexample: impl Into<String>) {
        self.record(id, Some(counterexample.into()));
    }

    /// Append another report's checks, prefixing their ids.
    pub fn merge(&mut self, prefix: &str, other: ConditionReport) {
        for mut c in other.checks {
            c.id = format!("{prefix}{}", c.id);
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Whether the check `id` exists and passed.
    pub fn check_passed(&self, id: &str) -> bool {
        self.get(id).is_some_and(|c| c.passed)
    }

    /// Short summary such as `8/8 passed`.
    pub fn digest(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!("{ok}/{} passed", self.checks.len())
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.counterexample {
                None => writeln!(f, "  pass  {}", c.id)?,
                Some(cx) => writeln!(f, "  FAIL  {}: {}", c.id, cx)?,
            }
        }
        write!(f, "  {}", self.digest())
    }
}
