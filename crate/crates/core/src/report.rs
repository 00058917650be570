use serde::{Deserialize, Serialize};

/// One named condition of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

/// Boolean verdict together with every condition that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: bool,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn from_checks(checks: Vec<Check>) -> Self {
        Certificate { verdict: checks.iter().all(|c| c.pass), checks }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
