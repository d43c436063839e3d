//! Machine-readable check reports.
//!
//! Every verification routine in the crate returns [`Check`] records with a
//! stable JSON shape `{check, status, worst_margin, location}`. The margin is
//! signed: non-negative means the check held with that much room, negative
//! means it was violated by that amount.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub status: Status,
    pub worst_margin: f64,
    pub location: Option<String>,
}

impl Check {
    /// A check whose outcome is decided by the sign of `margin`.
    pub fn from_margin(name: impl Into<String>, margin: f64, location: Option<String>) -> Self {
        let status = if margin >= 0.0 { Status::Pass } else { Status::Fail };
        Check {
            check: name.into(),
            status,
            worst_margin: margin,
            location,
        }
    }

    /// `observed <= bound`.
    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64, location: Option<String>) -> Self {
        let margin = if observed.is_nan() { f64::NEG_INFINITY } else { bound - observed };
        Self::from_margin(name, margin, location)
    }

    /// `observed > bound`.
    pub fn above(name: impl Into<String>, observed: f64, bound: f64, location: Option<String>) -> Self {
        let mut c = Self::from_margin(name, observed - bound, location);
        if observed.is_nan() || observed <= bound {
            c.status = Status::Fail;
        }
        c
    }

    pub fn boolean(name: impl Into<String>, ok: bool, location: Option<String>) -> Self {
        Self::from_margin(name, if ok { 0.0 } else { -1.0 }, location)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        write!(f, "[{tag}] {} (margin {:.3e})", self.check, self.worst_margin)?;
        if let Some(loc) = &self.location {
            write!(f, " at {loc}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_decide_status() {
        assert!(Check::at_most("x", 1e-13, 1e-12, None).passed());
        assert!(!Check::at_most("x", 1e-11, 1e-12, None).passed());
        assert!(!Check::at_most("x", f64::NAN, 1.0, None).passed());
        assert!(!Check::above("y", 0.0, 0.0, None).passed());
        assert!(Check::above("y", 1e-7, 1e-8, None).passed());
    }

    #[test]
    fn json_shape_is_stable() {
        let c = Check::boolean("balance", true, Some("v0".into()));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"check":"balance","status":"pass","worst_margin":0.0,"location":"v0"}"#);
    }
}
