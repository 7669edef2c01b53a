//! Pass/fail reporting shared by the verification oracles, the move-bound
//! checker, and the model checker.
//!
//! Checks never abort on the first violation: a report collects every
//! outcome with a human-readable witness so a failing run still documents
//! everything it found.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Outcome of one named check.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check did not apply (for example the exact solver refused a graph
    /// above its size cap, so only the weaker check ran).
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        })
    }
}

/// One named check with its outcome and a witness line: the offending nodes
/// or edges on failure, or the measured quantities on success.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub witness: String,
}

/// An ordered list of check results. Order is deterministic (checks push in
/// a fixed sequence) so rendered reports are byte-stable.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> VerificationReport {
        VerificationReport::default()
    }

    pub fn push(&mut self, name: &'static str, status: CheckStatus, witness: String) {
        self.checks.push(CheckResult { name, status, witness });
    }

    pub fn pass(&mut self, name: &'static str, witness: String) {
        self.push(name, CheckStatus::Pass, witness);
    }

    pub fn fail(&mut self, name: &'static str, witness: String) {
        self.push(name, CheckStatus::Fail, witness);
    }

    pub fn skip(&mut self, name: &'static str, witness: String) {
        self.push(name, CheckStatus::Skipped, witness);
    }

    /// True when no check failed (skipped checks do not fail a report).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    /// Number of failing checks.
    pub fn fail_count(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count()
    }

    /// Appends all checks of `other`, keeping their order.
    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// The failing checks, for compact error messages.
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}\t{}\t{}", c.name, c.status, c.witness)?;
        }
        Ok(())
    }
}
