use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calibrate::FrozenConfiguration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A budget ran out before both sides were decided.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub fingerprint: String,
    pub expected: String,
    pub observed: String,
    pub status: CheckStatus,
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl CheckRecord {
    pub fn new(check: &str, fingerprint: &str, expected: impl ToString, observed: impl ToString, status: CheckStatus) -> Self {
        CheckRecord {
            check: check.to_string(),
            fingerprint: fingerprint.to_string(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            status,
            nodes: 0,
            elapsed_ms: None,
        }
    }

    /// Pass iff `expected == observed`.
    pub fn compare<T: PartialEq + ToString>(check: &str, fingerprint: &str, expected: T, observed: T) -> Self {
        let status = if expected == observed { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckRecord::new(check, fingerprint, expected.to_string(), observed.to_string(), status)
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.nodes = nodes;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
}

impl Summary {
    /// Passes over decided checks; unknowns are left out of the denominator.
    pub fn pass_rate(&self) -> Option<f64> {
        let decided = self.pass + self.fail;
        (decided > 0).then(|| self.pass as f64 / decided as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub frozen: FrozenConfiguration,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(kind: &str, frozen: FrozenConfiguration) -> Self {
        VerificationReport { kind: kind.to_string(), frozen, summary: Summary::default(), records: Vec::new() }
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
        self.finish();
    }

    /// Sorts records by fingerprint then check name and recounts the summary,
    /// so assembly order never shows in the output.
    pub fn finish(&mut self) {
        self.records.sort_by(|a, b| (&a.fingerprint, &a.check, &a.expected).cmp(&(&b.fingerprint, &b.check, &b.expected)));
        let mut s = Summary { total: self.records.len(), ..Summary::default() };
        for r in &self.records {
            match r.status {
                CheckStatus::Pass => s.pass += 1,
                CheckStatus::Fail => s.fail += 1,
                CheckStatus::Unknown => s.unknown += 1,
            }
        }
        self.summary = s;
    }

    pub fn has_failures(&self) -> bool {
        self.records.iter().any(|r| r.status == CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == CheckStatus::Fail)
    }

    pub fn strip_timings(&mut self) {
        for r in &mut self.records {
            r.elapsed_ms = None;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// First 16 hex digits of the SHA-256 of an instance's canonical text.
pub fn fingerprint(canonical_text: &str) -> String {
    let digest = Sha256::digest(canonical_text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
