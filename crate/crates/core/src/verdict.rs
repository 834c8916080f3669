use serde::{Deserialize, Serialize};

/// Label attached to every enumerated stationary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Global,
    LocalNonGlobal,
    NotLocalMin,
}

/// Outcome of one invariant check. On failure `witness` names the
/// offending points (indices into the checked list) and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub message: String,
}

impl Verdict {
    pub fn pass() -> Self {
        Self { passed: true, witness: None }
    }

    pub fn fail(indices: Vec<usize>, message: impl Into<String>) -> Self {
        Self { passed: false, witness: Some(Witness { indices, message: message.into() }) }
    }

    /// Keeps the first failure.
    pub fn and(self, other: Verdict) -> Verdict {
        if self.passed {
            other
        } else {
            self
        }
    }
}
