use std::fmt;

use serde_json::json;

use crate::state::{EvalError, State};

/// Why a computation terminated improperly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailReason {
    /// An alternative command with no true guard.
    AllGuardsFalse,
    /// `abort` or `fail`.
    ExplicitFail,
    /// Out-of-bounds index or division by zero.
    EvalError(String),
    /// Two targets of a simultaneous assignment resolved to one location.
    Aliasing(String),
    /// `choice(t)` with `t < 1`.
    EmptyChoice,
    /// Some component is unfinished and none can move.
    Deadlock,
}

impl FailReason {
    pub fn from_eval(e: EvalError) -> FailReason {
        match e {
            EvalError::Aliasing(n) => FailReason::Aliasing(n),
            other => FailReason::EvalError(other.to_string()),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FailReason::AllGuardsFalse => "all-guards-false",
            FailReason::ExplicitFail => "explicit-fail",
            FailReason::EvalError(_) => "eval-error",
            FailReason::Aliasing(_) => "aliasing",
            FailReason::EmptyChoice => "empty-choice",
            FailReason::Deadlock => "deadlock",
        }
    }
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::EvalError(m) => write!(f, "eval-error ({m})"),
            FailReason::Aliasing(n) => write!(f, "aliasing ({n})"),
            other => f.write_str(other.tag()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    MaxDepth,
    MaxConfigs,
    Fuel,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::MaxDepth => "max-depth",
            Bound::MaxConfigs => "max-configs",
            Bound::Fuel => "fuel",
        })
    }
}

/// One configuration on a reported path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub control: String,
    pub state: State,
}

/// Divergence witness: `path[cycle_start]` and the last element agree on
/// control and on every variable outside `hidden`. With `hidden` empty the
/// two configurations are identical. Hidden variables are never read by a
/// guard, index, choice bound or divisor, and only flow into each other, so
/// the segment between them can be repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub path: Vec<Snapshot>,
    pub cycle_start: usize,
    pub hidden: Vec<String>,
}

impl Lasso {
    pub fn repeated(&self) -> &Snapshot {
        self.path.last().expect("lasso path is never empty")
    }

    pub fn cycle_len(&self) -> usize {
        self.path.len() - 1 - self.cycle_start
    }

    /// Checks the witness shape: the entry and the last configuration agree
    /// on control and on all visible variables.
    pub fn is_closed(&self) -> bool {
        let hidden: Vec<&str> = self.hidden.iter().map(String::as_str).collect();
        let a = &self.path[self.cycle_start];
        let b = self.repeated();
        self.path.len() >= 2
            && self.cycle_start < self.path.len() - 1
            && a.control == b.control
            && a.state.hide(&hidden) == b.state.hide(&hidden)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    Terminated(State),
    Failed { reason: FailReason, state: State },
    Divergent(Lasso),
    BoundExceeded(Bound),
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Terminated(_) => "terminated",
            Outcome::Failed { .. } => "failed",
            Outcome::Divergent(_) => "divergent",
            Outcome::BoundExceeded(_) => "bound-exceeded",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Outcome::Terminated(_) => 0,
            Outcome::Failed { .. } => 1,
            Outcome::Divergent(_) => 2,
            Outcome::BoundExceeded(_) => 3,
        }
    }

    pub fn state(&self) -> Option<&State> {
        match self {
            Outcome::Terminated(s) | Outcome::Failed { state: s, .. } => Some(s),
            Outcome::Divergent(l) => Some(&l.repeated().state),
            Outcome::BoundExceeded(_) => None,
        }
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self, Outcome::Terminated(_))
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, Outcome::Failed { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Outcome::Divergent(_))
    }

    /// Text after the kind; also the second sort key.
    pub fn detail(&self) -> String {
        match self {
            Outcome::Terminated(s) => s.canonical(),
            Outcome::Failed { reason, state } => format!("{reason} at {}", state.canonical()),
            Outcome::Divergent(l) => {
                let mut d = format!(
                    "{} (cycle of {} step(s) after {})",
                    l.repeated().state.canonical(),
                    l.cycle_len(),
                    l.cycle_start
                );
                if !l.hidden.is_empty() {
                    d.push_str(&format!(", growing {}", l.hidden.join(",")));
                }
                d
            }
            Outcome::BoundExceeded(b) => b.to_string(),
        }
    }

    fn sort_key(&self) -> (u8, String) {
        (self.rank(), self.detail())
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Outcome::Terminated(s) => json!({"kind": "terminated", "state": s.to_json()}),
            Outcome::Failed { reason, state } => json!({
                "kind": "failed",
                "reason": reason.tag(),
                "detail": reason.to_string(),
                "state": state.to_json(),
            }),
            Outcome::Divergent(l) => json!({
                "kind": "divergent",
                "cycle_start": l.cycle_start,
                "hidden": l.hidden,
                "path": l.path.iter().map(|s| json!({
                    "control": s.control,
                    "state": s.state.to_json(),
                })).collect::<Vec<_>>(),
            }),
            Outcome::BoundExceeded(b) => json!({"kind": "bound-exceeded", "limit": b.to_string()}),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.detail())
    }
}

/// Sorts by (kind, canonical text) and removes duplicates.
pub fn canonicalize(outcomes: &mut Vec<Outcome>) {
    outcomes.sort_by_cached_key(|o| o.sort_key());
    outcomes.dedup_by(|a, b| a.sort_key() == b.sort_key());
}
