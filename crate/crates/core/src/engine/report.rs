use std::fmt::Write;

use serde_json::json;

use super::outcome::{canonicalize, Bound, Outcome};
use crate::state::State;

/// Exploration limits. Depth counts decisions: guard selections and
/// resolutions of `?` and `choice`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_configs: usize,
    pub max_depth: usize,
    /// Largest value enumerated for `x := ?`.
    pub choice_bound: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_configs: 2_000_000,
            max_depth: 10_000,
            choice_bound: 10,
        }
    }
}

impl Limits {
    pub fn with_depth(mut self, d: usize) -> Self {
        self.max_depth = d;
        self
    }

    pub fn with_configs(mut self, n: usize) -> Self {
        self.max_configs = n;
        self
    }

    pub fn with_choice_bound(mut self, b: u64) -> Self {
        self.choice_bound = b;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Distinct configurations expanded.
    pub configs: usize,
    /// Transitions followed.
    pub edges: usize,
    /// Maximal branches of the search: halts, revisits and cut-offs.
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationReport {
    pub outcomes: Vec<Outcome>,
    pub stats: Stats,
    pub limits: Limits,
}

impl ExplorationReport {
    pub fn new(mut outcomes: Vec<Outcome>, stats: Stats, limits: Limits) -> Self {
        canonicalize(&mut outcomes);
        ExplorationReport {
            outcomes,
            stats,
            limits,
        }
    }

    pub fn terminated(&self) -> Vec<&State> {
        self.outcomes
            .iter()
            .filter_map(|o| match o {
                Outcome::Terminated(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    pub fn failed(&self) -> Vec<&Outcome> {
        self.outcomes.iter().filter(|o| o.is_failed()).collect()
    }

    pub fn divergent(&self) -> Vec<&Outcome> {
        self.outcomes.iter().filter(|o| o.is_divergent()).collect()
    }

    pub fn bounds(&self) -> Vec<Bound> {
        self.outcomes
            .iter()
            .filter_map(|o| match o {
                Outcome::BoundExceeded(b) => Some(*b),
                _ => None,
            })
            .collect()
    }

    pub fn has_divergence(&self) -> bool {
        self.outcomes.iter().any(Outcome::is_divergent)
    }

    pub fn has_failure(&self) -> bool {
        self.outcomes.iter().any(Outcome::is_failed)
    }

    /// True when nothing was cut off by a limit.
    pub fn is_complete(&self) -> bool {
        self.bounds().is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            writeln!(out, "{o}").unwrap();
        }
        writeln!(
            out,
            "stats: configs={} edges={} paths={}",
            self.stats.configs, self.stats.edges, self.stats.paths
        )
        .unwrap();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": 1,
            "outcomes": self.outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>(),
            "stats": {
                "configs": self.stats.configs,
                "edges": self.stats.edges,
                "paths": self.stats.paths,
            },
            "limits": {
                "max_configs": self.limits.max_configs,
                "max_depth": self.limits.max_depth,
                "choice_bound": self.limits.choice_bound,
            },
        })
    }
}
