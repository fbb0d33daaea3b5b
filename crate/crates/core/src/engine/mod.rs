//! Execution of guarded-commands programs: exhaustive (demonic),
//! randomized (erratic) and backtracking (angelic).

mod erratic;
mod explore;
mod machine;
mod outcome;
mod report;

pub use erratic::{geometric, random_step, rng_from_seed, run_config, run_erratic};
pub use explore::{explore, Exploration, Halt, Move, Semantics, Step};
pub use machine::{eval_guards, Config, Guards, Machine, Node, NodeId};
pub use outcome::{canonicalize, Bound, FailReason, Lasso, Outcome, Snapshot};
pub use report::{ExplorationReport, Limits, Stats};

use crate::state::State;
use crate::syntax::GclProgram;

/// All outcomes reachable from `s0` within `lim`.
pub fn explore_demonic(p: &GclProgram, s0: State, lim: Limits) -> ExplorationReport {
    let m = Machine::new(p).with_choice_bound(lim.choice_bound);
    explore(&m, m.initial(s0), lim).report
}

/// Successful final states in the order a depth-first search with
/// ascending choices finds them; failures are backtracked.
pub fn solve_angelic(p: &GclProgram, s0: State, lim: Limits) -> Vec<State> {
    let m = Machine::new(p).with_choice_bound(lim.choice_bound);
    explore(&m, m.initial(s0), lim).found
}

/// One successor per call, as seen by the exhaustive explorer.
pub fn step(m: &Machine, c: &Config) -> Step<Config> {
    m.step(c)
}
