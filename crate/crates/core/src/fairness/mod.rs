//! Fairness: the weak-fairness transformation, fair schedulers and the
//! chaotic fixpoint iteration workload.

mod lfp;
mod onelevel;
mod scheduler;
mod wf;

pub use lfp::{
    chaotic_iteration_program, kleene_lfp, parse_fixpoint, render_fixpoint, FixpointFn,
    FixpointInstance, LfpError,
};
pub use onelevel::{
    check_one_level, exclusive, is_one_level_nondeterministic, split_one_level, Exclusivity,
    NotOneLevel, OneLevelProgram,
};
pub use scheduler::{run_fair, run_fair_traced, weak_fair_outcomes, FairOptions, FairStep, Policy};
pub use wf::{priority_names, transform_wf, transform_wf_program, WfError};
