//! Nondeterministic guarded commands: parsing, exhaustive and randomized
//! execution, fairness, translations of CSP and shared-variable parallel
//! programs, and equivalences of labelled transition systems.

pub mod csp;
pub mod engine;
pub mod equiv;
pub mod fairness;
pub mod par;
pub mod state;
pub mod syntax;

pub use engine::{
    explore_demonic, run_erratic, solve_angelic, ExplorationReport, FailReason, Limits, Outcome,
};
pub use state::{State, Value};
pub use syntax::{parse_csp, parse_gcl, parse_par, render, GclProgram};
