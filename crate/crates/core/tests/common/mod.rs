#![allow(dead_code)]

pub mod lts_gen;
pub mod oracles;
pub mod reference;

use std::path::PathBuf;

use gcl_core::state::State;
use gcl_core::syntax::{parse_gcl, GclProgram};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus(name: &str) -> String {
    let path = corpus_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn corpus_gcl(name: &str) -> GclProgram {
    parse_gcl(&corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn bound(decls: &[gcl_core::syntax::Declaration], bindings: &[String]) -> State {
    let mut s = State::new(decls);
    for b in bindings {
        s.bind(b).unwrap();
    }
    s
}

pub fn list(xs: &[i64]) -> String {
    let parts: Vec<String> = xs.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}
