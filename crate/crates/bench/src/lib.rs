//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use gcl_core::equiv::Lts;
use gcl_core::syntax::{parse_gcl, GclProgram};

pub fn corpus_gcl(name: &str) -> GclProgram {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_gcl(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// A cycle of `n` states with an `a` step between neighbours and a `b`
/// shortcut from every `k`-th state back to the start.
pub fn ring(n: usize, k: usize) -> Lts {
    let mut l = Lts::with_size(n, &["a", "b"]);
    for s in 0..n {
        l.add(s, "a", (s + 1) % n);
        if s % k == 0 {
            l.add(s, "b", 0);
        }
    }
    l
}
