use std::collections::HashSet;
use std::fmt;

use super::lts::{Lts, TAU};

/// Why a process does not pass a test in every maximal computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MustFailure {
    /// A reachable pair with no move and no success on the way.
    Stuck { process: String, test: String },
    /// An infinite computation that avoids success; the pair starts the cycle.
    Cycle { process: String, test: String },
}

impl fmt::Display for MustFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MustFailure::Stuck { process, test } => write!(f, "stuck at ({process},{test})"),
            MustFailure::Cycle { process, test } => {
                write!(f, "cycle without success at ({process},{test})")
            }
        }
    }
}

/// Moves of the synchronous product: internal moves of either side alone,
/// visible actions jointly.
fn product_succ(p: &Lts, t: &Lts, (x, y): (usize, usize)) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = p.succ_on(x, TAU).map(|x2| (x2, y)).collect();
    out.extend(t.succ_on(y, TAU).map(|y2| (x, y2)));
    for (a, x2) in p.succ(x).filter(|(a, _)| *a != TAU) {
        out.extend(t.succ_on(y, a).map(|y2| (x2, y2)));
    }
    out
}

/// Some maximal computation of `proc` with `test` reaches a success state
/// of the test.
pub fn may_pass(proc: &Lts, test: &Lts) -> bool {
    let start = (proc.init, test.init);
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        if test.success.contains(&n.1) {
            return true;
        }
        for m in product_succ(proc, test, n) {
            if seen.insert(m) {
                stack.push(m);
            }
        }
    }
    false
}

pub fn must_pass(proc: &Lts, test: &Lts) -> bool {
    must_failure(proc, test).is_none()
}

/// A maximal computation that never visits success, found by depth-first
/// search over the product below success states.
pub fn must_failure(proc: &Lts, test: &Lts) -> Option<MustFailure> {
    let name = |(x, y): (usize, usize)| (proc.states[x].clone(), test.states[y].clone());
    let start = (proc.init, test.init);
    if test.success.contains(&start.1) {
        return None;
    }
    let mut done: HashSet<(usize, usize)> = HashSet::new();
    let mut on_path: HashSet<(usize, usize)> = HashSet::from([start]);
    let mut stack: Vec<((usize, usize), Vec<(usize, usize)>)> = Vec::new();
    let succ = |n| -> Vec<(usize, usize)> {
        product_succ(proc, test, n)
            .into_iter()
            .filter(|m| !test.success.contains(&m.1))
            .collect()
    };
    let first = product_succ(proc, test, start);
    if first.is_empty() {
        let (process, test) = name(start);
        return Some(MustFailure::Stuck { process, test });
    }
    let mut next = succ(start);
    next.reverse();
    stack.push((start, next));
    while let Some((node, pending)) = stack.last_mut() {
        let node = *node;
        match pending.pop() {
            None => {
                stack.pop();
                on_path.remove(&node);
                done.insert(node);
            }
            Some(m) if on_path.contains(&m) => {
                let (process, test) = name(m);
                return Some(MustFailure::Cycle { process, test });
            }
            Some(m) if done.contains(&m) => {}
            Some(m) => {
                if product_succ(proc, test, m).is_empty() {
                    let (process, test) = name(m);
                    return Some(MustFailure::Stuck { process, test });
                }
                on_path.insert(m);
                let mut next = succ(m);
                next.reverse();
                stack.push((m, next));
            }
        }
    }
    None
}
