//! Breadth-first enumeration of guarded-command computations, written
//! directly over the syntax tree with an explicit continuation.

use std::collections::{BTreeSet, HashSet, VecDeque};

use gcl_core::state::{eval_bool, eval_int, exec_assign, State};
use gcl_core::syntax::{GclProgram, GuardedCommand, Stmt};
use num_traits::ToPrimitive;

#[derive(Debug, Default)]
pub struct Reference {
    pub terminated: BTreeSet<String>,
    pub failed: BTreeSet<String>,
    /// Some reachable configuration has more than one successor.
    pub branching: bool,
}

type Node = (Vec<Stmt>, State);

enum Next {
    Done,
    Fail,
    Succ(Vec<Node>),
}

fn guarded(gs: &[GuardedCommand], s: &State, rest: &[Stmt], again: Option<&Stmt>) -> Next {
    let mut succ = Vec::new();
    for g in gs {
        match eval_bool(&g.guard, s) {
            Err(_) => return Next::Fail,
            Ok(false) => {}
            Ok(true) => {
                let mut k = vec![g.body.clone()];
                k.extend(again.cloned());
                k.extend_from_slice(rest);
                succ.push((k, s.clone()));
            }
        }
    }
    match (succ.is_empty(), again) {
        (true, None) => Next::Fail,
        (true, Some(_)) => Next::Succ(vec![(rest.to_vec(), s.clone())]),
        (false, _) => Next::Succ(succ),
    }
}

fn next(k: &[Stmt], s: &State, choice_bound: u64) -> Next {
    let Some((first, rest)) = k.split_first() else {
        return Next::Done;
    };
    let with = |s: State| (rest.to_vec(), s);
    match first {
        Stmt::Skip => Next::Succ(vec![with(s.clone())]),
        Stmt::Abort | Stmt::Fail => Next::Fail,
        Stmt::Assign(ts, es) => match exec_assign(ts, es, s) {
            Ok(t) => Next::Succ(vec![with(t)]),
            Err(_) => Next::Fail,
        },
        Stmt::Random(x) => Next::Succ(
            (0..=choice_bound as i64)
                .map(|v| with(s.clone().with(x, v)))
                .collect(),
        ),
        Stmt::Choice(x, e) => match eval_int(e, s).ok().and_then(|t| t.to_i64()) {
            Some(t) if t >= 1 => Next::Succ((1..=t).map(|v| with(s.clone().with(x, v))).collect()),
            _ => Next::Fail,
        },
        Stmt::Seq(parts) => {
            let mut k2 = parts.clone();
            k2.extend_from_slice(rest);
            Next::Succ(vec![(k2, s.clone())])
        }
        Stmt::If(gs) => guarded(gs, s, rest, None),
        Stmt::Do(gs) => guarded(gs, s, rest, Some(first)),
    }
}

/// Every outcome of `p` from `s0`, or `None` past `max_nodes` configurations.
pub fn reference(
    p: &GclProgram,
    s0: State,
    choice_bound: u64,
    max_nodes: usize,
) -> Option<Reference> {
    let mut out = Reference::default();
    let start = (vec![p.body.clone()], s0);
    let mut seen: HashSet<Node> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((k, s)) = queue.pop_front() {
        match next(&k, &s, choice_bound) {
            Next::Done => {
                out.terminated.insert(s.canonical());
            }
            Next::Fail => {
                out.failed.insert(s.canonical());
            }
            Next::Succ(succ) => {
                out.branching |= succ.len() > 1;
                for n in succ {
                    if seen.insert(n.clone()) {
                        if seen.len() > max_nodes {
                            return None;
                        }
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    Some(out)
}
