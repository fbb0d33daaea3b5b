//! Small transition systems and brute-force must testing over them.

use std::collections::{BTreeMap, BTreeSet};

use gcl_core::equiv::{failures_over, Lts, TAU};
use rand::Rng;

pub const LABELS: [&str; 3] = ["a", "b", TAU];

fn from_mask(n: usize, mask: u64) -> Lts {
    let mut l = Lts::with_size(n, &["a", "b"]);
    let mut bit = 0;
    for s in 0..n {
        for label in LABELS {
            for t in 0..n {
                if mask >> bit & 1 == 1 {
                    l.add(s, label, t);
                }
                bit += 1;
            }
        }
    }
    l
}

/// Every divergence-free system with `n` states over `{a, b}`.
pub fn all_ltss(n: usize) -> Vec<Lts> {
    let bits = n * LABELS.len() * n;
    (0..1u64 << bits)
        .map(|m| from_mask(n, m))
        .filter(|l| l.tau_cycle().is_none())
        .collect()
}

/// A divergence-free system with `n` states, each transition present with
/// probability `p`.
pub fn random_lts(rng: &mut impl Rng, n: usize, p: f64) -> Lts {
    loop {
        let mut l = Lts::with_size(n, &["a", "b"]);
        for s in 0..n {
            for label in LABELS {
                for t in 0..n {
                    if rng.gen_bool(p) {
                        l.add(s, label, t);
                    }
                }
            }
        }
        if l.tau_cycle().is_none() {
            return l;
        }
    }
}

/// Failures with refusals for traces shorter than `depth` and plain
/// traces of length `depth`: what tests of depth `depth` can observe.
pub fn failure_signature(l: &Lts, depth: usize) -> BTreeMap<Vec<String>, Vec<BTreeSet<String>>> {
    let alphabet: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let mut f = failures_over(l, &alphabet, depth)
        .expect("divergence-free")
        .maximal;
    for (trace, refusals) in f.iter_mut() {
        if trace.len() == depth {
            refusals.clear();
        }
    }
    f
}

/// Two systems side by side, `q` shifted by the state count of `p`.
struct Joint {
    tau: Vec<Vec<usize>>,
    act: Vec<[Vec<usize>; 2]>,
    /// Every state after all of its internal successors.
    order: Vec<usize>,
    all: u64,
}

impl Joint {
    fn new(p: &Lts, q: &Lts) -> Self {
        let np = p.states.len();
        let n = np + q.states.len();
        let mut tau = vec![Vec::new(); n];
        let mut act = vec![[Vec::new(), Vec::new()]; n];
        for (off, l) in [(0, p), (np, q)] {
            for (s, label, t) in &l.transitions {
                match label.as_str() {
                    "a" => act[s + off][0].push(t + off),
                    "b" => act[s + off][1].push(t + off),
                    TAU => tau[s + off].push(t + off),
                    other => panic!("label {other} outside {{a, b}}"),
                }
            }
        }
        let mut order = Vec::new();
        let mut done = vec![false; n];
        fn visit(s: usize, tau: &[Vec<usize>], done: &mut [bool], order: &mut Vec<usize>) {
            if done[s] {
                return;
            }
            done[s] = true;
            for &t in &tau[s] {
                visit(t, tau, done, order);
            }
            order.push(s);
        }
        for s in 0..n {
            visit(s, &tau, &mut done, &mut order);
        }
        Joint {
            tau,
            act,
            order,
            all: (1u64 << n) - 1,
        }
    }

    /// Must-pass bits of every state against a non-success test node
    /// offering `a` and `b` into subtests with the given bits, and an
    /// internal escape to success if `esc`.
    fn eval(&self, va: Option<u64>, vb: Option<u64>, esc: bool) -> u64 {
        let mut res = 0u64;
        for &s in &self.order {
            let sub = [va, vb];
            let mut moves = esc || !self.tau[s].is_empty();
            let mut ok = self.tau[s].iter().all(|&t| res >> t & 1 == 1);
            for (v, succ) in sub.iter().zip(&self.act[s]) {
                if let Some(v) = v {
                    moves |= !succ.is_empty();
                    ok &= succ.iter().all(|&t| v >> t & 1 == 1);
                }
            }
            if moves && ok {
                res |= 1 << s;
            }
        }
        res
    }
}

/// Pass/fail vectors over the states of both systems induced by the tests
/// of depth at most `depth`: deterministic trees over `{a, b}` whose nodes
/// may also escape to success internally. Enumerating tests up to the
/// vector they induce is exact and keeps the enumeration small.
fn test_vectors(j: &Joint, depth: usize) -> BTreeSet<u64> {
    let mut level: BTreeSet<u64> = BTreeSet::from([j.all, 0]);
    for _ in 0..depth {
        let mut options: Vec<Option<u64>> = vec![None];
        options.extend(level.iter().map(|&v| Some(v)));
        let mut next = level.clone();
        for &va in &options {
            for &vb in &options {
                for esc in [false, true] {
                    next.insert(j.eval(va, vb, esc));
                }
            }
        }
        level = next;
    }
    level
}

/// Whether some test of depth at most `depth` is passed in every
/// computation by one system and not the other.
pub fn must_distinguishable(p: &Lts, q: &Lts, depth: usize) -> bool {
    let j = Joint::new(p, q);
    let (ip, iq) = (p.init, q.init + p.states.len());
    test_vectors(&j, depth)
        .into_iter()
        .any(|v| (v >> ip & 1) != (v >> iq & 1))
}

/// Whether `q` must-passes every test of depth at most `depth` that `p`
/// must-passes.
pub fn must_preorder(p: &Lts, q: &Lts, depth: usize) -> bool {
    let j = Joint::new(p, q);
    let (ip, iq) = (p.init, q.init + p.states.len());
    test_vectors(&j, depth)
        .into_iter()
        .all(|v| v >> ip & 1 == 0 || v >> iq & 1 == 1)
}
