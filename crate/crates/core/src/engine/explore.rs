//! Depth-first exploration of a computation tree with memoization, lasso
//! detection and limits. Generic over the transition relation so the GCL
//! machine, the CSP semantics and the interleaving semantics share it.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use super::outcome::{Bound, FailReason, Lasso, Outcome, Snapshot};
use super::report::{ExplorationReport, Limits, Stats};
use crate::state::State;

/// Whether a transition resolves nondeterminism (and counts toward depth).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Silent,
    Decision,
}

impl Move {
    fn cost(self) -> usize {
        match self {
            Move::Silent => 0,
            Move::Decision => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Halt {
    Terminated,
    Failed(FailReason),
}

#[derive(Debug, Clone)]
pub enum Step<C> {
    Next(Vec<(Move, C)>),
    Halt(Halt),
}

pub trait Semantics {
    type Config: Clone + Eq + Hash;

    /// Successors in a fixed order, or the halting verdict.
    fn step(&self, c: &Self::Config) -> Step<Self::Config>;

    fn state<'a>(&self, c: &'a Self::Config) -> &'a State;

    /// Short description of the control part, for witnesses.
    fn control(&self, c: &Self::Config) -> String;

    /// Configurations that are memoized. Every infinite computation must
    /// pass through checkpoints infinitely often.
    fn is_checkpoint(&self, _c: &Self::Config) -> bool {
        true
    }

    /// Control part used to look for lassos that differ only in variables
    /// that never influence control.
    fn control_key(&self, _c: &Self::Config) -> Option<Vec<u32>> {
        None
    }

    /// Whether the variables in these state slots may grow along a cycle
    /// without affecting control or the other variables.
    fn data_independent(&self, _slots: &[usize]) -> bool {
        false
    }
}

/// Report plus terminal states in first-found order.
#[derive(Debug, Clone)]
pub struct Exploration {
    pub report: ExplorationReport,
    pub found: Vec<State>,
}

struct Frame<C> {
    config: C,
    succs: Vec<(Move, C)>,
    next: usize,
    depth: usize,
}

struct Explorer<'a, S: Semantics> {
    sem: &'a S,
    lim: Limits,
    stack: Vec<Frame<S::Config>>,
    visited: HashMap<S::Config, usize>,
    on_path: HashMap<S::Config, usize>,
    by_control: HashMap<Vec<u32>, Vec<usize>>,
    depth_cut: bool,
    cut_seen: HashSet<Bound>,
    outcomes: Vec<Outcome>,
    seen_lassos: HashSet<S::Config>,
    seen_growing: HashSet<(String, Vec<String>, String)>,
    seen_found: HashSet<State>,
    found: Vec<State>,
    stats: Stats,
}

pub fn explore<S: Semantics>(sem: &S, init: S::Config, lim: Limits) -> Exploration {
    let mut ex = Explorer {
        sem,
        lim,
        stack: Vec::new(),
        visited: HashMap::new(),
        on_path: HashMap::new(),
        by_control: HashMap::new(),
        depth_cut: false,
        cut_seen: HashSet::new(),
        outcomes: Vec::new(),
        seen_lassos: HashSet::new(),
        seen_growing: HashSet::new(),
        seen_found: HashSet::new(),
        found: Vec::new(),
        stats: Stats::default(),
    };
    ex.arrive(init, 0);
    ex.run();
    Exploration {
        report: ExplorationReport::new(ex.outcomes, ex.stats, lim),
        found: ex.found,
    }
}

impl<S: Semantics> Explorer<'_, S> {
    fn run(&mut self) {
        while let Some(top) = self.stack.last_mut() {
            if top.next == top.succs.len() {
                let f = self.stack.pop().expect("nonempty");
                self.on_path.remove(&f.config);
                if let Some(k) = self.sem.control_key(&f.config) {
                    if let Some(v) = self.by_control.get_mut(&k) {
                        v.pop();
                    }
                }
                continue;
            }
            let (mv, c) = top.succs[top.next].clone();
            top.next += 1;
            let depth = top.depth + mv.cost();
            self.stats.edges += 1;
            self.arrive(c, depth);
        }
    }

    fn cut(&mut self, b: Bound) {
        if b == Bound::MaxDepth {
            self.depth_cut = true;
        }
        self.stats.paths += 1;
        if self.cut_seen.insert(b) {
            self.outcomes.push(Outcome::BoundExceeded(b));
        }
    }

    /// Follows deterministic non-checkpoint steps, then visits the node.
    fn arrive(&mut self, mut c: S::Config, mut depth: usize) {
        if depth > self.lim.max_depth {
            return self.cut(Bound::MaxDepth);
        }
        let mut pending = None;
        while !self.sem.is_checkpoint(&c) {
            match self.sem.step(&c) {
                Step::Next(mut v) if v.len() == 1 => {
                    let (mv, next) = v.pop().expect("one successor");
                    depth += mv.cost();
                    self.stats.edges += 1;
                    if depth > self.lim.max_depth {
                        return self.cut(Bound::MaxDepth);
                    }
                    c = next;
                }
                other => {
                    pending = Some(other);
                    break;
                }
            }
        }
        self.visit(c, depth, pending);
    }

    fn snapshots(&self, last: &S::Config) -> Vec<Snapshot> {
        self.stack
            .iter()
            .map(|f| &f.config)
            .chain(std::iter::once(last))
            .map(|c| Snapshot {
                control: self.sem.control(c),
                state: self.sem.state(c).clone(),
            })
            .collect()
    }

    fn visit(&mut self, c: S::Config, depth: usize, pending: Option<Step<S::Config>>) {
        if let Some(&idx) = self.on_path.get(&c) {
            self.stats.paths += 1;
            if self.seen_lassos.insert(c.clone()) {
                let lasso = Lasso {
                    path: self.snapshots(&c),
                    cycle_start: idx,
                    hidden: Vec::new(),
                };
                self.outcomes.push(Outcome::Divergent(lasso));
            }
            return;
        }
        if let Some(&d) = self.visited.get(&c) {
            if d <= depth || !self.depth_cut {
                self.stats.paths += 1;
                return;
            }
        }
        if self.stats.configs >= self.lim.max_configs {
            return self.cut(Bound::MaxConfigs);
        }
        self.stats.configs += 1;
        self.visited.insert(c.clone(), depth);

        let step = pending.unwrap_or_else(|| self.sem.step(&c));
        let succs = match step {
            Step::Halt(h) => {
                self.stats.paths += 1;
                let state = self.sem.state(&c).clone();
                self.outcomes.push(match h {
                    Halt::Terminated => {
                        if self.seen_found.insert(state.clone()) {
                            self.found.push(state.clone());
                        }
                        Outcome::Terminated(state)
                    }
                    Halt::Failed(reason) => Outcome::Failed { reason, state },
                });
                return;
            }
            Step::Next(v) if v.is_empty() => {
                self.stats.paths += 1;
                self.outcomes.push(Outcome::Failed {
                    reason: FailReason::Deadlock,
                    state: self.sem.state(&c).clone(),
                });
                return;
            }
            Step::Next(v) => v,
        };

        let key = self.sem.control_key(&c);
        if let Some(k) = &key {
            if let Some(&idx) = self.by_control.get(k).and_then(|v| v.last()) {
                self.check_growing(idx, &c);
            }
        }
        let idx = self.stack.len();
        self.on_path.insert(c.clone(), idx);
        if let Some(k) = key {
            self.by_control.entry(k).or_default().push(idx);
        }
        self.stack.push(Frame {
            config: c,
            succs,
            next: 0,
            depth,
        });
    }

    /// Lasso up to variables that grow without influencing control.
    fn check_growing(&mut self, idx: usize, c: &S::Config) {
        let old = self.sem.state(&self.stack[idx].config);
        let new = self.sem.state(c);
        if old.names() != new.names() {
            return;
        }
        let diff: Vec<usize> = (0..old.slots().len())
            .filter(|&k| old.slot(k) != new.slot(k))
            .collect();
        if diff.is_empty() || !self.sem.data_independent(&diff) {
            return;
        }
        let hidden: Vec<String> = diff.iter().map(|&k| old.names()[k].clone()).collect();
        let names: Vec<&str> = hidden.iter().map(String::as_str).collect();
        let key = (
            self.sem.control(c),
            hidden.clone(),
            new.hide(&names).canonical(),
        );
        if self.seen_growing.insert(key) {
            let lasso = Lasso {
                path: self.snapshots(c),
                cycle_start: idx,
                hidden,
            };
            self.outcomes.push(Outcome::Divergent(lasso));
        }
    }
}
