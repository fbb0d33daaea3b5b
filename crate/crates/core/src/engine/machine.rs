//! Small-step semantics of guarded commands over a compiled node table.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::One;

use super::explore::{Halt, Move, Semantics, Step};
use super::outcome::FailReason;
use crate::state::{eval_bool, eval_int, exec_assign, Layout, State, Value};
use crate::syntax::{BinOp, Expr, GclProgram, Stmt, Target};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Skip,
    Abort,
    Fail,
    Assign(Vec<Target>, Vec<Expr>),
    Random(String),
    Choice(String, Expr),
    Seq(Vec<NodeId>),
    If(Vec<(Expr, NodeId)>),
    Do(Vec<(Expr, NodeId)>),
}

/// Pending statements (last element runs next) and the current state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub residue: Vec<NodeId>,
    pub state: State,
}

impl Config {
    pub fn is_terminated(&self) -> bool {
        self.residue.is_empty()
    }
}

/// Result of evaluating the guards of an alternative or repetitive command.
pub enum Guards {
    Enabled(Vec<usize>),
    Error(FailReason),
}

pub fn eval_guards<'a>(guards: impl IntoIterator<Item = &'a Expr>, s: &State) -> Guards {
    let mut enabled = Vec::new();
    for (k, g) in guards.into_iter().enumerate() {
        match eval_bool(g, s) {
            Ok(true) => enabled.push(k),
            Ok(false) => {}
            Err(e) => return Guards::Error(FailReason::from_eval(e)),
        }
    }
    Guards::Enabled(enabled)
}

/// A compiled program together with the exhaustive-mode bound for `?`.
#[derive(Debug, Clone)]
pub struct Machine {
    nodes: Vec<Node>,
    root: NodeId,
    pub choice_bound: u64,
    /// Per state slot: read by a guard, index, choice bound or divisor.
    control_slots: Vec<bool>,
    /// Per assignment component: (target slot, slots read by the value).
    flows: Vec<(usize, Vec<usize>)>,
}

impl Machine {
    pub fn new(p: &GclProgram) -> Machine {
        let mut m = Machine {
            nodes: Vec::new(),
            root: 0,
            choice_bound: 10,
            control_slots: Vec::new(),
            flows: Vec::new(),
        };
        m.root = m.compile(&p.body);
        m.analyse(p);
        m
    }

    pub fn with_choice_bound(mut self, b: u64) -> Self {
        self.choice_bound = b;
        self
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn initial(&self, s0: State) -> Config {
        Config {
            residue: vec![self.root],
            state: s0,
        }
    }

    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        (self.nodes.len() - 1) as NodeId
    }

    fn compile(&mut self, s: &Stmt) -> NodeId {
        let n = match s {
            Stmt::Skip => Node::Skip,
            Stmt::Abort => Node::Abort,
            Stmt::Fail => Node::Fail,
            Stmt::Assign(ts, es) => Node::Assign(ts.clone(), es.clone()),
            Stmt::Random(x) => Node::Random(x.clone()),
            Stmt::Choice(x, t) => Node::Choice(x.clone(), t.clone()),
            Stmt::Seq(v) => Node::Seq(v.iter().map(|s| self.compile(s)).collect()),
            Stmt::If(gcs) => Node::If(
                gcs.iter()
                    .map(|g| (g.guard.clone(), self.compile(&g.body)))
                    .collect(),
            ),
            Stmt::Do(gcs) => Node::Do(
                gcs.iter()
                    .map(|g| (g.guard.clone(), self.compile(&g.body)))
                    .collect(),
            ),
        };
        self.push(n)
    }

    fn analyse(&mut self, p: &GclProgram) {
        let layout = Layout::new(&p.declarations);
        let slot = |n: &str| layout.slot(n);
        let mut control: HashSet<usize> = HashSet::new();
        let mut flows = Vec::new();
        let mark = |e: &Expr, control: &mut HashSet<usize>| {
            e.for_each_name(&mut |n| {
                if let Some(k) = slot(n) {
                    control.insert(k);
                }
            })
        };
        for node in &self.nodes {
            let mut exprs: Vec<&Expr> = Vec::new();
            match node {
                Node::If(gs) | Node::Do(gs) => {
                    for (g, _) in gs {
                        mark(g, &mut control);
                        exprs.push(g);
                    }
                }
                Node::Choice(x, t) => {
                    mark(t, &mut control);
                    exprs.push(t);
                    flows.push((slot(x), Vec::new()));
                }
                Node::Random(x) => flows.push((slot(x), Vec::new())),
                Node::Assign(ts, es) => {
                    for (t, e) in ts.iter().zip(es) {
                        if let Target::Cell(_, i) = t {
                            mark(i, &mut control);
                            exprs.push(i);
                        }
                        exprs.push(e);
                        let mut reads = Vec::new();
                        e.for_each_name(&mut |n| reads.extend(slot(n)));
                        flows.push((slot(t.name()), reads));
                    }
                }
                _ => {}
            }
            for e in exprs {
                control_subterms(e, &mut |c| mark(c, &mut control));
            }
        }
        self.control_slots = (0..layout.names().len())
            .map(|k| control.contains(&k))
            .collect();
        self.flows = flows
            .into_iter()
            .filter_map(|(t, r)| Some((t?, r)))
            .collect();
    }

    pub fn step(&self, c: &Config) -> Step<Config> {
        let Some((&top, rest)) = c.residue.split_last() else {
            return Step::Halt(Halt::Terminated);
        };
        let with = |mut extra: Vec<NodeId>, state: State| {
            let mut residue = rest.to_vec();
            residue.append(&mut extra);
            Config { residue, state }
        };
        let fail = |r| Step::Halt(Halt::Failed(r));
        match self.node(top) {
            Node::Skip => Step::Next(vec![(Move::Silent, with(vec![], c.state.clone()))]),
            Node::Abort | Node::Fail => fail(FailReason::ExplicitFail),
            Node::Assign(ts, es) => match exec_assign(ts, es, &c.state) {
                Ok(s) => Step::Next(vec![(Move::Silent, with(vec![], s))]),
                Err(e) => fail(FailReason::from_eval(e)),
            },
            Node::Random(x) => Step::Next(
                (0..=self.choice_bound)
                    .map(|v| {
                        let s = c.state.clone().with(x, BigInt::from(v));
                        (Move::Decision, with(vec![], s))
                    })
                    .collect(),
            ),
            Node::Choice(x, t) => {
                let t = match eval_int(t, &c.state) {
                    Ok(t) => t,
                    Err(e) => return fail(FailReason::from_eval(e)),
                };
                if t < BigInt::one() {
                    return fail(FailReason::EmptyChoice);
                }
                let mut out = Vec::new();
                let mut v = BigInt::one();
                while v <= t {
                    let s = c.state.clone().with(x, Value::Int(v.clone()));
                    out.push((Move::Decision, with(vec![], s)));
                    v += 1;
                }
                Step::Next(out)
            }
            Node::Seq(children) => {
                let extra = children.iter().rev().copied().collect();
                Step::Next(vec![(Move::Silent, with(extra, c.state.clone()))])
            }
            Node::If(gs) => match eval_guards(gs.iter().map(|(g, _)| g), &c.state) {
                Guards::Error(r) => fail(r),
                Guards::Enabled(on) if on.is_empty() => fail(FailReason::AllGuardsFalse),
                Guards::Enabled(on) => Step::Next(
                    on.into_iter()
                        .map(|k| (Move::Decision, with(vec![gs[k].1], c.state.clone())))
                        .collect(),
                ),
            },
            Node::Do(gs) => match eval_guards(gs.iter().map(|(g, _)| g), &c.state) {
                Guards::Error(r) => fail(r),
                Guards::Enabled(on) if on.is_empty() => {
                    Step::Next(vec![(Move::Silent, with(vec![], c.state.clone()))])
                }
                Guards::Enabled(on) => Step::Next(
                    on.into_iter()
                        .map(|k| (Move::Decision, with(vec![top, gs[k].1], c.state.clone())))
                        .collect(),
                ),
            },
        }
    }
}

/// Calls `f` on every subterm whose value decides control or can raise an
/// error: array indices and right operands of `div` and `mod`.
fn control_subterms<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) => {}
        Expr::Index(_, i) => {
            f(i);
            control_subterms(i, f);
        }
        Expr::Unary(_, x) => control_subterms(x, f),
        Expr::Binary(op, l, r) => {
            if matches!(op, BinOp::Div | BinOp::Mod) {
                f(r);
            }
            control_subterms(l, f);
            control_subterms(r, f);
        }
        Expr::Call(_, a, b) => {
            control_subterms(a, f);
            control_subterms(b, f);
        }
    }
}

impl Semantics for Machine {
    type Config = Config;

    fn step(&self, c: &Config) -> Step<Config> {
        Machine::step(self, c)
    }

    fn state<'a>(&self, c: &'a Config) -> &'a State {
        &c.state
    }

    fn control(&self, c: &Config) -> String {
        let ids: Vec<String> = c.residue.iter().map(|n| n.to_string()).collect();
        format!("[{}]", ids.join(" "))
    }

    fn is_checkpoint(&self, c: &Config) -> bool {
        match c.residue.last() {
            None => true,
            Some(&top) => match self.node(top) {
                Node::Do(_) => true,
                Node::If(gs) => gs.len() > 1,
                Node::Random(_) | Node::Choice(..) => true,
                _ => false,
            },
        }
    }

    fn control_key(&self, c: &Config) -> Option<Vec<u32>> {
        Some(c.residue.clone())
    }

    fn data_independent(&self, slots: &[usize]) -> bool {
        if slots
            .iter()
            .any(|&k| self.control_slots.get(k).copied().unwrap_or(true))
        {
            return false;
        }
        self.flows
            .iter()
            .all(|(t, reads)| slots.contains(t) || !reads.iter().any(|r| slots.contains(r)))
    }
}
