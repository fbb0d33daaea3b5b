//! The CSP fragment: processes `S_i0; do []_j B_ij; α_ij -> S_ij od` with
//! disjoint variables, its direct semantics and the translation into one
//! guarded-commands loop.

use std::fmt;

use crate::engine::Config as MachineConfig;
use crate::engine::{
    explore, ExplorationReport, FailReason, Halt, Limits, Machine, Move, Semantics, Step,
};
use crate::state::{eval_bool, State};
use crate::syntax::typeck::{expr_type, TypeEnv};
use crate::syntax::{
    CspSystem, DeclKind, Expr, GclProgram, GuardedCommand, IoCommand, Stmt, Target,
};

/// `(i, j, r, s)`: guard `j` of process `i` communicates with guard `s` of
/// process `r`, and `i < r`. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrespondencePair {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub s: usize,
}

impl fmt::Display for CorrespondencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.i, self.j, self.r, self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CspError {
    #[error("i/o commands do not correspond: need one input and one output")]
    NotCorresponding,
}

fn io_type(sys: &CspSystem, p: usize, io: &IoCommand) -> Option<crate::syntax::Type> {
    let env = TypeEnv::from_decls(&sys.processes[p].declarations);
    match io {
        IoCommand::Input { target, .. } => match env.get(target)? {
            DeclKind::Scalar(t) => Some(*t),
            DeclKind::Array { .. } => None,
        },
        IoCommand::Output { expr, .. } => expr_type(expr, &env).ok(),
    }
}

fn corresponds(sys: &CspSystem, p: usize, a: &IoCommand, q: &IoCommand, r: usize) -> bool {
    let (pn, rn) = (&sys.processes[p].name, &sys.processes[r].name);
    let shape = match (a, q) {
        (IoCommand::Output { peer: x, .. }, IoCommand::Input { peer: y, .. })
        | (IoCommand::Input { peer: x, .. }, IoCommand::Output { peer: y, .. }) => {
            x == rn && y == pn
        }
        _ => false,
    };
    shape && io_type(sys, p, a).is_some() && io_type(sys, p, a) == io_type(sys, r, q)
}

/// Γ in lexicographic order.
pub fn correspondence_pairs(sys: &CspSystem) -> Vec<CorrespondencePair> {
    let mut out = Vec::new();
    for (i, pi) in sys.processes.iter().enumerate() {
        for (j, gij) in pi.loop_guards.iter().enumerate() {
            for (r, pr) in sys.processes.iter().enumerate().skip(i + 1) {
                for (s, grs) in pr.loop_guards.iter().enumerate() {
                    if corresponds(sys, i, &gij.io, &grs.io, r) {
                        out.push(CorrespondencePair { i, j, r, s });
                    }
                }
            }
        }
    }
    out
}

/// `x := t` for the input `P?x` and the output `Q!t`, in either order.
pub fn eff(a1: &IoCommand, a2: &IoCommand) -> Result<Stmt, CspError> {
    match (a1, a2) {
        (IoCommand::Input { target, .. }, IoCommand::Output { expr, .. })
        | (IoCommand::Output { expr, .. }, IoCommand::Input { target, .. }) => Ok(Stmt::Assign(
            vec![Target::Var(target.clone())],
            vec![expr.clone()],
        )),
        _ => Err(CspError::NotCorresponding),
    }
}

fn pair_guard(sys: &CspSystem, g: &CorrespondencePair) -> Expr {
    let a = &sys.processes[g.i].loop_guards[g.j];
    let b = &sys.processes[g.r].loop_guards[g.s];
    match (&a.guard, &b.guard) {
        (Expr::Bool(true), other) | (other, Expr::Bool(true)) => other.clone(),
        (x, y) => Expr::binary(crate::syntax::BinOp::And, x.clone(), y.clone()),
    }
}

/// `Eff(α_ij, α_rs); S_ij; S_rs`.
fn pair_body(sys: &CspSystem, g: &CorrespondencePair) -> Stmt {
    let a = &sys.processes[g.i].loop_guards[g.j];
    let b = &sys.processes[g.r].loop_guards[g.s];
    let e = eff(&a.io, &b.io).expect("pairs in Γ correspond");
    Stmt::seq([e, a.body.clone(), b.body.clone()])
}

fn init_stmt(sys: &CspSystem) -> Stmt {
    Stmt::seq(sys.processes.iter().map(|p| p.init.clone()))
}

pub fn translate_csp(sys: &CspSystem) -> GclProgram {
    let gamma = correspondence_pairs(sys);
    let mut body = vec![init_stmt(sys)];
    if !gamma.is_empty() {
        body.push(Stmt::Do(
            gamma
                .iter()
                .map(|g| GuardedCommand::new(pair_guard(sys, g), pair_body(sys, g)))
                .collect(),
        ));
    }
    GclProgram {
        declarations: sys.declarations(),
        body: Stmt::seq(body),
    }
}

/// `translate_csp(sys); if TERM -> skip fi`, so that a deadlock of the
/// system becomes a failure of the program.
pub fn translate_csp_checked(sys: &CspSystem) -> GclProgram {
    let mut p = translate_csp(sys);
    let check = Stmt::If(vec![GuardedCommand::new(term_condition(sys), Stmt::Skip)]);
    p.body = Stmt::seq([p.body, check]);
    p
}

/// Conjunction of the negated boolean parts of every loop guard.
pub fn term_condition(sys: &CspSystem) -> Expr {
    Expr::conj(
        sys.processes
            .iter()
            .flat_map(|p| &p.loop_guards)
            .map(|g| Expr::not(g.guard.clone())),
    )
}

/// Configurations of the direct semantics: initial statements, the joint
/// loop head, or a communication followed by both bodies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CspConfig {
    Init(MachineConfig),
    Head(State),
    Body(usize, MachineConfig),
}

/// The direct semantics as a transition system.
pub struct CspSemantics {
    sys: CspSystem,
    gamma: Vec<CorrespondencePair>,
    init: Machine,
    bodies: Vec<Machine>,
}

impl CspSemantics {
    pub fn new(sys: &CspSystem, choice_bound: u64) -> Self {
        let gamma = correspondence_pairs(sys);
        let machine = |body: Stmt| {
            Machine::new(&GclProgram {
                declarations: sys.declarations(),
                body,
            })
            .with_choice_bound(choice_bound)
        };
        CspSemantics {
            init: machine(init_stmt(sys)),
            bodies: gamma.iter().map(|g| machine(pair_body(sys, g))).collect(),
            gamma,
            sys: sys.clone(),
        }
    }

    pub fn initial(&self, s0: State) -> CspConfig {
        CspConfig::Init(self.init.initial(s0))
    }

    fn head(&self, s: &State) -> Step<CspConfig> {
        let mut moves = Vec::new();
        let mut unfinished = false;
        for (k, g) in self.gamma.iter().enumerate() {
            let a = &self.sys.processes[g.i].loop_guards[g.j].guard;
            let b = &self.sys.processes[g.r].loop_guards[g.s].guard;
            let both = match (eval_bool(a, s), eval_bool(b, s)) {
                (Ok(x), Ok(y)) => x && y,
                (Err(e), _) | (_, Err(e)) => {
                    return Step::Halt(Halt::Failed(FailReason::from_eval(e)))
                }
            };
            if both {
                moves.push((
                    Move::Decision,
                    CspConfig::Body(k, self.bodies[k].initial(s.clone())),
                ));
            }
        }
        if !moves.is_empty() {
            return Step::Next(moves);
        }
        for g in self.sys.processes.iter().flat_map(|p| &p.loop_guards) {
            match eval_bool(&g.guard, s) {
                Ok(b) => unfinished |= b,
                Err(e) => return Step::Halt(Halt::Failed(FailReason::from_eval(e))),
            }
        }
        Step::Halt(if unfinished {
            Halt::Failed(FailReason::Deadlock)
        } else {
            Halt::Terminated
        })
    }

    fn inner(
        &self,
        m: &Machine,
        c: &MachineConfig,
        wrap: impl Fn(MachineConfig) -> CspConfig,
    ) -> Step<CspConfig> {
        match m.step(c) {
            Step::Next(v) => Step::Next(v.into_iter().map(|(mv, c)| (mv, wrap(c))).collect()),
            Step::Halt(Halt::Terminated) => {
                Step::Next(vec![(Move::Silent, CspConfig::Head(c.state.clone()))])
            }
            Step::Halt(h) => Step::Halt(h),
        }
    }
}

impl Semantics for CspSemantics {
    type Config = CspConfig;

    fn step(&self, c: &CspConfig) -> Step<CspConfig> {
        match c {
            CspConfig::Init(mc) => self.inner(&self.init, mc, CspConfig::Init),
            CspConfig::Head(s) => self.head(s),
            CspConfig::Body(k, mc) => {
                let k = *k;
                self.inner(&self.bodies[k], mc, move |c| CspConfig::Body(k, c))
            }
        }
    }

    fn state<'a>(&self, c: &'a CspConfig) -> &'a State {
        match c {
            CspConfig::Init(mc) | CspConfig::Body(_, mc) => &mc.state,
            CspConfig::Head(s) => s,
        }
    }

    fn control(&self, c: &CspConfig) -> String {
        match c {
            CspConfig::Init(mc) => format!("init {}", self.init.control(mc)),
            CspConfig::Head(_) => "loop".to_string(),
            CspConfig::Body(k, mc) => {
                format!("comm {} {}", self.gamma[*k], self.bodies[*k].control(mc))
            }
        }
    }

    fn is_checkpoint(&self, c: &CspConfig) -> bool {
        match c {
            CspConfig::Init(mc) => self.init.is_checkpoint(mc),
            CspConfig::Head(_) => true,
            CspConfig::Body(k, mc) => self.bodies[*k].is_checkpoint(mc),
        }
    }
}

/// Exhaustive exploration of the direct semantics. Proper termination is
/// `Terminated`; a halt with some process unfinished is `Failed(deadlock)`.
pub fn run_csp(sys: &CspSystem, s0: State, lim: Limits) -> ExplorationReport {
    let sem = CspSemantics::new(sys, lim.choice_bound);
    explore(&sem, sem.initial(s0), lim).report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{explore_demonic, Outcome};
    use crate::state::eval_bool;
    use crate::syntax::{parse_csp, render};

    const SFR: &str = "
        const BLANK = 0; const AST = -1;
        process SENDER
          var a: array[0..4] of int = [2, 0, 3, -1, 0]; var i: int; var M: int = 4;
          i := 0;
          do i != M; FILTER!a[i] -> i := i + 1 od
        end
        process FILTER
          var b: array[0..4] of int; var in, out, x: int;
          in := 0; out := 0; x := BLANK;
          do x != AST; SENDER?x -> if x = BLANK -> skip [] x != BLANK -> b[in] := x; in := in + 1 fi
          [] out != in; RECEIVER!b[out] -> out := out + 1
          od
        end
        process RECEIVER
          var c: array[0..4] of int; var j, y: int;
          j := 0; y := BLANK;
          do y != AST; FILTER?y -> c[j] := y; j := j + 1 od
        end";

    fn sfr() -> (CspSystem, State) {
        let sys = parse_csp(SFR).unwrap();
        let s = State::new(&sys.declarations());
        (sys, s)
    }

    #[test]
    fn sfr_gamma_and_translation() {
        let (sys, _) = sfr();
        let gamma = correspondence_pairs(&sys);
        assert_eq!(
            gamma,
            vec![
                CorrespondencePair {
                    i: 0,
                    j: 0,
                    r: 1,
                    s: 0
                },
                CorrespondencePair {
                    i: 1,
                    j: 1,
                    r: 2,
                    s: 0
                },
            ]
        );
        let p = translate_csp(&sys);
        let Some(Stmt::Do(gs)) = p.body.as_slice().last() else {
            panic!()
        };
        assert_eq!(gs.len(), 2);
        assert_eq!(
            gs[0].body.as_slice()[0],
            Stmt::assign("x", Expr::index("a", Expr::var("i")))
        );
        assert_eq!(p.declarations, sys.declarations());
        assert_eq!(crate::syntax::parse_gcl(&render(&p)).unwrap(), p);
    }

    #[test]
    fn sfr_filters_blanks() {
        let (sys, s) = sfr();
        let rep = run_csp(&sys, s, Limits::default());
        assert_eq!(rep.outcomes.len(), 1, "{}", rep.to_text());
        let Outcome::Terminated(f) = &rep.outcomes[0] else {
            panic!("{}", rep.to_text())
        };
        assert_eq!(&f.array_i64("c").unwrap()[..3], &[2, 3, -1]);
        assert_eq!(f.i64("j"), Some(3));
    }

    #[test]
    fn eff_is_symmetric() {
        let inp = IoCommand::Input {
            peer: "P".into(),
            target: "x".into(),
        };
        let out = IoCommand::Output {
            peer: "Q".into(),
            expr: Expr::int(1),
        };
        assert_eq!(eff(&inp, &out).unwrap(), eff(&out, &inp).unwrap());
        assert_eq!(eff(&inp, &inp), Err(CspError::NotCorresponding));
    }

    #[test]
    fn crosswise_guards_give_four_pairs() {
        let sys = parse_csp(
            "process P var x, u: int; do true; Q!1 -> skip [] true; Q?x -> skip od end
             process Q var y, v: int; do true; P?y -> skip [] true; P!2 -> skip od end",
        )
        .unwrap();
        assert_eq!(correspondence_pairs(&sys).len(), 2);
        let sys = parse_csp(
            "process P var x: int; do true; Q!1 -> skip [] x > 0; Q!2 -> skip od end
             process Q var y, v: int; do true; P?y -> skip [] true; P?v -> skip od end",
        )
        .unwrap();
        assert_eq!(correspondence_pairs(&sys).len(), 4);
    }

    #[test]
    fn degenerate_and_term() {
        let sys = parse_csp("process P var x: int; x := 3 end").unwrap();
        assert!(correspondence_pairs(&sys).is_empty());
        assert_eq!(translate_csp(&sys).body, Stmt::assign("x", Expr::int(3)));
        assert_eq!(term_condition(&sys), Expr::Bool(true));
        let sys = parse_csp(
            "process P var x: int; do true; Q?x -> skip od end
             process Q var y: int; y := 0 end",
        )
        .unwrap();
        let s = State::new(&sys.declarations());
        assert!(!eval_bool(&term_condition(&sys), &s).unwrap());
        let rep = run_csp(&sys, s, Limits::default());
        assert!(matches!(
            rep.outcomes.as_slice(),
            [Outcome::Failed {
                reason: FailReason::Deadlock,
                ..
            }]
        ));
    }

    #[test]
    fn circular_wait_deadlocks_both_ways() {
        let sys = parse_csp(
            "process P var x, u: int; x := 0;
               do x = 0; Q?u -> x := 1 [] x = 1; Q!1 -> x := 2 od end
             process Q var y, v: int; y := 0;
               do y = 0; P?v -> y := 1 [] y = 1; P!1 -> y := 2 od end",
        )
        .unwrap();
        let s = State::new(&sys.declarations());
        let direct = run_csp(&sys, s.clone(), Limits::default());
        assert!(matches!(
            direct.outcomes.as_slice(),
            [Outcome::Failed {
                reason: FailReason::Deadlock,
                ..
            }]
        ));
        let translated = explore_demonic(&translate_csp(&sys), s.clone(), Limits::default());
        let [Outcome::Terminated(f)] = translated.outcomes.as_slice() else {
            panic!()
        };
        assert!(!eval_bool(&term_condition(&sys), f).unwrap());
        let checked = explore_demonic(&translate_csp_checked(&sys), s, Limits::default());
        assert!(matches!(
            checked.outcomes.as_slice(),
            [Outcome::Failed {
                reason: FailReason::AllGuardsFalse,
                ..
            }]
        ));
    }

    #[test]
    fn finished_process_without_communication() {
        let sys = parse_csp(
            "process P var x: int; x := 0; do x > 0; Q!x -> x := x - 1 od end
             process Q var y: int; do true; P?y -> skip od end",
        )
        .unwrap();
        let s = State::new(&sys.declarations());
        let rep = run_csp(&sys, s, Limits::default());
        assert!(matches!(rep.outcomes.as_slice(), [Outcome::Failed { .. }]));
        let sys = parse_csp(
            "process P var x: int; x := 0; do x > 0; Q!x -> x := x - 1 od end
             process Q var y: int; y := 5; do y < 5; P?y -> skip od end",
        )
        .unwrap();
        let s = State::new(&sys.declarations());
        let rep = run_csp(&sys, s, Limits::default());
        assert!(matches!(rep.outcomes.as_slice(), [Outcome::Terminated(_)]));
    }
}
