//! Shared-variable parallel composition `[S_1 || .. || S_n]`: labelled
//! components, direct interleaving semantics and the control-variable
//! translation into a single repetitive command.

use crate::engine::Config as MachineConfig;
use crate::engine::{
    explore, ExplorationReport, FailReason, Halt, Limits, Machine, Move, Semantics, Step,
};
use crate::state::{eval_bool, exec_assign, State};
use crate::syntax::{
    fresh_family, BinOp, Declaration, Expr, GclProgram, GuardedCommand, ParStmt, ParSystem, Stmt,
    Target,
};

/// One atomic step of a component: `from: guard -> effect; goto to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub from: usize,
    pub guard: Expr,
    /// `None` for pure tests (branch heads, `await`, `skip`).
    pub effect: Option<(Vec<Target>, Vec<Expr>)>,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledComponent {
    /// Label names, indexed by label number.
    pub labels: Vec<String>,
    pub actions: Vec<Action>,
    pub entry: usize,
    pub exit: usize,
}

impl LabeledComponent {
    pub fn actions_from(&self, label: usize) -> impl Iterator<Item = &Action> {
        self.actions.iter().filter(move |a| a.from == label)
    }
}

fn label_name(k: usize) -> String {
    if k < 26 {
        ((b'a' + k as u8) as char).to_string()
    } else {
        format!("l{k}")
    }
}

struct Labeler {
    next: usize,
    actions: Vec<Action>,
}

impl Labeler {
    /// Pre-order label numbers for every statement of the list.
    fn number(&mut self, stmts: &[ParStmt]) -> Vec<usize> {
        stmts
            .iter()
            .map(|s| {
                let here = self.next;
                self.next += 1;
                match s {
                    ParStmt::If(_, t, e) => {
                        self.number(t);
                        self.number(e);
                    }
                    ParStmt::While(_, b) => {
                        self.number(b);
                    }
                    _ => {}
                }
                here
            })
            .collect()
    }

    /// Emits the actions of `stmts`, whose first label is `start`, falling
    /// through to `cont`. Returns the label of the list (or `cont` if empty).
    fn emit(&mut self, stmts: &[ParStmt], start: usize, cont: usize) -> usize {
        if stmts.is_empty() {
            return cont;
        }
        let mut starts = Vec::with_capacity(stmts.len());
        let mut next = start;
        for s in stmts {
            starts.push(next);
            next += size(s);
        }
        for (k, s) in stmts.iter().enumerate() {
            let here = starts[k];
            let after = starts.get(k + 1).copied().unwrap_or(cont);
            let mut act = |guard: Expr, effect, to| {
                self.actions.push(Action {
                    from: here,
                    guard,
                    effect,
                    to,
                });
            };
            match s {
                ParStmt::Skip => act(Expr::Bool(true), None, after),
                ParStmt::Await(b) => act(b.clone(), None, after),
                ParStmt::Assign(ts, es) => {
                    act(Expr::Bool(true), Some((ts.clone(), es.clone())), after)
                }
                ParStmt::If(b, t, e) => {
                    let t_start = here + 1;
                    let e_start = t_start + t.iter().map(size).sum::<usize>();
                    let t_to = self.emit(t, t_start, after);
                    let e_to = self.emit(e, e_start, after);
                    self.actions.push(Action {
                        from: here,
                        guard: b.clone(),
                        effect: None,
                        to: t_to,
                    });
                    self.actions.push(Action {
                        from: here,
                        guard: Expr::not(b.clone()),
                        effect: None,
                        to: e_to,
                    });
                }
                ParStmt::While(b, body) => {
                    let b_to = self.emit(body, here + 1, here);
                    self.actions.push(Action {
                        from: here,
                        guard: b.clone(),
                        effect: None,
                        to: b_to,
                    });
                    self.actions.push(Action {
                        from: here,
                        guard: Expr::not(b.clone()),
                        effect: None,
                        to: after,
                    });
                }
            }
        }
        start
    }
}

fn size(s: &ParStmt) -> usize {
    match s {
        ParStmt::If(_, t, e) => {
            1 + t.iter().map(size).sum::<usize>() + e.iter().map(size).sum::<usize>()
        }
        ParStmt::While(_, b) => 1 + b.iter().map(size).sum::<usize>(),
        _ => 1,
    }
}

/// Labels statements `a, b, c, ..` in pre-order, the exit label last, and
/// lists one action per control transfer ordered by source label.
pub fn label_component(stmts: &[ParStmt]) -> LabeledComponent {
    let mut l = Labeler {
        next: 0,
        actions: Vec::new(),
    };
    l.number(stmts);
    let exit = l.next;
    let entry = l.emit(stmts, 0, exit);
    let mut actions = l.actions;
    actions.sort_by_key(|a| a.from);
    LabeledComponent {
        labels: (0..=exit).map(label_name).collect(),
        actions,
        entry,
        exit,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParError {
    #[error("no fresh names for the control variables")]
    NoFreshNames,
}

/// Control variable names `cv_1..cv_n`, avoiding program variables.
pub fn control_variables(sys: &ParSystem) -> Result<Vec<String>, ParError> {
    fresh_family("cv", sys.components.len(), &sys.declarations).ok_or(ParError::NoFreshNames)
}

fn guarded(cv: &str, from: usize, guard: &Expr) -> Expr {
    let at = Expr::binary(BinOp::Eq, Expr::var(cv), Expr::int(from as u64));
    match guard {
        Expr::Bool(true) => at,
        g => Expr::binary(BinOp::And, at, g.clone()),
    }
}

/// `init; cv := entries; do [] cv_i = from and guard -> effect; cv_i := to od;
/// if cv = exits -> skip fi; epilogue`. Labels are encoded as their index.
pub fn translate_par(sys: &ParSystem) -> Result<GclProgram, ParError> {
    let cvs = control_variables(sys)?;
    let comps: Vec<LabeledComponent> = sys.components.iter().map(|c| label_component(c)).collect();
    let mut declarations = sys.declarations.clone();
    declarations.extend(cvs.iter().map(Declaration::int));
    let mut commands = Vec::new();
    for (cv, c) in cvs.iter().zip(&comps) {
        for a in &c.actions {
            let jump = Stmt::assign(cv, Expr::int(a.to as u64));
            let body = match &a.effect {
                Some((ts, es)) => Stmt::seq([Stmt::Assign(ts.clone(), es.clone()), jump]),
                None => jump,
            };
            commands.push(GuardedCommand::new(guarded(cv, a.from, &a.guard), body));
        }
    }
    let start = Stmt::Assign(
        cvs.iter().map(|v| Target::Var(v.clone())).collect(),
        comps.iter().map(|c| Expr::int(c.entry as u64)).collect(),
    );
    let all_exited = Expr::conj(
        cvs.iter()
            .zip(&comps)
            .map(|(v, c)| Expr::binary(BinOp::Eq, Expr::var(v), Expr::int(c.exit as u64))),
    );
    let mut body = vec![sys.init.clone(), start];
    if !commands.is_empty() {
        body.push(Stmt::Do(commands));
    }
    body.push(Stmt::If(vec![GuardedCommand::new(all_exited, Stmt::Skip)]));
    body.push(sys.epilogue.clone());
    Ok(GclProgram {
        declarations,
        body: Stmt::seq(body),
    })
}

/// Comment block mapping control values to labels, one line per component.
pub fn label_table(sys: &ParSystem) -> Result<String, ParError> {
    let cvs = control_variables(sys)?;
    let mut out = String::new();
    for (cv, c) in cvs.iter().zip(&sys.components) {
        let lc = label_component(c);
        let pairs: Vec<String> = lc
            .labels
            .iter()
            .enumerate()
            .map(|(k, l)| format!("{k}={l}"))
            .collect();
        out.push_str(&format!(
            "# {cv}: {} (entry {}, exit {})\n",
            pairs.join(" "),
            lc.labels[lc.entry],
            lc.labels[lc.exit]
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParConfig {
    Init(MachineConfig),
    Run(Vec<usize>, State),
    Epilogue(MachineConfig),
}

/// Interleaving semantics over the labelled components.
pub struct ParSemantics {
    comps: Vec<LabeledComponent>,
    init: Machine,
    epilogue: Machine,
}

impl ParSemantics {
    pub fn new(sys: &ParSystem, choice_bound: u64) -> Self {
        let machine = |body: &Stmt| {
            Machine::new(&GclProgram {
                declarations: sys.declarations.clone(),
                body: body.clone(),
            })
            .with_choice_bound(choice_bound)
        };
        ParSemantics {
            comps: sys.components.iter().map(|c| label_component(c)).collect(),
            init: machine(&sys.init),
            epilogue: machine(&sys.epilogue),
        }
    }

    pub fn initial(&self, s0: State) -> ParConfig {
        ParConfig::Init(self.init.initial(s0))
    }

    fn run(&self, pcs: &[usize], s: &State) -> Step<ParConfig> {
        let mut moves = Vec::new();
        for (i, c) in self.comps.iter().enumerate() {
            for a in c.actions_from(pcs[i]) {
                match eval_bool(&a.guard, s) {
                    Ok(false) => continue,
                    Ok(true) => {}
                    Err(e) => return Step::Halt(Halt::Failed(FailReason::from_eval(e))),
                }
                let next = match &a.effect {
                    None => s.clone(),
                    Some((ts, es)) => match exec_assign(ts, es, s) {
                        Ok(n) => n,
                        Err(e) => return Step::Halt(Halt::Failed(FailReason::from_eval(e))),
                    },
                };
                let mut pcs2 = pcs.to_vec();
                pcs2[i] = a.to;
                moves.push((Move::Decision, ParConfig::Run(pcs2, next)));
            }
        }
        if !moves.is_empty() {
            Step::Next(moves)
        } else if pcs.iter().zip(&self.comps).all(|(&pc, c)| pc == c.exit) {
            Step::Next(vec![(
                Move::Silent,
                ParConfig::Epilogue(self.epilogue.initial(s.clone())),
            )])
        } else {
            Step::Halt(Halt::Failed(FailReason::Deadlock))
        }
    }
}

impl Semantics for ParSemantics {
    type Config = ParConfig;

    fn step(&self, c: &ParConfig) -> Step<ParConfig> {
        match c {
            ParConfig::Init(mc) => match self.init.step(mc) {
                Step::Next(v) => Step::Next(
                    v.into_iter()
                        .map(|(m, c)| (m, ParConfig::Init(c)))
                        .collect(),
                ),
                Step::Halt(Halt::Terminated) => Step::Next(vec![(
                    Move::Silent,
                    ParConfig::Run(
                        self.comps.iter().map(|c| c.entry).collect(),
                        mc.state.clone(),
                    ),
                )]),
                Step::Halt(h) => Step::Halt(h),
            },
            ParConfig::Run(pcs, s) => self.run(pcs, s),
            ParConfig::Epilogue(mc) => match self.epilogue.step(mc) {
                Step::Next(v) => Step::Next(
                    v.into_iter()
                        .map(|(m, c)| (m, ParConfig::Epilogue(c)))
                        .collect(),
                ),
                Step::Halt(h) => Step::Halt(h),
            },
        }
    }

    fn state<'a>(&self, c: &'a ParConfig) -> &'a State {
        match c {
            ParConfig::Init(mc) | ParConfig::Epilogue(mc) => &mc.state,
            ParConfig::Run(_, s) => s,
        }
    }

    fn control(&self, c: &ParConfig) -> String {
        match c {
            ParConfig::Init(mc) => format!("init {}", self.init.control(mc)),
            ParConfig::Run(pcs, _) => {
                let ls: Vec<&str> = pcs
                    .iter()
                    .zip(&self.comps)
                    .map(|(&pc, c)| c.labels[pc].as_str())
                    .collect();
                format!("at {}", ls.join(","))
            }
            ParConfig::Epilogue(mc) => format!("epilogue {}", self.epilogue.control(mc)),
        }
    }

    fn is_checkpoint(&self, c: &ParConfig) -> bool {
        match c {
            ParConfig::Init(mc) => self.init.is_checkpoint(mc),
            ParConfig::Run(..) => true,
            ParConfig::Epilogue(mc) => self.epilogue.is_checkpoint(mc),
        }
    }
}

/// Exhaustive interleaving exploration without translation. A halt with
/// some component short of its exit is `Failed(deadlock)`.
pub fn run_par_direct(sys: &ParSystem, s0: State, lim: Limits) -> ExplorationReport {
    let sem = ParSemantics::new(sys, lim.choice_bound);
    explore(&sem, sem.initial(s0), lim).report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{explore_demonic, Outcome};
    use crate::syntax::{parse_gcl, parse_par, render};

    const ZERO: &str = "
        var ia: array[1..5] of int; var i, j, oddtop, eventop, k: int; const N = 5;
        i := 1; j := 2; oddtop := N + 1; eventop := N + 1;
        [ while i < min(oddtop, eventop) do
            if ia[i] > 0 then oddtop := i else i := i + 2 fi
          od
        || while j < min(oddtop, eventop) do
            if ia[j] > 0 then eventop := j else j := j + 2 fi
          od
        ];
        k := min(oddtop, eventop)";

    #[test]
    fn zero_search_component_labels() {
        let sys = parse_par(ZERO).unwrap();
        let c = label_component(&sys.components[0]);
        assert_eq!(c.labels, ["a", "b", "c", "d", "e"]);
        let edges: Vec<(&str, &str, bool)> = c
            .actions
            .iter()
            .map(|a| {
                (
                    c.labels[a.from].as_str(),
                    c.labels[a.to].as_str(),
                    a.effect.is_some(),
                )
            })
            .collect();
        assert_eq!(
            edges,
            [
                ("a", "b", false),
                ("a", "e", false),
                ("b", "c", false),
                ("b", "d", false),
                ("c", "a", true),
                ("d", "a", true),
            ]
        );
    }

    #[test]
    fn small_components() {
        let sys = parse_par("var x: int; [ x := 1 || await x > 0 ]").unwrap();
        let a = label_component(&sys.components[0]);
        assert_eq!((a.labels.len(), a.actions.len()), (2, 1));
        let b = label_component(&sys.components[1]);
        assert_eq!(b.actions.len(), 1);
        assert_eq!(b.actions[0].guard, parse_expr_x("x > 0"));
    }

    fn parse_expr_x(src: &str) -> Expr {
        crate::syntax::parse_expr(src, &[Declaration::int("x")]).unwrap()
    }

    #[test]
    fn zero_search_translation_shape() {
        let sys = parse_par(ZERO).unwrap();
        let p = translate_par(&sys).unwrap();
        let do_cmds = p
            .body
            .as_slice()
            .iter()
            .find_map(|s| match s {
                Stmt::Do(g) => Some(g.len()),
                _ => None,
            })
            .unwrap();
        assert_eq!(do_cmds, 12);
        assert_eq!(parse_gcl(&render(&p)).unwrap(), p);
        assert!(label_table(&sys)
            .unwrap()
            .contains("# cv_1: 0=a 1=b 2=c 3=d 4=e"));
    }

    #[test]
    fn zero_search_finds_least_positive() {
        let sys = parse_par(ZERO).unwrap();
        let s = State::new(&sys.declarations).with_array("ia", &[0, 0, 3, 0, 1]);
        for rep in [run_par_direct(&sys, s.clone(), Limits::default()), {
            let p = translate_par(&sys).unwrap();
            explore_demonic(&p, s.extend_to(&p.declarations), Limits::default())
        }] {
            assert!(
                rep.outcomes.iter().all(Outcome::is_terminated),
                "{}",
                rep.to_text()
            );
            let mut ks: Vec<i64> = rep
                .terminated()
                .iter()
                .map(|t| t.i64("k").unwrap())
                .collect();
            ks.dedup();
            assert_eq!(ks, [3]);
        }
    }

    #[test]
    fn await_false_fails_both_ways() {
        let sys = parse_par("var x: int; [ await false || x := 1 ]").unwrap();
        let s = State::new(&sys.declarations);
        let direct = run_par_direct(&sys, s.clone(), Limits::default());
        assert!(matches!(
            direct.outcomes.as_slice(),
            [Outcome::Failed {
                reason: FailReason::Deadlock,
                ..
            }]
        ));
        let p = translate_par(&sys).unwrap();
        let tr = explore_demonic(&p, s.extend_to(&p.declarations), Limits::default());
        assert!(
            matches!(
                tr.outcomes.as_slice(),
                [Outcome::Failed {
                    reason: FailReason::AllGuardsFalse,
                    ..
                }]
            ),
            "{}",
            tr.to_text()
        );
    }

    #[test]
    fn control_variables_avoid_clashes() {
        let sys = parse_par("var cv_1: int; [ cv_1 := 1 ]").unwrap();
        assert_eq!(control_variables(&sys).unwrap(), ["cv'_1"]);
    }
}
