//! Weak-fairness instrumentation with priority variables.

use std::fmt;

use super::onelevel::{check_one_level, Exclusivity, NotOneLevel, OneLevelProgram};
use crate::syntax::{
    fresh_family, BinOp, Builtin, Declaration, Expr, GclProgram, GuardedCommand, Stmt,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WfError {
    NotOneLevel(NotOneLevel),
    NoFreshNames,
}

impl fmt::Display for WfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfError::NotOneLevel(e) => e.fmt(f),
            WfError::NoFreshNames => f.write_str("no fresh priority variable names available"),
        }
    }
}

impl std::error::Error for WfError {}

/// Instruments the loop of `p` with priorities `z_1..z_n`:
///
/// ```text
/// S0; z_1 := ?; ..; z_n := ?;
/// do [] B_i and <z_i minimal> -> z_i := ?;
///        (for j != i: if B_j -> z_j := z_j - 1 [] not B_j -> z_j := ? fi);
///        S_i
/// od
/// ```
///
/// When all guards are the same expression, `z_i minimal` is
/// `z_i = min(z_1, .., z_n)`. Otherwise the minimum is taken over enabled
/// commands only, written `(not B_k or z_i <= z_k)` for each `k != i`, so a
/// disabled command holding the least priority cannot end the loop early.
pub fn transform_wf(p: &OneLevelProgram) -> Result<GclProgram, WfError> {
    let n = p.commands.len();
    let z = fresh_family("z", n, &p.declarations).ok_or(WfError::NoFreshNames)?;
    let zv = |k: usize| Expr::var(&z[k]);
    let guards: Vec<&Expr> = p.guards();
    let uniform = guards.iter().all(|g| *g == guards[0]);

    let minimal = |i: usize| -> Expr {
        if n == 1 {
            return Expr::binary(BinOp::Eq, zv(0), zv(0));
        }
        if uniform {
            let min = (1..n).fold(zv(0), |acc, k| Expr::call(Builtin::Min, acc, zv(k)));
            return Expr::binary(BinOp::Eq, zv(i), min);
        }
        Expr::conj((0..n).filter(|&k| k != i).map(|k| {
            Expr::binary(
                BinOp::Or,
                Expr::not(guards[k].clone()),
                Expr::binary(BinOp::Le, zv(i), zv(k)),
            )
        }))
    };

    let commands = (0..n)
        .map(|i| {
            let guard = Expr::binary(BinOp::And, guards[i].clone(), minimal(i));
            let mut body = vec![Stmt::Random(z[i].clone())];
            for j in (0..n).filter(|&j| j != i) {
                body.push(Stmt::If(vec![
                    GuardedCommand::new(
                        guards[j].clone(),
                        Stmt::assign(&z[j], Expr::binary(BinOp::Sub, zv(j), Expr::int(1))),
                    ),
                    GuardedCommand::new(Expr::not(guards[j].clone()), Stmt::Random(z[j].clone())),
                ]));
            }
            body.push(p.commands[i].body.clone());
            GuardedCommand::new(guard, Stmt::seq(body))
        })
        .collect();

    let mut declarations = p.declarations.clone();
    declarations.extend(z.iter().map(Declaration::int));
    let mut init = vec![p.init.clone()];
    init.extend(z.iter().map(|n| Stmt::Random(n.clone())));
    init.push(Stmt::Do(commands));
    Ok(GclProgram {
        declarations,
        body: Stmt::seq(init),
    })
}

/// Checks the precondition, then transforms.
pub fn transform_wf_program(p: &GclProgram, mode: Exclusivity) -> Result<GclProgram, WfError> {
    let ol = check_one_level(p, mode).map_err(WfError::NotOneLevel)?;
    transform_wf(&ol)
}

/// Names of the priority variables `transform_wf` adds to `p`.
pub fn priority_names(p: &GclProgram) -> Vec<String> {
    let n = match p.body.as_slice().last() {
        Some(Stmt::Do(g)) => g.len(),
        _ => 0,
    };
    fresh_family("z", n, &p.declarations).unwrap_or_default()
}
