//! Recognizing `S0; do B1 -> S1 [] .. [] Bn -> Sn od` with deterministic
//! `S0..Sn`.

use std::fmt;

use num_bigint::BigInt;

use crate::syntax::{
    render_expr, BinOp, Declaration, Expr, GclProgram, GuardedCommand, Stmt, UnaryOp,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneLevelProgram {
    pub declarations: Vec<Declaration>,
    pub init: Stmt,
    pub commands: Vec<GuardedCommand>,
}

impl OneLevelProgram {
    pub fn guards(&self) -> Vec<&Expr> {
        self.commands.iter().map(|c| &c.guard).collect()
    }

    pub fn to_program(&self) -> GclProgram {
        GclProgram {
            declarations: self.declarations.clone(),
            body: match &self.init {
                Stmt::Skip => Stmt::Do(self.commands.clone()),
                init => Stmt::seq([init.clone(), Stmt::Do(self.commands.clone())]),
            },
        }
    }
}

/// How mutual exclusion of inner guards is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exclusivity {
    /// Proved from the shape of the guards.
    #[default]
    Syntactic,
    /// Asserted by the caller; only the program shape and the absence of
    /// `?` and `choice` are checked.
    Trusted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotOneLevel {
    /// `initialization`, `command i`, or `program`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for NotOneLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "not one-level nondeterministic: {}: {}",
            self.location, self.message
        )
    }
}

impl std::error::Error for NotOneLevel {}

/// Splits off the final repetitive command without checking determinism.
pub fn split_one_level(p: &GclProgram) -> Result<OneLevelProgram, NotOneLevel> {
    let parts = p.body.as_slice();
    match parts.last() {
        Some(Stmt::Do(gcs)) => Ok(OneLevelProgram {
            declarations: p.declarations.clone(),
            init: Stmt::seq(parts[..parts.len() - 1].iter().cloned()),
            commands: gcs.clone(),
        }),
        _ => Err(NotOneLevel {
            location: "program".into(),
            message: "does not end in a repetitive command".into(),
        }),
    }
}

pub fn check_one_level(p: &GclProgram, mode: Exclusivity) -> Result<OneLevelProgram, NotOneLevel> {
    let ol = split_one_level(p)?;
    deterministic(&ol.init, mode).map_err(|message| NotOneLevel {
        location: "initialization".into(),
        message,
    })?;
    for (i, c) in ol.commands.iter().enumerate() {
        deterministic(&c.body, mode).map_err(|message| NotOneLevel {
            location: format!("command {}", i + 1),
            message,
        })?;
    }
    Ok(ol)
}

/// Verdict plus the reason when the answer is no.
pub fn is_one_level_nondeterministic(p: &GclProgram) -> (bool, Option<String>) {
    match check_one_level(p, Exclusivity::Syntactic) {
        Ok(_) => (true, None),
        Err(e) => (false, Some(e.to_string())),
    }
}

fn deterministic(s: &Stmt, mode: Exclusivity) -> Result<(), String> {
    match s {
        Stmt::Skip | Stmt::Abort | Stmt::Fail | Stmt::Assign(..) => Ok(()),
        Stmt::Random(x) => Err(format!("random assignment `{x} := ?`")),
        Stmt::Choice(x, _) => Err(format!("choice assignment to `{x}`")),
        Stmt::Seq(v) => v.iter().try_for_each(|s| deterministic(s, mode)),
        Stmt::If(gcs) | Stmt::Do(gcs) => {
            let what = if matches!(s, Stmt::If(_)) {
                "alternative"
            } else {
                "repetitive"
            };
            if mode == Exclusivity::Syntactic {
                for (i, a) in gcs.iter().enumerate() {
                    for (j, b) in gcs.iter().enumerate().skip(i + 1) {
                        if !exclusive(&a.guard, &b.guard) {
                            return Err(format!(
                                "{what} command has guards {} `{}` and {} `{}` that may hold together",
                                i + 1,
                                render_expr(&a.guard),
                                j + 1,
                                render_expr(&b.guard)
                            ));
                        }
                    }
                }
            }
            gcs.iter().try_for_each(|g| deterministic(&g.body, mode))
        }
    }
}

const LT: u8 = 1;
const EQ: u8 = 2;
const GT: u8 = 4;

fn relation(op: BinOp) -> Option<u8> {
    Some(match op {
        BinOp::Lt => LT,
        BinOp::Le => LT | EQ,
        BinOp::Eq => EQ,
        BinOp::Ne => LT | GT,
        BinOp::Gt => GT,
        BinOp::Ge => GT | EQ,
        _ => return None,
    })
}

fn flip(r: u8) -> u8 {
    (r & EQ) | if r & LT != 0 { GT } else { 0 } | if r & GT != 0 { LT } else { 0 }
}

fn holds(r: u8, a: &BigInt, b: &BigInt) -> bool {
    let bit = match a.cmp(b) {
        std::cmp::Ordering::Less => LT,
        std::cmp::Ordering::Equal => EQ,
        std::cmp::Ordering::Greater => GT,
    };
    r & bit != 0
}

/// `l r c` with the literal on the right when there is one.
fn comparison(e: &Expr) -> Option<(&Expr, u8, &Expr)> {
    match e {
        Expr::Binary(op, l, r) => {
            let rel = relation(*op)?;
            if matches!(**l, Expr::Int(_)) && !matches!(**r, Expr::Int(_)) {
                Some((r, flip(rel), l))
            } else {
                Some((l, rel, r))
            }
        }
        _ => None,
    }
}

/// Sound, incomplete test that two guards cannot both be true.
pub fn exclusive(a: &Expr, b: &Expr) -> bool {
    if *a == Expr::Bool(false) || *b == Expr::Bool(false) {
        return true;
    }
    if let Expr::Unary(UnaryOp::Not, x) = a {
        if **x == *b {
            return true;
        }
    }
    if let Expr::Unary(UnaryOp::Not, x) = b {
        if **x == *a {
            return true;
        }
    }
    for (x, y) in [(a, b), (b, a)] {
        match x {
            Expr::Binary(BinOp::And, l, r) if exclusive(l, y) || exclusive(r, y) => return true,
            Expr::Binary(BinOp::Or, l, r) if exclusive(l, y) && exclusive(r, y) => return true,
            _ => {}
        }
    }
    let (Some((l1, r1, x1)), Some((l2, r2, x2))) = (comparison(a), comparison(b)) else {
        return false;
    };
    if l1 == l2 && x1 == x2 {
        return r1 & r2 == 0;
    }
    if l1 == x2 && x1 == l2 {
        return r1 & flip(r2) == 0;
    }
    if let (true, Expr::Int(c1), Expr::Int(c2)) = (l1 == l2, x1, x2) {
        // both constrain one term against constants: test one point per region
        let probes = [c1 - 1, c1.clone(), c1 + 1, c2 - 1, c2.clone(), c2 + 1];
        return !probes.iter().any(|v| holds(r1, v, c1) && holds(r2, v, c2));
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_gcl;

    fn guards(src: &str) -> (Expr, Expr) {
        let p = parse_gcl(&format!("var x, y, z: int; var b: bool; if {src} fi")).unwrap();
        let Stmt::If(g) = p.body else { panic!() };
        (g[0].guard.clone(), g[1].guard.clone())
    }

    fn excl(src: &str) -> bool {
        let (a, b) = guards(src);
        exclusive(&a, &b)
    }

    #[test]
    fn exclusivity_prover() {
        assert!(excl("x > y -> skip [] x < y -> skip"));
        assert!(excl("x > y -> skip [] y >= x -> skip"));
        assert!(excl("x = 1 -> skip [] x = 2 -> skip"));
        assert!(excl("x < 0 -> skip [] 0 <= x -> skip"));
        assert!(excl("b -> skip [] not b -> skip"));
        assert!(excl("b and x > 0 -> skip [] x <= 0 -> skip"));
        assert!(excl("x < 0 or x > 5 -> skip [] x = 3 -> skip"));
        assert!(!excl("x >= y -> skip [] y >= x -> skip"));
        assert!(!excl("x > y -> skip [] y > z -> skip"));
        assert!(!excl("x != 1 -> skip [] x != 2 -> skip"));
        assert!(!excl("x < 3 -> skip [] x > 1 -> skip"));
    }

    #[test]
    fn goon_and_euclid_are_one_level() {
        let goon = parse_gcl(
            "var goon: bool; var x: int; goon := true; x := 1;
             do goon -> x := x + 1 [] goon -> goon := false od",
        )
        .unwrap();
        assert_eq!(is_one_level_nondeterministic(&goon), (true, None));
        let euclid =
            parse_gcl("var x, y: int; do x > y -> x := x - y [] x < y -> y := y - x od").unwrap();
        let ol = check_one_level(&euclid, Exclusivity::Syntactic).unwrap();
        assert_eq!(ol.init, Stmt::Skip);
        assert_eq!(ol.commands.len(), 2);
        assert_eq!(ol.to_program(), euclid);
    }

    #[test]
    fn overlapping_inner_guards_are_reported() {
        let p = parse_gcl(
            "var x, m: int; do x > 0 -> if x >= m -> m := x [] m >= x -> skip fi; x := x - 1 od",
        )
        .unwrap();
        let (ok, diag) = is_one_level_nondeterministic(&p);
        assert!(!ok);
        let diag = diag.unwrap();
        assert!(diag.contains("command 1"), "{diag}");
        assert!(diag.contains("x >= m"), "{diag}");
        assert!(check_one_level(&p, Exclusivity::Trusted).is_ok());
    }

    #[test]
    fn shape_and_random_assignment() {
        let p = parse_gcl("var x: int; x := 1").unwrap();
        assert!(split_one_level(&p).is_err());
        let p = parse_gcl("var x: int; x := ?; do x > 0 -> x := x - 1 od").unwrap();
        let err = check_one_level(&p, Exclusivity::Trusted).unwrap_err();
        assert_eq!(err.location, "initialization");
    }
}
