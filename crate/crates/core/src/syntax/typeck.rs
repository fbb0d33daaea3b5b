//! Type rules shared by the parsers and by programmatically built ASTs.

use std::collections::HashMap;

use super::ast::*;

/// Name to declaration-kind map used for checking.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    vars: HashMap<String, DeclKind>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_decls<'a>(decls: impl IntoIterator<Item = &'a Declaration>) -> Self {
        let mut env = TypeEnv::new();
        for d in decls {
            env.insert(&d.name, d.kind.clone());
        }
        env
    }

    pub fn insert(&mut self, name: &str, kind: DeclKind) -> Option<DeclKind> {
        self.vars.insert(name.to_string(), kind)
    }

    pub fn get(&self, name: &str) -> Option<&DeclKind> {
        self.vars.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.contains_key(name)
    }
}

pub fn expr_type(e: &Expr, env: &TypeEnv) -> Result<Type, String> {
    match e {
        Expr::Int(_) => Ok(Type::Int),
        Expr::Bool(_) => Ok(Type::Bool),
        Expr::Var(n) => match env.get(n) {
            Some(DeclKind::Scalar(t)) => Ok(*t),
            Some(DeclKind::Array { .. }) => Err(format!("array `{n}` used without an index")),
            None => Err(format!("undeclared identifier `{n}`")),
        },
        Expr::Index(a, i) => {
            match env.get(a) {
                Some(DeclKind::Array { .. }) => {}
                Some(DeclKind::Scalar(_)) => return Err(format!("`{a}` is not an array")),
                None => return Err(format!("undeclared identifier `{a}`")),
            }
            expect(i, Type::Int, env, "array index")?;
            Ok(Type::Int)
        }
        Expr::Unary(UnaryOp::Neg, x) => {
            expect(x, Type::Int, env, "operand of `-`")?;
            Ok(Type::Int)
        }
        Expr::Unary(UnaryOp::Not, x) => {
            expect(x, Type::Bool, env, "operand of `not`")?;
            Ok(Type::Bool)
        }
        Expr::Binary(op, l, r) => {
            let what = format!("operand of `{}`", op.symbol());
            if op.is_arithmetic() {
                expect(l, Type::Int, env, &what)?;
                expect(r, Type::Int, env, &what)?;
                Ok(Type::Int)
            } else if matches!(op, BinOp::Eq | BinOp::Ne) {
                let lt = expr_type(l, env)?;
                let rt = expr_type(r, env)?;
                if lt != rt {
                    return Err(format!("cannot compare {lt} with {rt}"));
                }
                Ok(Type::Bool)
            } else if op.is_comparison() {
                expect(l, Type::Int, env, &what)?;
                expect(r, Type::Int, env, &what)?;
                Ok(Type::Bool)
            } else {
                expect(l, Type::Bool, env, &what)?;
                expect(r, Type::Bool, env, &what)?;
                Ok(Type::Bool)
            }
        }
        Expr::Call(f, a, b) => {
            let what = format!("argument of `{}`", f.name());
            expect(a, Type::Int, env, &what)?;
            expect(b, Type::Int, env, &what)?;
            Ok(Type::Int)
        }
    }
}

fn expect(e: &Expr, want: Type, env: &TypeEnv, what: &str) -> Result<(), String> {
    let got = expr_type(e, env)?;
    if got == want {
        Ok(())
    } else {
        Err(format!("{what} must be {want}, found {got}"))
    }
}

pub fn target_type(t: &Target, env: &TypeEnv) -> Result<Type, String> {
    match t {
        Target::Var(n) => match env.get(n) {
            Some(DeclKind::Scalar(ty)) => Ok(*ty),
            Some(DeclKind::Array { .. }) => Err(format!("cannot assign to array `{n}` as a whole")),
            None => Err(format!("undeclared identifier `{n}`")),
        },
        Target::Cell(a, i) => expr_type(&Expr::Index(a.clone(), Box::new(i.clone())), env),
    }
}

/// Syntactic distinctness of simultaneous-assignment targets.
pub fn check_distinct_targets(targets: &[Target]) -> Result<(), String> {
    for (k, t) in targets.iter().enumerate() {
        for u in &targets[..k] {
            let clash = match (t, u) {
                (Target::Var(a), Target::Var(b)) => a == b,
                (Target::Cell(a, i), Target::Cell(b, j)) => a == b && i == j,
                _ => false,
            };
            if clash {
                return Err(t.name().to_string());
            }
        }
    }
    Ok(())
}

pub fn check_assign(targets: &[Target], exprs: &[Expr], env: &TypeEnv) -> Result<(), String> {
    if targets.is_empty() || targets.len() != exprs.len() {
        return Err(format!(
            "assignment has {} targets but {} expressions",
            targets.len(),
            exprs.len()
        ));
    }
    check_distinct_targets(targets).map_err(|n| format!("duplicate assignment target `{n}`"))?;
    for (t, e) in targets.iter().zip(exprs) {
        let tt = target_type(t, env)?;
        let et = expr_type(e, env)?;
        if tt != et {
            return Err(format!("cannot assign {et} to `{}` of type {tt}", t.name()));
        }
    }
    Ok(())
}

pub fn check_int_scalar(name: &str, env: &TypeEnv) -> Result<(), String> {
    match env.get(name) {
        Some(DeclKind::Scalar(Type::Int)) => Ok(()),
        Some(_) => Err(format!("`{name}` must be an integer scalar")),
        None => Err(format!("undeclared identifier `{name}`")),
    }
}

pub fn check_stmt(s: &Stmt, env: &TypeEnv) -> Result<(), String> {
    match s {
        Stmt::Skip | Stmt::Abort | Stmt::Fail => Ok(()),
        Stmt::Assign(ts, es) => check_assign(ts, es, env),
        Stmt::Random(x) => check_int_scalar(x, env),
        Stmt::Choice(x, t) => {
            check_int_scalar(x, env)?;
            expect(t, Type::Int, env, "choice bound")
        }
        Stmt::Seq(v) => v.iter().try_for_each(|s| check_stmt(s, env)),
        Stmt::If(gcs) | Stmt::Do(gcs) => {
            if gcs.is_empty() {
                return Err("empty guarded command list".into());
            }
            for gc in gcs {
                expect(&gc.guard, Type::Bool, env, "guard")?;
                check_stmt(&gc.body, env)?;
            }
            Ok(())
        }
    }
}

pub fn check_declarations(decls: &[Declaration]) -> Result<(), String> {
    for (k, d) in decls.iter().enumerate() {
        if decls[..k].iter().any(|e| e.name == d.name) {
            return Err(format!("duplicate declaration of `{}`", d.name));
        }
        match (&d.kind, &d.init) {
            (DeclKind::Array { lo, hi }, init) => {
                if lo > hi {
                    return Err(format!("array `{}` has empty bounds {lo}..{hi}", d.name));
                }
                match init {
                    None => {}
                    Some(Init::Cells(c)) if c.len() as i64 == hi - lo + 1 => {}
                    Some(_) => {
                        return Err(format!(
                            "initializer of `{}` does not fit its bounds",
                            d.name
                        ))
                    }
                }
            }
            (DeclKind::Scalar(Type::Int), None | Some(Init::Int(_))) => {}
            (DeclKind::Scalar(Type::Bool), None | Some(Init::Bool(_))) => {}
            _ => return Err(format!("initializer of `{}` has the wrong type", d.name)),
        }
    }
    Ok(())
}

/// Full check of a program built outside the parser.
pub fn check_program(p: &GclProgram) -> Result<(), String> {
    check_declarations(&p.declarations)?;
    check_stmt(&p.body, &TypeEnv::from_decls(&p.declarations))
}
