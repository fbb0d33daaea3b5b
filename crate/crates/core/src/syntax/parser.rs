//! Recursive descent parsers for `.gcl`, `.csp` and `.par` sources.
//!
//! Declarations precede statements, so identifiers and types are checked
//! while parsing and every diagnostic carries the position of the
//! offending token or expression.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::ast::*;
use super::error::{ParseError, ParseErrorKind, Pos};
use super::lexer::{tokenize, Tok, Token};
use super::typeck::{self, TypeEnv};

pub type ParseResult<T> = Result<T, ParseError>;

pub fn parse_gcl(src: &str) -> ParseResult<GclProgram> {
    let mut p = Parser::new(src)?;
    let declarations = p.declarations()?;
    let body = p.stmts()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(GclProgram { declarations, body })
}

pub fn parse_csp(src: &str) -> ParseResult<CspSystem> {
    let mut p = Parser::new(src)?;
    p.io_diagnostics = true;
    while p.peek() == &Tok::Const {
        p.constant()?;
    }
    let mut processes = Vec::new();
    let mut peers: Vec<(String, String, Pos)> = Vec::new();
    let mut owners: HashMap<String, String> = HashMap::new();
    loop {
        match p.peek() {
            Tok::Process => {}
            Tok::Eof if !processes.is_empty() => break,
            _ => return Err(p.unexpected("`process`")),
        }
        p.bump();
        let (name, name_pos) = p.ident()?;
        if processes.iter().any(|q: &Process| q.name == name) {
            return Err(ParseError::new(name_pos, ParseErrorKind::Duplicate(name)));
        }
        p.env = TypeEnv::new();
        let decl_start = p.pos();
        let declarations = p.declarations()?;
        for d in &declarations {
            if let Some(other) = owners.insert(d.name.clone(), name.clone()) {
                if other != name {
                    return Err(ParseError::new(
                        decl_start,
                        ParseErrorKind::SharedVariable(d.name.clone()),
                    ));
                }
            }
        }
        let mut init = Vec::new();
        if !p.at_process_loop() && p.peek() != &Tok::End {
            init.push(p.stmt()?);
            while p.eat(&Tok::Semi) {
                if p.at_process_loop() || p.peek() == &Tok::End {
                    break;
                }
                init.push(p.stmt()?);
            }
        }
        let mut loop_guards = Vec::new();
        if p.eat(&Tok::Do) {
            loop {
                let (g, peer, at) = p.ext_guard()?;
                peers.push((name.clone(), peer, at));
                loop_guards.push(g);
                if !p.eat(&Tok::Box) {
                    break;
                }
            }
            p.expect(Tok::Od, "`od` or `[]`")?;
        }
        p.expect(Tok::End, "`end`")?;
        processes.push(Process {
            name,
            declarations,
            init: Stmt::seq(init),
            loop_guards,
        });
    }
    for (owner, peer, at) in peers {
        if peer == owner || !processes.iter().any(|q| q.name == peer) {
            return Err(ParseError::new(at, ParseErrorKind::UnknownPeer(peer)));
        }
    }
    Ok(CspSystem { processes })
}

pub fn parse_par(src: &str) -> ParseResult<ParSystem> {
    let mut p = Parser::new(src)?;
    let declarations = p.declarations()?;
    let mut init = Vec::new();
    if p.peek() != &Tok::LBracket {
        init.push(p.stmt()?);
        while p.eat(&Tok::Semi) {
            if p.peek() == &Tok::LBracket {
                break;
            }
            init.push(p.stmt()?);
        }
    }
    p.expect(Tok::LBracket, "`[` opening the parallel composition")?;
    let mut components = vec![p.par_stmts()?];
    while p.eat(&Tok::Par) {
        components.push(p.par_stmts()?);
    }
    p.expect(Tok::RBracket, "`||` or `]`")?;
    let epilogue = if p.eat(&Tok::Semi) && p.peek() != &Tok::Eof {
        p.stmts()?
    } else {
        Stmt::Skip
    };
    p.expect(Tok::Eof, "end of input")?;
    Ok(ParSystem {
        declarations,
        init: Stmt::seq(init),
        components,
        epilogue,
    })
}

/// Parses a standalone expression over the given declarations.
pub fn parse_expr(src: &str, decls: &[Declaration]) -> ParseResult<Expr> {
    let mut p = Parser::new(src)?;
    p.env = TypeEnv::from_decls(decls);
    let e = p.typed_expr(None)?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    env: TypeEnv,
    consts: HashMap<String, BigInt>,
    io_diagnostics: bool,
}

impl Parser {
    fn new(src: &str) -> ParseResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
            env: TypeEnv::new(),
            consts: HashMap::new(),
            io_diagnostics: false,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.pos(),
            ParseErrorKind::Syntax {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
        )
    }

    fn expect(&mut self, t: Tok, expected: &str) -> ParseResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self) -> ParseResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                Ok((n, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn fresh_name(&self, name: &str, pos: Pos) -> ParseResult<()> {
        if self.env.contains(name) || self.consts.contains_key(name) {
            Err(ParseError::new(pos, ParseErrorKind::Duplicate(name.into())))
        } else {
            Ok(())
        }
    }

    fn signed_int(&mut self) -> ParseResult<BigInt> {
        let neg = self.eat(&Tok::Minus);
        let v = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                v
            }
            Tok::Ident(n) if self.consts.contains_key(&n) => {
                self.bump();
                self.consts[&n].clone()
            }
            _ => return Err(self.unexpected("an integer constant")),
        };
        Ok(if neg { -v } else { v })
    }

    fn small_int(&mut self) -> ParseResult<i64> {
        let pos = self.pos();
        let v = self.signed_int()?;
        i64::try_from(&v).map_err(|_| {
            ParseError::new(
                pos,
                ParseErrorKind::Declaration(format!("bound {v} out of range")),
            )
        })
    }

    // ---- declarations -------------------------------------------------

    fn declarations(&mut self) -> ParseResult<Vec<Declaration>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::Var => out.extend(self.var_decl()?),
                Tok::Const => self.constant()?,
                _ => return Ok(out),
            }
        }
    }

    fn constant(&mut self) -> ParseResult<()> {
        self.expect(Tok::Const, "`const`")?;
        let (name, pos) = self.ident()?;
        self.fresh_name(&name, pos)?;
        self.expect(Tok::Eq, "`=`")?;
        let v = self.signed_int()?;
        self.expect(Tok::Semi, "`;`")?;
        self.consts.insert(name, v);
        Ok(())
    }

    fn var_decl(&mut self) -> ParseResult<Vec<Declaration>> {
        self.expect(Tok::Var, "`var`")?;
        let mut names = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            names.push(self.ident()?);
        }
        self.expect(Tok::Colon, "`:`")?;
        let kind = match self.peek() {
            Tok::IntTy => {
                self.bump();
                DeclKind::Scalar(Type::Int)
            }
            Tok::BoolTy => {
                self.bump();
                DeclKind::Scalar(Type::Bool)
            }
            Tok::Array => {
                self.bump();
                self.expect(Tok::LBracket, "`[`")?;
                let pos = self.pos();
                let lo = self.small_int()?;
                self.expect(Tok::DotDot, "`..`")?;
                let hi = self.small_int()?;
                if lo > hi {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::Declaration(format!("empty array bounds {lo}..{hi}")),
                    ));
                }
                self.expect(Tok::RBracket, "`]`")?;
                self.expect(Tok::Of, "`of`")?;
                self.expect(Tok::IntTy, "`int`")?;
                DeclKind::Array { lo, hi }
            }
            _ => return Err(self.unexpected("a type")),
        };
        let init = if self.eat(&Tok::Eq) {
            let pos = self.pos();
            Some(self.initializer(&kind, pos)?)
        } else {
            None
        };
        self.expect(Tok::Semi, "`;`")?;
        let mut out = Vec::new();
        for (name, pos) in names {
            self.fresh_name(&name, pos)?;
            self.env.insert(&name, kind.clone());
            out.push(Declaration {
                name,
                kind: kind.clone(),
                init: init.clone(),
            });
        }
        Ok(out)
    }

    fn initializer(&mut self, kind: &DeclKind, pos: Pos) -> ParseResult<Init> {
        let bad = |msg: &str| ParseError::new(pos, ParseErrorKind::Declaration(msg.to_string()));
        match kind {
            DeclKind::Scalar(Type::Bool) => match self.bump() {
                Tok::True => Ok(Init::Bool(true)),
                Tok::False => Ok(Init::Bool(false)),
                _ => Err(bad("boolean initializer expected")),
            },
            DeclKind::Scalar(Type::Int) => Ok(Init::Int(self.signed_int()?)),
            DeclKind::Array { lo, hi } => {
                let len = (hi - lo + 1) as usize;
                if self.eat(&Tok::LBracket) {
                    let mut cells = vec![self.signed_int()?];
                    while self.eat(&Tok::Comma) {
                        cells.push(self.signed_int()?);
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    if cells.len() != len {
                        return Err(bad(&format!(
                            "array initializer has {} cells, bounds need {len}",
                            cells.len()
                        )));
                    }
                    Ok(Init::Cells(cells))
                } else {
                    let v = self.signed_int()?;
                    Ok(Init::Cells(vec![v; len]))
                }
            }
        }
    }

    // ---- statements ---------------------------------------------------

    fn starts_stmt(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Skip | Tok::Abort | Tok::Fail | Tok::If | Tok::Do | Tok::Ident(_)
        )
    }

    fn stmts(&mut self) -> ParseResult<Stmt> {
        let mut out = vec![self.stmt()?];
        while self.eat(&Tok::Semi) {
            if !self.starts_stmt() {
                break;
            }
            out.push(self.stmt()?);
        }
        Ok(Stmt::seq(out))
    }

    fn stmt(&mut self) -> ParseResult<Stmt> {
        match self.peek() {
            Tok::Skip => {
                self.bump();
                Ok(Stmt::Skip)
            }
            Tok::Abort => {
                self.bump();
                Ok(Stmt::Abort)
            }
            Tok::Fail => {
                self.bump();
                Ok(Stmt::Fail)
            }
            Tok::If => {
                self.bump();
                let gcs = self.guarded_commands()?;
                self.expect(Tok::Fi, "`fi` or `[]`")?;
                Ok(Stmt::If(gcs))
            }
            Tok::Do => {
                self.bump();
                let gcs = self.guarded_commands()?;
                self.expect(Tok::Od, "`od` or `[]`")?;
                Ok(Stmt::Do(gcs))
            }
            Tok::Ident(_) => {
                if self.io_diagnostics && matches!(self.peek_at(1), Tok::Question | Tok::Bang) {
                    return Err(ParseError::new(self.pos(), ParseErrorKind::IoOutsideGuard));
                }
                self.assignment()
            }
            _ => Err(self.unexpected("a statement")),
        }
    }

    fn guarded_commands(&mut self) -> ParseResult<Vec<GuardedCommand>> {
        let mut out = Vec::new();
        loop {
            let guard = self.typed_expr(Some(Type::Bool))?;
            self.expect(Tok::Arrow, "`->`")?;
            let body = self.stmts()?;
            out.push(GuardedCommand { guard, body });
            if !self.eat(&Tok::Box) {
                return Ok(out);
            }
        }
    }

    fn target(&mut self) -> ParseResult<Target> {
        let (name, pos) = self.ident()?;
        let t = if self.eat(&Tok::LBracket) {
            let idx = self.typed_expr(Some(Type::Int))?;
            self.expect(Tok::RBracket, "`]`")?;
            Target::Cell(name, idx)
        } else {
            Target::Var(name)
        };
        match (&t, self.env.get(t.name())) {
            (_, None) => Err(ParseError::new(
                pos,
                ParseErrorKind::Undeclared(t.name().into()),
            )),
            (Target::Var(n), Some(DeclKind::Array { .. })) => Err(ParseError::new(
                pos,
                ParseErrorKind::Type(format!("cannot assign to array `{n}` as a whole")),
            )),
            (Target::Cell(n, _), Some(DeclKind::Scalar(_))) => Err(ParseError::new(
                pos,
                ParseErrorKind::Type(format!("`{n}` is not an array")),
            )),
            _ => Ok(t),
        }
    }

    fn assignment(&mut self) -> ParseResult<Stmt> {
        let start = self.pos();
        let mut targets = vec![self.target()?];
        while self.eat(&Tok::Comma) {
            targets.push(self.target()?);
        }
        self.expect(Tok::Assign, "`:=`")?;
        if targets.len() == 1 {
            if let Target::Var(x) = &targets[0] {
                if self.peek() == &Tok::Question || self.peek() == &Tok::Choice {
                    typeck::check_int_scalar(x, &self.env)
                        .map_err(|m| ParseError::new(start, ParseErrorKind::Type(m)))?;
                    if self.eat(&Tok::Question) {
                        return Ok(Stmt::Random(x.clone()));
                    }
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let bound = self.typed_expr(Some(Type::Int))?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Stmt::Choice(x.clone(), bound));
                }
            }
        }
        let mut exprs = vec![self.typed_expr(None)?];
        while self.eat(&Tok::Comma) {
            exprs.push(self.typed_expr(None)?);
        }
        if let Err(n) = typeck::check_distinct_targets(&targets) {
            return Err(ParseError::new(start, ParseErrorKind::DuplicateTarget(n)));
        }
        typeck::check_assign(&targets, &exprs, &self.env)
            .map_err(|m| ParseError::new(start, ParseErrorKind::Type(m)))?;
        Ok(Stmt::Assign(targets, exprs))
    }

    // ---- CSP ----------------------------------------------------------

    /// `do` opening a process loop: the first guard is followed by `;`.
    fn at_process_loop(&mut self) -> bool {
        if self.peek() != &Tok::Do {
            return false;
        }
        let saved = self.at;
        self.bump();
        let ok = self.expr().is_ok() && self.peek() == &Tok::Semi;
        self.at = saved;
        ok
    }

    fn ext_guard(&mut self) -> ParseResult<(ExtGuard, String, Pos)> {
        let guard = self.typed_expr(Some(Type::Bool))?;
        if self.peek() == &Tok::Arrow {
            return Err(self.unexpected("`;` and an i/o command"));
        }
        self.expect(Tok::Semi, "`;`")?;
        let io_pos = self.pos();
        let (peer, _) = self.ident()?;
        let io = match self.peek() {
            Tok::Question => {
                self.bump();
                let (target, pos) = self.ident()?;
                match self.env.get(&target) {
                    Some(DeclKind::Scalar(_)) => {}
                    Some(_) => {
                        return Err(ParseError::new(
                            pos,
                            ParseErrorKind::Type(format!(
                                "input target `{target}` must be a scalar"
                            )),
                        ))
                    }
                    None => return Err(ParseError::new(pos, ParseErrorKind::Undeclared(target))),
                }
                IoCommand::Input {
                    peer: peer.clone(),
                    target,
                }
            }
            Tok::Bang => {
                self.bump();
                IoCommand::Output {
                    peer: peer.clone(),
                    expr: self.typed_expr(None)?,
                }
            }
            _ => return Err(self.unexpected("`?` or `!`")),
        };
        self.expect(Tok::Arrow, "`->`")?;
        let body = self.stmts()?;
        Ok((ExtGuard { guard, io, body }, peer, io_pos))
    }

    // ---- parallel fragment ----------------------------------------------

    fn par_stmts(&mut self) -> ParseResult<Vec<ParStmt>> {
        let mut out = vec![self.par_stmt()?];
        while self.eat(&Tok::Semi) {
            out.push(self.par_stmt()?);
        }
        Ok(out)
    }

    fn par_stmt(&mut self) -> ParseResult<ParStmt> {
        const EXPECTED: &str =
            "a statement of the parallel fragment (skip, assignment, if, while, await)";
        match self.peek() {
            Tok::Skip => {
                self.bump();
                Ok(ParStmt::Skip)
            }
            Tok::Await => {
                self.bump();
                Ok(ParStmt::Await(self.typed_expr(Some(Type::Bool))?))
            }
            Tok::If => {
                self.bump();
                let cond = self.typed_expr(Some(Type::Bool))?;
                self.expect(Tok::Then, "`then`")?;
                let then = self.par_stmts()?;
                let els = if self.eat(&Tok::Else) {
                    self.par_stmts()?
                } else {
                    Vec::new()
                };
                self.expect(Tok::Fi, "`fi` or `else`")?;
                Ok(ParStmt::If(cond, then, els))
            }
            Tok::While => {
                self.bump();
                let cond = self.typed_expr(Some(Type::Bool))?;
                self.expect(Tok::Do, "`do`")?;
                let body = self.par_stmts()?;
                self.expect(Tok::Od, "`od`")?;
                Ok(ParStmt::While(cond, body))
            }
            Tok::Ident(_) => match self.assignment()? {
                Stmt::Assign(ts, es) => Ok(ParStmt::Assign(ts, es)),
                _ => Err(ParseError::new(
                    self.pos(),
                    ParseErrorKind::Syntax {
                        expected: EXPECTED.into(),
                        found: "a nondeterministic assignment".into(),
                    },
                )),
            },
            _ => Err(self.unexpected(EXPECTED)),
        }
    }

    // ---- expressions ----------------------------------------------------

    fn typed_expr(&mut self, want: Option<Type>) -> ParseResult<Expr> {
        let pos = self.pos();
        let e = self.expr()?;
        let ty = typeck::expr_type(&e, &self.env)
            .map_err(|m| ParseError::new(pos, ParseErrorKind::Type(m)))?;
        if let Some(w) = want {
            if ty != w {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::Type(format!("expected {w} expression, found {ty}")),
                ));
            }
        }
        Ok(e)
    }

    fn expr(&mut self) -> ParseResult<Expr> {
        let mut l = self.and_expr()?;
        while self.eat(&Tok::Or) {
            let r = self.and_expr()?;
            l = Expr::binary(BinOp::Or, l, r);
        }
        Ok(l)
    }

    fn and_expr(&mut self) -> ParseResult<Expr> {
        let mut l = self.not_expr()?;
        while self.eat(&Tok::And) {
            let r = self.not_expr()?;
            l = Expr::binary(BinOp::And, l, r);
        }
        Ok(l)
    }

    fn not_expr(&mut self) -> ParseResult<Expr> {
        if self.eat(&Tok::Not) {
            Ok(Expr::not(self.not_expr()?))
        } else {
            self.cmp_expr()
        }
    }

    fn cmp_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> ParseResult<Expr> {
        let l = self.add_expr()?;
        match self.cmp_op() {
            Some(op) => {
                self.bump();
                let r = self.add_expr()?;
                if self.cmp_op().is_some() {
                    return Err(self.unexpected(
                        "an operator other than a comparison (comparisons do not chain)",
                    ));
                }
                Ok(Expr::binary(op, l, r))
            }
            None => Ok(l),
        }
    }

    fn add_expr(&mut self) -> ParseResult<Expr> {
        let mut l = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.mul_expr()?;
            l = Expr::binary(op, l, r);
        }
    }

    fn mul_expr(&mut self) -> ParseResult<Expr> {
        let mut l = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Div => BinOp::Div,
                Tok::Mod => BinOp::Mod,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.unary()?;
            l = Expr::binary(op, l, r);
        }
    }

    fn unary(&mut self) -> ParseResult<Expr> {
        if self.eat(&Tok::Minus) {
            // `-` directly on a literal is a negative literal
            if let Tok::Int(v) = self.peek().clone() {
                self.bump();
                return Ok(Expr::Int(-v));
            }
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> ParseResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                // `min` and `max` are builtins only when applied
                if (name == "min" || name == "max") && self.peek() == &Tok::LParen {
                    let f = if name == "min" {
                        Builtin::Min
                    } else {
                        Builtin::Max
                    };
                    self.bump();
                    let a = self.expr()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::call(f, a, b));
                }
                if let Some(v) = self.consts.get(&name) {
                    return Ok(Expr::Int(v.clone()));
                }
                match self.env.get(&name) {
                    None => Err(ParseError::new(pos, ParseErrorKind::Undeclared(name))),
                    Some(DeclKind::Array { .. }) => {
                        self.expect(Tok::LBracket, "`[` after array name")?;
                        let idx = self.expr()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok(Expr::index(name, idx))
                    }
                    Some(DeclKind::Scalar(_)) => Ok(Expr::Var(name)),
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
