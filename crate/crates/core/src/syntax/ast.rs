//! Abstract syntax for guarded commands, the CSP fragment and the
//! shared-variable parallel fragment.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    Min,
    Max,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Min => "min",
            Builtin::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Int(BigInt),
    Bool(bool),
    Var(String),
    Index(String, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Builtin, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: impl Into<BigInt>) -> Expr {
        Expr::Int(v.into())
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn index(array: impl Into<String>, idx: Expr) -> Expr {
        Expr::Index(array.into(), Box::new(idx))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnaryOp::Not, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Builtin, a: Expr, b: Expr) -> Expr {
        Expr::Call(f, Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` for an empty list.
    pub fn conj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts
            .into_iter()
            .reduce(|acc, e| Expr::binary(BinOp::And, acc, e))
            .unwrap_or(Expr::Bool(true))
    }

    /// Left-nested disjunction; `false` for an empty list.
    pub fn disj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts
            .into_iter()
            .reduce(|acc, e| Expr::binary(BinOp::Or, acc, e))
            .unwrap_or(Expr::Bool(false))
    }

    /// Visits every scalar and array name read by the expression.
    pub fn for_each_name<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => f(v),
            Expr::Index(a, i) => {
                f(a);
                i.for_each_name(f);
            }
            Expr::Unary(_, e) => e.for_each_name(f),
            Expr::Binary(_, l, r) | Expr::Call(_, l, r) => {
                l.for_each_name(f);
                r.for_each_name(f);
            }
        }
    }

    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.for_each_name(&mut |n| {
            if !out.iter().any(|o: &String| o == n) {
                out.push(n.to_string());
            }
        });
        out
    }
}

/// Assignment target: a scalar or a single array cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    Var(String),
    Cell(String, Expr),
}

impl Target {
    pub fn name(&self) -> &str {
        match self {
            Target::Var(n) | Target::Cell(n, _) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuardedCommand {
    pub guard: Expr,
    pub body: Stmt,
}

impl GuardedCommand {
    pub fn new(guard: Expr, body: Stmt) -> Self {
        GuardedCommand { guard, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stmt {
    Skip,
    Abort,
    Fail,
    /// Simultaneous assignment `t1, .., tn := e1, .., en`.
    Assign(Vec<Target>, Vec<Expr>),
    /// `x := ?`, any natural number.
    Random(String),
    /// `x := choice(t)`, any integer in `1..=t`.
    Choice(String, Expr),
    Seq(Vec<Stmt>),
    If(Vec<GuardedCommand>),
    Do(Vec<GuardedCommand>),
}

impl Stmt {
    pub fn assign(name: impl Into<String>, e: Expr) -> Stmt {
        Stmt::Assign(vec![Target::Var(name.into())], vec![e])
    }

    /// Sequential composition, flattened; empty becomes `skip` and a
    /// singleton is unwrapped. Every AST built by this crate goes through
    /// here so that rendering and reparsing give back the same tree.
    pub fn seq(parts: impl IntoIterator<Item = Stmt>) -> Stmt {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Stmt::Seq(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Stmt::Skip,
            1 => flat.pop().unwrap(),
            _ => Stmt::Seq(flat),
        }
    }

    /// Statements of a sequential composition, or the statement itself.
    pub fn as_slice(&self) -> &[Stmt] {
        match self {
            Stmt::Seq(v) => v,
            other => std::slice::from_ref(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeclKind {
    Scalar(Type),
    /// Integer array with inclusive bounds.
    Array {
        lo: i64,
        hi: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Init {
    Int(BigInt),
    Bool(bool),
    /// Cell list for arrays, length equal to the array size.
    Cells(Vec<BigInt>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Declaration {
    pub name: String,
    pub kind: DeclKind,
    pub init: Option<Init>,
}

impl Declaration {
    pub fn int(name: impl Into<String>) -> Self {
        Declaration {
            name: name.into(),
            kind: DeclKind::Scalar(Type::Int),
            init: None,
        }
    }

    pub fn bool(name: impl Into<String>) -> Self {
        Declaration {
            name: name.into(),
            kind: DeclKind::Scalar(Type::Bool),
            init: None,
        }
    }

    pub fn array(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        Declaration {
            name: name.into(),
            kind: DeclKind::Array { lo, hi },
            init: None,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = Some(init);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GclProgram {
    pub declarations: Vec<Declaration>,
    pub body: Stmt,
}

impl GclProgram {
    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name == name)
    }
}

/// Input `P?x` or output `Q!t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IoCommand {
    Input { peer: String, target: String },
    Output { peer: String, expr: Expr },
}

impl IoCommand {
    pub fn peer(&self) -> &str {
        match self {
            IoCommand::Input { peer, .. } | IoCommand::Output { peer, .. } => peer,
        }
    }
}

/// Extended guard `B; α -> S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtGuard {
    pub guard: Expr,
    pub io: IoCommand,
    pub body: Stmt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Process {
    pub name: String,
    pub declarations: Vec<Declaration>,
    pub init: Stmt,
    pub loop_guards: Vec<ExtGuard>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CspSystem {
    pub processes: Vec<Process>,
}

impl CspSystem {
    pub fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    /// Declarations of all processes, in process order.
    pub fn declarations(&self) -> Vec<Declaration> {
        self.processes
            .iter()
            .flat_map(|p| p.declarations.iter().cloned())
            .collect()
    }
}

/// Statements of a parallel component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParStmt {
    Skip,
    Assign(Vec<Target>, Vec<Expr>),
    If(Expr, Vec<ParStmt>, Vec<ParStmt>),
    While(Expr, Vec<ParStmt>),
    Await(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParSystem {
    pub declarations: Vec<Declaration>,
    pub init: Stmt,
    pub components: Vec<Vec<ParStmt>>,
    pub epilogue: Stmt,
}
