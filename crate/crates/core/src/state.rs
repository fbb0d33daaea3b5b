//! Values, program states and expression evaluation.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::syntax::{BinOp, Builtin, DeclKind, Declaration, Expr, Init, Target, Type, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
}

impl Value {
    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(v) => Some(v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Int(_) => None,
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v.into())
    }
}

impl From<BigInt> for Value {
    fn from(v: BigInt) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("index {index} out of bounds {lo}..{hi} of `{array}`")]
    OutOfBounds {
        array: String,
        index: BigInt,
        lo: i64,
        hi: i64,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("assignment targets alias `{0}`")]
    Aliasing(String),
    #[error("unknown variable `{0}`")]
    Unknown(String),
    #[error("type mismatch at `{0}`")]
    Type(String),
}

/// Variable names in lexicographic order with their kinds; shared by all
/// states of one program.
#[derive(Debug, PartialEq, Eq)]
pub struct Layout {
    names: Vec<String>,
    kinds: Vec<DeclKind>,
    index: HashMap<String, usize>,
}

impl Layout {
    pub fn new(decls: &[Declaration]) -> Arc<Layout> {
        let mut pairs: Vec<(String, DeclKind)> = decls
            .iter()
            .map(|d| (d.name.clone(), d.kind.clone()))
            .collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let index = pairs
            .iter()
            .enumerate()
            .map(|(k, (n, _))| (n.clone(), k))
            .collect();
        let (names, kinds) = pairs.into_iter().unzip();
        Arc::new(Layout {
            names,
            kinds,
            index,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn slot(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn kind(&self, slot: usize) -> &DeclKind {
        &self.kinds[slot]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Scalar(Value),
    Array(Vec<BigInt>),
}

/// Total assignment of values to the declared variables.
#[derive(Clone)]
pub struct State {
    layout: Arc<Layout>,
    slots: Vec<Slot>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.slots == other.slots
            && (Arc::ptr_eq(&self.layout, &other.layout) || self.layout.names == other.layout.names)
    }
}

impl Eq for State {}

impl Hash for State {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.slots.hash(h);
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.layout
            .names
            .cmp(&other.layout.names)
            .then_with(|| self.slots.cmp(&other.slots))
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State({})", self.canonical())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

fn fits_i64(v: &BigInt, lo: i64, hi: i64) -> Option<usize> {
    let i = v.to_i64()?;
    (lo..=hi).contains(&i).then(|| (i - lo) as usize)
}

impl State {
    /// Initial state: declared initializers, otherwise 0 / false.
    pub fn new(decls: &[Declaration]) -> State {
        let layout = Layout::new(decls);
        let mut slots: Vec<Slot> = layout
            .kinds
            .iter()
            .map(|k| match k {
                DeclKind::Scalar(Type::Int) => Slot::Scalar(Value::Int(BigInt::zero())),
                DeclKind::Scalar(Type::Bool) => Slot::Scalar(Value::Bool(false)),
                DeclKind::Array { lo, hi } => {
                    Slot::Array(vec![BigInt::zero(); (hi - lo + 1) as usize])
                }
            })
            .collect();
        for d in decls {
            let k = layout.index[&d.name];
            match &d.init {
                Some(Init::Int(v)) => slots[k] = Slot::Scalar(Value::Int(v.clone())),
                Some(Init::Bool(b)) => slots[k] = Slot::Scalar(Value::Bool(*b)),
                Some(Init::Cells(c)) => slots[k] = Slot::Array(c.clone()),
                None => {}
            }
        }
        State { layout, slots }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn names(&self) -> &[String] {
        &self.layout.names
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, k: usize) -> &Slot {
        &self.slots[k]
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        match &self.slots[self.layout.slot(name)?] {
            Slot::Scalar(v) => Some(v),
            Slot::Array(_) => None,
        }
    }

    pub fn int(&self, name: &str) -> Option<&BigInt> {
        self.get(name)?.as_int()
    }

    /// Integer scalar narrowed to `i64`, for tests and oracles.
    pub fn i64(&self, name: &str) -> Option<i64> {
        self.int(name)?.to_i64()
    }

    pub fn array(&self, name: &str) -> Option<&[BigInt]> {
        match &self.slots[self.layout.slot(name)?] {
            Slot::Array(c) => Some(c),
            Slot::Scalar(_) => None,
        }
    }

    pub fn array_i64(&self, name: &str) -> Option<Vec<i64>> {
        self.array(name)?.iter().map(|v| v.to_i64()).collect()
    }

    pub fn set(&mut self, name: &str, v: impl Into<Value>) -> Result<(), EvalError> {
        let k = self
            .layout
            .slot(name)
            .ok_or_else(|| EvalError::Unknown(name.into()))?;
        let v = v.into();
        let ok = matches!(
            (self.layout.kind(k), &v),
            (DeclKind::Scalar(Type::Int), Value::Int(_))
                | (DeclKind::Scalar(Type::Bool), Value::Bool(_))
        );
        if !ok {
            return Err(EvalError::Type(name.into()));
        }
        self.slots[k] = Slot::Scalar(v);
        Ok(())
    }

    pub fn set_array(&mut self, name: &str, cells: Vec<BigInt>) -> Result<(), EvalError> {
        let k = self
            .layout
            .slot(name)
            .ok_or_else(|| EvalError::Unknown(name.into()))?;
        match self.layout.kind(k) {
            DeclKind::Array { lo, hi } if cells.len() as i64 == hi - lo + 1 => {
                self.slots[k] = Slot::Array(cells);
                Ok(())
            }
            _ => Err(EvalError::Type(name.into())),
        }
    }

    pub fn with(mut self, name: &str, v: impl Into<Value>) -> State {
        self.set(name, v).expect("declared scalar of matching type");
        self
    }

    pub fn with_array(mut self, name: &str, cells: &[i64]) -> State {
        let cells = cells.iter().map(|&c| BigInt::from(c)).collect();
        self.set_array(name, cells)
            .expect("declared array of matching size");
        self
    }

    /// Applies a `name=value` binding; arrays take `name=[v1,v2,..]`.
    pub fn bind(&mut self, binding: &str) -> Result<(), String> {
        let (name, text) = binding
            .split_once('=')
            .ok_or_else(|| format!("binding `{binding}` is not of the form name=value"))?;
        let (name, text) = (name.trim(), text.trim());
        let k = self
            .layout
            .slot(name)
            .ok_or_else(|| format!("`{name}` is not a declared variable"))?;
        let int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| format!("`{t}` is not an integer"))
        };
        match self.layout.kind(k).clone() {
            DeclKind::Scalar(Type::Int) => self.slots[k] = Slot::Scalar(Value::Int(int(text)?)),
            DeclKind::Scalar(Type::Bool) => {
                let b = match text {
                    "true" => true,
                    "false" => false,
                    _ => return Err(format!("`{text}` is not a boolean")),
                };
                self.slots[k] = Slot::Scalar(Value::Bool(b));
            }
            DeclKind::Array { lo, hi } => {
                let inner = text
                    .strip_prefix('[')
                    .and_then(|t| t.strip_suffix(']'))
                    .ok_or_else(|| format!("array binding for `{name}` must be [v1,..]"))?;
                let cells = inner.split(',').map(int).collect::<Result<Vec<_>, _>>()?;
                if cells.len() as i64 != hi - lo + 1 {
                    return Err(format!(
                        "`{name}` has {} cells, binding gives {}",
                        hi - lo + 1,
                        cells.len()
                    ));
                }
                self.slots[k] = Slot::Array(cells);
            }
        }
        Ok(())
    }

    /// Canonical text form: `a=[1,2] b=true x=3`, names in lexicographic order.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, (name, slot)) in self.layout.names.iter().zip(&self.slots).enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push_str(name);
            out.push('=');
            match slot {
                Slot::Scalar(v) => out.push_str(&v.to_string()),
                Slot::Array(c) => {
                    out.push('[');
                    for (i, v) in c.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        out.push_str(&v.to_string());
                    }
                    out.push(']');
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let num = |v: &BigInt| match v.to_i64() {
            Some(i) => serde_json::Value::from(i),
            None => serde_json::Value::from(v.to_string()),
        };
        let map = self
            .layout
            .names
            .iter()
            .zip(&self.slots)
            .map(|(n, s)| {
                let v = match s {
                    Slot::Scalar(Value::Int(v)) => num(v),
                    Slot::Scalar(Value::Bool(b)) => serde_json::Value::from(*b),
                    Slot::Array(c) => serde_json::Value::Array(c.iter().map(num).collect()),
                };
                (n.clone(), v)
            })
            .collect();
        serde_json::Value::Object(map)
    }

    /// State over `keep` only (names not declared are ignored).
    pub fn restrict(&self, keep: &[&str]) -> State {
        self.project(|n| keep.contains(&n))
    }

    /// State without the `hidden` variables.
    pub fn hide(&self, hidden: &[&str]) -> State {
        self.project(|n| !hidden.contains(&n))
    }

    /// State over `decls` taking values from `self` where a variable of the
    /// same name and kind exists, and declared defaults elsewhere.
    pub fn extend_to(&self, decls: &[Declaration]) -> State {
        let mut out = State::new(decls);
        for k in 0..out.slots.len() {
            let name = &out.layout.names[k];
            if let Some(j) = self.layout.slot(name) {
                if self.layout.kinds[j] == out.layout.kinds[k] {
                    out.slots[k] = self.slots[j].clone();
                }
            }
        }
        out
    }

    fn project(&self, keep: impl Fn(&str) -> bool) -> State {
        let picked: Vec<usize> = (0..self.slots.len())
            .filter(|&k| keep(&self.layout.names[k]))
            .collect();
        let names: Vec<String> = picked
            .iter()
            .map(|&k| self.layout.names[k].clone())
            .collect();
        let kinds = picked
            .iter()
            .map(|&k| self.layout.kinds[k].clone())
            .collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(k, n)| (n.clone(), k))
            .collect();
        State {
            layout: Arc::new(Layout {
                names,
                kinds,
                index,
            }),
            slots: picked.iter().map(|&k| self.slots[k].clone()).collect(),
        }
    }

    /// Resolves a target to (slot, cell offset) without writing.
    fn locate(&self, t: &Target) -> Result<(usize, Option<usize>), EvalError> {
        let name = t.name();
        let k = self
            .layout
            .slot(name)
            .ok_or_else(|| EvalError::Unknown(name.into()))?;
        match (t, self.layout.kind(k)) {
            (Target::Var(_), DeclKind::Scalar(_)) => Ok((k, None)),
            (Target::Cell(_, i), DeclKind::Array { lo, hi }) => {
                let idx = eval_int(i, self)?;
                let off = fits_i64(&idx, *lo, *hi).ok_or(EvalError::OutOfBounds {
                    array: name.into(),
                    index: idx,
                    lo: *lo,
                    hi: *hi,
                })?;
                Ok((k, Some(off)))
            }
            _ => Err(EvalError::Type(name.into())),
        }
    }
}

pub fn eval_expr(e: &Expr, s: &State) -> Result<Value, EvalError> {
    Ok(match e {
        Expr::Int(v) => Value::Int(v.clone()),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Var(n) => s
            .get(n)
            .cloned()
            .ok_or_else(|| EvalError::Unknown(n.clone()))?,
        Expr::Index(a, i) => {
            let k = s
                .layout
                .slot(a)
                .ok_or_else(|| EvalError::Unknown(a.clone()))?;
            let (lo, hi) = match s.layout.kind(k) {
                DeclKind::Array { lo, hi } => (*lo, *hi),
                _ => return Err(EvalError::Type(a.clone())),
            };
            let idx = eval_int(i, s)?;
            let off = fits_i64(&idx, lo, hi).ok_or(EvalError::OutOfBounds {
                array: a.clone(),
                index: idx,
                lo,
                hi,
            })?;
            match &s.slots[k] {
                Slot::Array(c) => Value::Int(c[off].clone()),
                Slot::Scalar(_) => unreachable!("layout kind is array"),
            }
        }
        Expr::Unary(UnaryOp::Neg, x) => Value::Int(-eval_int(x, s)?),
        Expr::Unary(UnaryOp::Not, x) => Value::Bool(!eval_bool(x, s)?),
        Expr::Binary(BinOp::And, l, r) => Value::Bool(eval_bool(l, s)? && eval_bool(r, s)?),
        Expr::Binary(BinOp::Or, l, r) => Value::Bool(eval_bool(l, s)? || eval_bool(r, s)?),
        Expr::Binary(op @ (BinOp::Eq | BinOp::Ne), l, r) => {
            let eq = eval_expr(l, s)? == eval_expr(r, s)?;
            Value::Bool(if *op == BinOp::Eq { eq } else { !eq })
        }
        Expr::Binary(op, l, r) => {
            let a = eval_int(l, s)?;
            let b = eval_int(r, s)?;
            match op {
                BinOp::Add => Value::Int(a + b),
                BinOp::Sub => Value::Int(a - b),
                BinOp::Mul => Value::Int(a * b),
                BinOp::Div | BinOp::Mod if b.is_zero() => return Err(EvalError::DivisionByZero),
                BinOp::Div => Value::Int(a.div_floor(&b)),
                BinOp::Mod => Value::Int(a.mod_floor(&b)),
                BinOp::Lt => Value::Bool(a < b),
                BinOp::Le => Value::Bool(a <= b),
                BinOp::Gt => Value::Bool(a > b),
                BinOp::Ge => Value::Bool(a >= b),
                BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or => unreachable!(),
            }
        }
        Expr::Call(f, a, b) => {
            let a = eval_int(a, s)?;
            let b = eval_int(b, s)?;
            Value::Int(match f {
                Builtin::Min => a.min(b),
                Builtin::Max => a.max(b),
            })
        }
    })
}

pub fn eval_int(e: &Expr, s: &State) -> Result<BigInt, EvalError> {
    match eval_expr(e, s)? {
        Value::Int(v) => Ok(v),
        Value::Bool(_) => Err(EvalError::Type(crate::syntax::render_expr(e))),
    }
}

pub fn eval_bool(e: &Expr, s: &State) -> Result<bool, EvalError> {
    match eval_expr(e, s)? {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(EvalError::Type(crate::syntax::render_expr(e))),
    }
}

/// Simultaneous assignment of already computed values. Target indices are
/// evaluated in `s`; two targets resolving to one location is an error.
pub fn apply_parallel_assign(
    targets: &[Target],
    values: Vec<Value>,
    s: &State,
) -> Result<State, EvalError> {
    assert_eq!(targets.len(), values.len(), "one value per target");
    let locs = targets
        .iter()
        .map(|t| s.locate(t))
        .collect::<Result<Vec<_>, _>>()?;
    for (k, l) in locs.iter().enumerate() {
        if locs[..k].contains(l) {
            return Err(EvalError::Aliasing(targets[k].name().into()));
        }
    }
    let mut next = s.clone();
    for ((slot, off), v) in locs.into_iter().zip(values) {
        match (off, &mut next.slots[slot], v) {
            (None, Slot::Scalar(old), v) => {
                if std::mem::discriminant(old) != std::mem::discriminant(&v) {
                    return Err(EvalError::Type(s.layout.names[slot].clone()));
                }
                *old = v;
            }
            (Some(i), Slot::Array(c), Value::Int(v)) => c[i] = v,
            _ => return Err(EvalError::Type(s.layout.names[slot].clone())),
        }
    }
    Ok(next)
}

/// Evaluates every right-hand side in `s`, then assigns simultaneously.
pub fn exec_assign(targets: &[Target], exprs: &[Expr], s: &State) -> Result<State, EvalError> {
    let values = exprs
        .iter()
        .map(|e| eval_expr(e, s))
        .collect::<Result<Vec<_>, _>>()?;
    apply_parallel_assign(targets, values, s)
}
