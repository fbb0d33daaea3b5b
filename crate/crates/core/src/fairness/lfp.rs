//! Least fixed points of monotone maps on finite chains `(0..=h)^n`, by
//! Kleene iteration and as an asynchronous guarded-commands program.

use std::fmt;

use num_traits::ToPrimitive;

use crate::state::{eval_int, State};
use crate::syntax::{
    parse_expr, BinOp, Declaration, Expr, GclProgram, GuardedCommand, Init, Stmt, Target,
};

/// Largest table the program generator will embed.
const MAX_TABLE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixpointFn {
    /// `table[index(x)] = F(x)`, points in lexicographic order.
    Table(Vec<Vec<u32>>),
    /// Component functions over the variables `x1..xn`.
    Exprs(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointInstance {
    pub n: usize,
    pub h: u32,
    pub f: FixpointFn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LfpError {
    Format { line: usize, message: String },
    OutOfRange { point: Vec<u32>, value: String },
    NotMonotone { lower: Vec<u32>, upper: Vec<u32> },
    TooLarge(usize),
}

impl fmt::Display for LfpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LfpError::Format { line, message } => write!(f, "line {line}: {message}"),
            LfpError::OutOfRange { point, value } => {
                write!(f, "F{point:?} = {value} leaves the lattice")
            }
            LfpError::NotMonotone { lower, upper } => write!(
                f,
                "F is not monotone: {lower:?} <= {upper:?} but F{lower:?} is not below F{upper:?}"
            ),
            LfpError::TooLarge(n) => write!(f, "table with {n} entries is too large to embed"),
        }
    }
}

impl std::error::Error for LfpError {}

impl FixpointInstance {
    pub fn from_fn(n: usize, h: u32, f: impl Fn(&[u32]) -> Vec<u32>) -> Self {
        let mut inst = FixpointInstance {
            n,
            h,
            f: FixpointFn::Table(Vec::new()),
        };
        let table = inst.points().map(|x| f(&x)).collect();
        inst.f = FixpointFn::Table(table);
        inst
    }

    pub fn size(&self) -> usize {
        (self.h as usize + 1).pow(self.n as u32)
    }

    pub fn var_names(&self) -> Vec<String> {
        (1..=self.n).map(|i| format!("x{i}")).collect()
    }

    pub fn declarations(&self) -> Vec<Declaration> {
        self.var_names().into_iter().map(Declaration::int).collect()
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.size()).map(|k| self.point(k))
    }

    pub fn point(&self, mut k: usize) -> Vec<u32> {
        let base = self.h as usize + 1;
        let mut x = vec![0; self.n];
        for slot in x.iter_mut().rev() {
            *slot = (k % base) as u32;
            k /= base;
        }
        x
    }

    pub fn index(&self, x: &[u32]) -> usize {
        let base = self.h as usize + 1;
        x.iter().fold(0, |acc, &v| acc * base + v as usize)
    }

    pub fn apply(&self, x: &[u32]) -> Result<Vec<u32>, LfpError> {
        match &self.f {
            FixpointFn::Table(t) => Ok(t[self.index(x)].clone()),
            FixpointFn::Exprs(es) => {
                let mut s = State::new(&self.declarations());
                for (name, v) in self.var_names().iter().zip(x) {
                    s.set(name, i64::from(*v)).expect("declared");
                }
                es.iter()
                    .map(|e| {
                        let v = eval_int(e, &s).map_err(|err| LfpError::OutOfRange {
                            point: x.to_vec(),
                            value: err.to_string(),
                        })?;
                        v.to_u32()
                            .filter(|&v| v <= self.h)
                            .ok_or(LfpError::OutOfRange {
                                point: x.to_vec(),
                                value: v.to_string(),
                            })
                    })
                    .collect()
            }
        }
    }

    /// Range and monotonicity; unit steps suffice by transitivity.
    pub fn validate(&self) -> Result<(), LfpError> {
        for x in self.points() {
            let fx = self.apply(&x)?;
            if fx.len() != self.n || fx.iter().any(|&v| v > self.h) {
                return Err(LfpError::OutOfRange {
                    point: x,
                    value: format!("{fx:?}"),
                });
            }
            for k in 0..self.n {
                if x[k] < self.h {
                    let mut y = x.clone();
                    y[k] += 1;
                    let fy = self.apply(&y)?;
                    if fx.iter().zip(&fy).any(|(a, b)| a > b) {
                        return Err(LfpError::NotMonotone { lower: x, upper: y });
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn parse_fixpoint(text: &str) -> Result<FixpointInstance, LfpError> {
    let err = |line: usize, m: &str| LfpError::Format {
        line,
        message: m.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing `lfp n h` header"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let (n, h) = match words.as_slice() {
        ["lfp", n, h] => (
            n.parse::<usize>().map_err(|_| err(hl, "bad dimension"))?,
            h.parse::<u32>().map_err(|_| err(hl, "bad height"))?,
        ),
        _ => return Err(err(hl, "expected `lfp n h`")),
    };
    if n == 0 {
        return Err(err(hl, "dimension must be positive"));
    }
    let mut inst = FixpointInstance {
        n,
        h,
        f: FixpointFn::Table(Vec::new()),
    };
    let mut table: Vec<Option<Vec<u32>>> = vec![None; inst.size()];
    let mut exprs: Vec<Option<Expr>> = vec![None; n];
    let decls = inst.declarations();
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix('F') {
            let (idx, e) = rest
                .split_once('=')
                .ok_or_else(|| err(ln, "expected `F<i> = expression`"))?;
            let i: usize = idx
                .trim()
                .parse()
                .map_err(|_| err(ln, "bad component index"))?;
            if i == 0 || i > n {
                return Err(err(ln, "component index out of range"));
            }
            let e = parse_expr(e, &decls).map_err(|e| err(ln, &e.to_string()))?;
            exprs[i - 1] = Some(e);
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| err(ln, "expected `x1 .. xn -> y1 .. yn`"))?;
        let nums = |s: &str| -> Result<Vec<u32>, LfpError> {
            let v = s
                .split_whitespace()
                .map(|w| w.parse::<u32>().map_err(|_| err(ln, "bad number")))
                .collect::<Result<Vec<_>, _>>()?;
            if v.len() != n || v.iter().any(|&c| c > h) {
                return Err(err(ln, "tuple outside the lattice"));
            }
            Ok(v)
        };
        let (x, y) = (nums(lhs)?, nums(rhs)?);
        let k = inst.index(&x);
        if table[k].replace(y).is_some() {
            return Err(err(ln, "duplicate table entry"));
        }
    }
    let any_expr = exprs.iter().any(Option::is_some);
    let any_table = table.iter().any(Option::is_some);
    inst.f = match (any_expr, any_table) {
        (true, false) => FixpointFn::Exprs(
            exprs
                .into_iter()
                .enumerate()
                .map(|(i, e)| e.ok_or_else(|| err(hl, &format!("missing F{}", i + 1))))
                .collect::<Result<_, _>>()?,
        ),
        (false, true) => FixpointFn::Table(
            table
                .into_iter()
                .enumerate()
                .map(|(k, y)| {
                    y.ok_or_else(|| err(hl, &format!("no entry for {:?}", inst.point(k))))
                })
                .collect::<Result<_, _>>()?,
        ),
        (true, true) => return Err(err(hl, "mix of table entries and expressions")),
        (false, false) => return Err(err(hl, "no table entries or expressions")),
    };
    Ok(inst)
}

pub fn render_fixpoint(inst: &FixpointInstance) -> String {
    let mut out = format!("lfp {} {}\n", inst.n, inst.h);
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    match &inst.f {
        FixpointFn::Table(t) => {
            for (k, y) in t.iter().enumerate() {
                out.push_str(&format!("{} -> {}\n", join(&inst.point(k)), join(y)));
            }
        }
        FixpointFn::Exprs(es) => {
            for (i, e) in es.iter().enumerate() {
                out.push_str(&format!("F{} = {}\n", i + 1, crate::syntax::render_expr(e)));
            }
        }
    }
    out
}

/// `mu F` by iterating from the bottom element.
pub fn kleene_lfp(inst: &FixpointInstance) -> Result<Vec<u32>, LfpError> {
    inst.validate()?;
    let mut x = vec![0; inst.n];
    loop {
        let y = inst.apply(&x)?;
        if y == x {
            return Ok(x);
        }
        x = y;
    }
}

/// `x1, .., xn := 0, .., 0; do [] x != F(x) -> x_i := F_i(x) od`.
/// Tables are embedded as constant arrays `F1..Fn` indexed by the
/// position of `x` in lexicographic order.
pub fn chaotic_iteration_program(inst: &FixpointInstance) -> Result<GclProgram, LfpError> {
    let names = inst.var_names();
    let mut declarations = inst.declarations();
    let components: Vec<Expr> = match &inst.f {
        FixpointFn::Exprs(es) => es.clone(),
        FixpointFn::Table(t) => {
            if t.len() > MAX_TABLE {
                return Err(LfpError::TooLarge(t.len()));
            }
            let base = Expr::int(inst.h + 1);
            let index = names.iter().skip(1).fold(Expr::var(&names[0]), |acc, x| {
                Expr::binary(
                    BinOp::Add,
                    Expr::binary(BinOp::Mul, acc, base.clone()),
                    Expr::var(x),
                )
            });
            (0..inst.n)
                .map(|i| {
                    let table = format!("F{}", i + 1);
                    let cells = t.iter().map(|y| y[i].into()).collect();
                    declarations.push(
                        Declaration::array(&table, 0, t.len() as i64 - 1)
                            .with_init(Init::Cells(cells)),
                    );
                    Expr::index(table, index.clone())
                })
                .collect()
        }
    };
    let moving = Expr::disj(
        names
            .iter()
            .zip(&components)
            .map(|(x, f)| Expr::binary(BinOp::Ne, Expr::var(x), f.clone())),
    );
    let commands = names
        .iter()
        .zip(&components)
        .map(|(x, f)| GuardedCommand::new(moving.clone(), Stmt::assign(x, f.clone())))
        .collect();
    let reset = Stmt::Assign(
        names.iter().map(|x| Target::Var(x.clone())).collect(),
        vec![Expr::int(0); inst.n],
    );
    Ok(GclProgram {
        declarations,
        body: Stmt::seq([reset, Stmt::Do(commands)]),
    })
}
