//! Pretty-printer. Output reparses to the same AST.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

// Binding strength, loosest first.
const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const CMP: u8 = 4;
const ADD: u8 = 5;
const MUL: u8 = 6;
const UNARY: u8 = 7;
const ATOM: u8 = 8;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Int(v) if v.sign() == num_bigint::Sign::Minus => UNARY,
        Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) | Expr::Index(..) | Expr::Call(..) => ATOM,
        Expr::Unary(UnaryOp::Neg, _) => UNARY,
        Expr::Unary(UnaryOp::Not, _) => NOT,
        Expr::Binary(op, ..) => match op {
            BinOp::Or => OR,
            BinOp::And => AND,
            BinOp::Add | BinOp::Sub => ADD,
            BinOp::Mul | BinOp::Div | BinOp::Mod => MUL,
            _ => CMP,
        },
    }
}

pub fn render_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr_into(&mut out, e, 0);
    out
}

fn expr_into(out: &mut String, e: &Expr, min: u8) {
    let lv = level(e);
    let paren = lv < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Int(v) => write!(out, "{v}").unwrap(),
        Expr::Bool(b) => write!(out, "{b}").unwrap(),
        Expr::Var(n) => out.push_str(n),
        Expr::Index(a, i) => {
            out.push_str(a);
            out.push('[');
            expr_into(out, i, 0);
            out.push(']');
        }
        Expr::Unary(UnaryOp::Neg, x) => {
            out.push('-');
            // `-5` would read back as a literal, so keep the negation visible
            let min = if matches!(**x, Expr::Int(_)) {
                ATOM + 1
            } else {
                UNARY
            };
            expr_into(out, x, min);
        }
        Expr::Unary(UnaryOp::Not, x) => {
            out.push_str("not ");
            expr_into(out, x, NOT);
        }
        Expr::Binary(op, l, r) => {
            let (lmin, rmin) = match lv {
                CMP => (ADD, ADD),
                _ => (lv, lv + 1),
            };
            expr_into(out, l, lmin);
            write!(out, " {} ", op.symbol()).unwrap();
            expr_into(out, r, rmin);
        }
        Expr::Call(f, a, b) => {
            write!(out, "{}(", f.name()).unwrap();
            expr_into(out, a, 0);
            out.push_str(", ");
            expr_into(out, b, 0);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

fn render_target(t: &Target) -> String {
    match t {
        Target::Var(n) => n.clone(),
        Target::Cell(a, i) => format!("{a}[{}]", render_expr(i)),
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn render_assign(ts: &[Target], es: &[Expr]) -> String {
    format!("{} := {}", join(ts, render_target), join(es, render_expr))
}

pub fn render_declaration(d: &Declaration) -> String {
    let ty = match &d.kind {
        DeclKind::Scalar(t) => t.to_string(),
        DeclKind::Array { lo, hi } => format!("array[{lo}..{hi}] of int"),
    };
    let init = match &d.init {
        None => String::new(),
        Some(Init::Int(v)) => format!(" = {v}"),
        Some(Init::Bool(b)) => format!(" = {b}"),
        Some(Init::Cells(c)) => format!(" = [{}]", join(c, |v| v.to_string())),
    };
    format!("var {}: {ty}{init};", d.name)
}

fn decls_into(out: &mut String, decls: &[Declaration], depth: usize) {
    for d in decls {
        writeln!(out, "{}{}", INDENT.repeat(depth), render_declaration(d)).unwrap();
    }
}

/// Writes `s` as lines at `depth`; the last line has no newline.
fn stmt_into(out: &mut String, s: &Stmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match s {
        Stmt::Skip => write!(out, "{pad}skip").unwrap(),
        Stmt::Abort => write!(out, "{pad}abort").unwrap(),
        Stmt::Fail => write!(out, "{pad}fail").unwrap(),
        Stmt::Assign(ts, es) => write!(out, "{pad}{}", render_assign(ts, es)).unwrap(),
        Stmt::Random(x) => write!(out, "{pad}{x} := ?").unwrap(),
        Stmt::Choice(x, t) => write!(out, "{pad}{x} := choice({})", render_expr(t)).unwrap(),
        Stmt::Seq(parts) => {
            for (k, p) in parts.iter().enumerate() {
                if k > 0 {
                    out.push_str(";\n");
                }
                stmt_into(out, p, depth);
            }
        }
        Stmt::If(gcs) => guarded_into(out, "if", "fi", gcs, depth),
        Stmt::Do(gcs) => guarded_into(out, "do", "od", gcs, depth),
    }
}

fn guarded_into(out: &mut String, open: &str, close: &str, gcs: &[GuardedCommand], depth: usize) {
    let pad = INDENT.repeat(depth);
    for (k, gc) in gcs.iter().enumerate() {
        let lead = if k == 0 { open } else { "[]" };
        writeln!(out, "{pad}{lead} {} ->", render_expr(&gc.guard)).unwrap();
        stmt_into(out, &gc.body, depth + 2);
        out.push('\n');
    }
    write!(out, "{pad}{close}").unwrap();
}

pub fn render_stmt(s: &Stmt) -> String {
    let mut out = String::new();
    stmt_into(&mut out, s, 0);
    out
}

pub fn render(p: &GclProgram) -> String {
    let mut out = String::new();
    decls_into(&mut out, &p.declarations, 0);
    stmt_into(&mut out, &p.body, 0);
    out.push('\n');
    out
}

fn io_text(io: &IoCommand) -> String {
    match io {
        IoCommand::Input { peer, target } => format!("{peer}?{target}"),
        IoCommand::Output { peer, expr } => format!("{peer}!{}", render_expr(expr)),
    }
}

pub fn render_csp(sys: &CspSystem) -> String {
    let mut out = String::new();
    for (k, p) in sys.processes.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        writeln!(out, "process {}", p.name).unwrap();
        decls_into(&mut out, &p.declarations, 1);
        let has_init = p.init != Stmt::Skip;
        if has_init {
            stmt_into(&mut out, &p.init, 1);
            out.push_str(if p.loop_guards.is_empty() {
                "\n"
            } else {
                ";\n"
            });
        }
        if !p.loop_guards.is_empty() {
            for (j, g) in p.loop_guards.iter().enumerate() {
                let lead = if j == 0 { "do" } else { "[]" };
                writeln!(
                    out,
                    "{INDENT}{lead} {}; {} ->",
                    render_expr(&g.guard),
                    io_text(&g.io)
                )
                .unwrap();
                stmt_into(&mut out, &g.body, 3);
                out.push('\n');
            }
            writeln!(out, "{INDENT}od").unwrap();
        }
        out.push_str("end\n");
    }
    out
}

fn par_stmts_into(out: &mut String, stmts: &[ParStmt], depth: usize) {
    for (k, s) in stmts.iter().enumerate() {
        if k > 0 {
            out.push_str(";\n");
        }
        par_stmt_into(out, s, depth);
    }
}

fn par_stmt_into(out: &mut String, s: &ParStmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match s {
        ParStmt::Skip => write!(out, "{pad}skip").unwrap(),
        ParStmt::Assign(ts, es) => write!(out, "{pad}{}", render_assign(ts, es)).unwrap(),
        ParStmt::Await(b) => write!(out, "{pad}await {}", render_expr(b)).unwrap(),
        ParStmt::If(b, then, els) => {
            writeln!(out, "{pad}if {} then", render_expr(b)).unwrap();
            par_stmts_into(out, then, depth + 1);
            if !els.is_empty() {
                write!(out, "\n{pad}else\n").unwrap();
                par_stmts_into(out, els, depth + 1);
            }
            write!(out, "\n{pad}fi").unwrap();
        }
        ParStmt::While(b, body) => {
            writeln!(out, "{pad}while {} do", render_expr(b)).unwrap();
            par_stmts_into(out, body, depth + 1);
            write!(out, "\n{pad}od").unwrap();
        }
    }
}

pub fn render_par(sys: &ParSystem) -> String {
    let mut out = String::new();
    decls_into(&mut out, &sys.declarations, 0);
    if sys.init != Stmt::Skip {
        stmt_into(&mut out, &sys.init, 0);
        out.push_str(";\n");
    }
    out.push_str("[\n");
    for (k, c) in sys.components.iter().enumerate() {
        if k > 0 {
            out.push_str("\n||\n");
        }
        par_stmts_into(&mut out, c, 1);
    }
    out.push_str("\n]");
    if sys.epilogue != Stmt::Skip {
        out.push_str(";\n");
        stmt_into(&mut out, &sys.epilogue, 0);
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_csp, parse_gcl, parse_par};
    use super::*;

    fn round_trip(src: &str) {
        let p = parse_gcl(src).unwrap();
        let text = render(&p);
        let q = parse_gcl(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(p, q, "{text}");
    }

    #[test]
    fn euclid_round_trip() {
        round_trip("var x, y: int; do x>y -> x:=x-y [] x<y -> y:=y-x od");
    }

    #[test]
    fn guard_order_is_kept() {
        let p = parse_gcl("var x: int; if x < 1 -> x := 1 [] true -> skip [] x > 1 -> x := 2 fi")
            .unwrap();
        let text = render(&p);
        let a = text.find("x < 1").unwrap();
        let b = text.find("true").unwrap();
        let c = text.find("x > 1").unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn parenthesization() {
        round_trip("var x, y: int; var b: bool; x := (x - y) - (x - (y - 1)) * (2 div (x mod 3))");
        round_trip("var x: int; var b: bool; b := not (b or x = 1) and (b = (x < 2))");
        round_trip("var x: int; x := -(5) + -x - -3 * -(x + 1)");
        round_trip("var x: int; var b: bool; b := not not b; x := min(max(x, -1), 3 - x)");
        assert_eq!(
            render_expr(&Expr::Unary(UnaryOp::Neg, Box::new(Expr::int(5)))),
            "-(5)"
        );
    }

    #[test]
    fn nested_commands() {
        round_trip(
            "var a: array[0..2] of int = [1, 2, 3]; var i: int; var b: bool = true;
             do i < 3 -> if a[i] > 1 -> a[i], i := a[i] - 1, i + 1 [] a[i] <= 1 -> i := i + 1; skip fi od;
             i := ?; i := choice(3); abort; fail",
        );
    }

    #[test]
    fn csp_round_trip() {
        let src = "process P var x: int; x := 1; do x > 0; Q!x -> x := x - 1 od end
                   process Q var y: int; do true; P?y -> skip [] y < 0; P?y -> skip od end
                   process R var z: int; z := 2 end";
        let sys = parse_csp(src).unwrap();
        let text = render_csp(&sys);
        assert_eq!(
            parse_csp(&text).unwrap_or_else(|e| panic!("{e}\n{text}")),
            sys
        );
    }

    #[test]
    fn par_round_trip() {
        let src = "var x, y: int; x := 1;
                   [ while x < 3 do if y = 0 then x := x + 1 else skip fi od || await x > 2; y := 1 ];
                   x := y";
        let sys = parse_par(src).unwrap();
        let text = render_par(&sys);
        assert_eq!(
            parse_par(&text).unwrap_or_else(|e| panic!("{e}\n{text}")),
            sys
        );
    }
}
