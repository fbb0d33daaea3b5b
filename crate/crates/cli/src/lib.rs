//! Batch front end: run programs, apply transformations and compare
//! transition systems.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use gcl_core::engine::{
    explore_demonic, run_erratic, solve_angelic, ExplorationReport, Limits, Outcome,
};
use gcl_core::equiv::{self, Lts};
use gcl_core::fairness::{
    chaotic_iteration_program, parse_fixpoint, run_fair, transform_wf_program, Exclusivity,
    FairOptions, Policy,
};
use gcl_core::state::State;
use gcl_core::syntax::{
    parse_csp, parse_gcl, parse_par, render, render_csp, render_par, GclProgram,
};
use gcl_core::{csp, par};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_DIVERGENT: u8 = 2;
pub const EXIT_BOUND: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
/// Input parsed but violates a precondition (transformation or divergence).
pub const EXIT_PRECONDITION: u8 = 65;
pub const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "gcl",
    version,
    about = "Nondeterministic guarded commands workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute a .gcl, .csp, .par or .lfp file.
    Run(RunArgs),
    /// Translate a file into a guarded-commands program.
    Transform(TransformArgs),
    /// Compare labelled transition systems.
    Lts(LtsArgs),
    /// Print a file in canonical form.
    Fmt { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Erratic,
    Demonic,
    Angelic,
    FairWeak,
    FairStrong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "demonic")]
    mode: Mode,
    /// Required for erratic and fair modes.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = Limits::default().max_configs, value_parser = positive::<usize>)]
    max_configs: usize,
    #[arg(long, default_value_t = Limits::default().max_depth, value_parser = positive::<usize>)]
    max_depth: usize,
    /// Values enumerated for `x := ?` in exhaustive modes.
    #[arg(long, default_value_t = Limits::default().choice_bound, value_parser = positive::<u64>)]
    choice_bound: u64,
    /// Step budget for erratic and fair modes.
    #[arg(long, default_value_t = 100_000, value_parser = positive::<u64>)]
    fuel: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Override a declared variable, e.g. `x=3` or `a=[1,2]`.
    #[arg(long = "bind", value_name = "NAME=VALUE")]
    bindings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Wf,
    Csp,
    Par,
    Lfp,
}

#[derive(clap::Args, Debug)]
struct TransformArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Accept overlapping inner guards as mutually exclusive (wf only).
    #[arg(long)]
    trust_exclusive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Relation {
    Bisim,
    May,
    Must,
    Refines,
}

#[derive(clap::Args, Debug)]
struct LtsArgs {
    #[arg(value_enum)]
    relation: Relation,
    left: PathBuf,
    right: PathBuf,
    /// Trace length bound for refinement.
    #[arg(long, default_value_t = 8)]
    depth: usize,
}

fn positive<T: std::str::FromStr + PartialOrd + From<u8>>(s: &str) -> Result<T, String> {
    match s.parse::<T>() {
        Ok(v) if v >= T::from(1) => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

/// Error with its exit code; the message goes to standard error.
struct Fail(u8, String);

type CmdResult = Result<u8, Fail>;

fn usage(m: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, m.into())
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    out: &mut impl Write,
    err: &mut impl Write,
) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let res = match cli.command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Transform(a) => cmd_transform(&a, out),
        Command::Lts(a) => cmd_lts(&a, out),
        Command::Fmt { file } => cmd_fmt(&file, out),
    };
    match res {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "gcl: {msg}");
            code
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn located(path: &Path, e: impl std::fmt::Display) -> Fail {
    usage(format!("{}:{e}", path.display()))
}

fn bind_all(mut s: State, bindings: &[String]) -> Result<State, Fail> {
    for b in bindings {
        s.bind(b).map_err(usage)?;
    }
    Ok(s)
}

/// Exit status of a set of outcomes; divergence dominates failure, which
/// dominates limit cut-offs.
pub fn exit_code(outcomes: &[Outcome]) -> u8 {
    if outcomes.iter().any(Outcome::is_divergent) {
        EXIT_DIVERGENT
    } else if outcomes.iter().any(Outcome::is_failed) {
        EXIT_FAILED
    } else if outcomes
        .iter()
        .any(|o| matches!(o, Outcome::BoundExceeded(_)))
    {
        EXIT_BOUND
    } else {
        EXIT_OK
    }
}

enum Source {
    Gcl(GclProgram),
    Csp(gcl_core::syntax::CspSystem),
    Par(gcl_core::syntax::ParSystem),
}

fn load(path: &Path) -> Result<Source, Fail> {
    let text = read(path)?;
    match extension(path) {
        "gcl" => parse_gcl(&text)
            .map(Source::Gcl)
            .map_err(|e| located(path, e)),
        "csp" => parse_csp(&text)
            .map(Source::Csp)
            .map_err(|e| located(path, e)),
        "par" => parse_par(&text)
            .map(Source::Par)
            .map_err(|e| located(path, e)),
        "lfp" => {
            let inst = parse_fixpoint(&text).map_err(|e| located(path, e))?;
            inst.validate()
                .map_err(|e| Fail(EXIT_PRECONDITION, format!("{}: {e}", path.display())))?;
            chaotic_iteration_program(&inst)
                .map(Source::Gcl)
                .map_err(|e| Fail(EXIT_PRECONDITION, format!("{}: {e}", path.display())))
        }
        other => Err(usage(format!(
            "{}: unknown file type `.{other}` (expected .gcl, .csp, .par or .lfp)",
            path.display()
        ))),
    }
}

fn write_json(out: &mut impl Write, v: &serde_json::Value) -> Result<(), Fail> {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    writeln!(out, "{text}").map_err(|e| Fail(EXIT_IO, e.to_string()))
}

fn emit(out: &mut impl Write, text: &str) -> Result<(), Fail> {
    out.write_all(text.as_bytes())
        .map_err(|e| Fail(EXIT_IO, e.to_string()))
}

fn cmd_run(a: &RunArgs, out: &mut impl Write) -> CmdResult {
    let lim = Limits {
        max_configs: a.max_configs,
        max_depth: a.max_depth,
        choice_bound: a.choice_bound,
    };
    let src = load(&a.file)?;
    let seed = || {
        a.seed
            .ok_or_else(|| usage(format!("--mode {:?} needs --seed", a.mode).to_lowercase()))
    };
    let mode_name = a
        .mode
        .to_possible_value()
        .expect("not skipped")
        .get_name()
        .to_string();
    let report = |rep: ExplorationReport, out: &mut _| -> CmdResult {
        match a.format {
            Format::Text => emit(out, &rep.to_text())?,
            Format::Json => {
                let mut v = rep.to_json();
                v["mode"] = json!(mode_name);
                write_json(out, &v)?;
            }
        }
        Ok(exit_code(&rep.outcomes))
    };
    let single = |o: Outcome, out: &mut _| -> CmdResult {
        match a.format {
            Format::Text => emit(out, &format!("{o}\n"))?,
            Format::Json => write_json(
                out,
                &json!({"schema": 1, "mode": mode_name, "seed": a.seed, "outcomes": [o.to_json()]}),
            )?,
        }
        Ok(exit_code(std::slice::from_ref(&o)))
    };
    match (src, a.mode) {
        (Source::Gcl(p), mode) => {
            let s0 = bind_all(State::new(&p.declarations), &a.bindings)?;
            match mode {
                Mode::Demonic => report(explore_demonic(&p, s0, lim), out),
                Mode::Angelic => {
                    let found = solve_angelic(&p, s0, lim);
                    match a.format {
                        Format::Text => {
                            let mut text = format!("solutions: {}\n", found.len());
                            for s in &found {
                                text.push_str(&format!("terminated: {}\n", s.canonical()));
                            }
                            emit(out, &text)?;
                        }
                        Format::Json => write_json(
                            out,
                            &json!({
                                "schema": 1,
                                "mode": mode_name,
                                "solutions": found.iter().map(State::to_json).collect::<Vec<_>>(),
                            }),
                        )?,
                    }
                    Ok(if found.is_empty() {
                        EXIT_FAILED
                    } else {
                        EXIT_OK
                    })
                }
                Mode::Erratic => single(run_erratic(&p, s0, seed()?, a.fuel), out),
                Mode::FairWeak | Mode::FairStrong => {
                    let policy = if mode == Mode::FairWeak {
                        Policy::Weak
                    } else {
                        Policy::Strong
                    };
                    let o = run_fair(&p, s0, FairOptions::new(policy, seed()?).with_fuel(a.fuel))
                        .map_err(|e| {
                        Fail(EXIT_PRECONDITION, format!("{}: {e}", a.file.display()))
                    })?;
                    single(o, out)
                }
            }
        }
        (Source::Csp(sys), Mode::Demonic) => {
            let s0 = bind_all(State::new(&sys.declarations()), &a.bindings)?;
            report(csp::run_csp(&sys, s0, lim), out)
        }
        (Source::Par(sys), Mode::Demonic) => {
            let s0 = bind_all(State::new(&sys.declarations), &a.bindings)?;
            report(par::run_par_direct(&sys, s0, lim), out)
        }
        (_, mode) => Err(usage(format!(
            "{}: CSP and parallel systems run only in demonic mode, not {mode:?}",
            a.file.display()
        ))),
    }
}

fn cmd_transform(a: &TransformArgs, out: &mut impl Write) -> CmdResult {
    let expected = match a.kind {
        Kind::Wf => "gcl",
        Kind::Csp => "csp",
        Kind::Par => "par",
        Kind::Lfp => "lfp",
    };
    if extension(&a.file) != expected {
        return Err(usage(format!(
            "{}: --kind {expected} needs a .{expected} file",
            a.file.display()
        )));
    }
    let precondition =
        |e: &dyn std::fmt::Display| Fail(EXIT_PRECONDITION, format!("{}: {e}", a.file.display()));
    let text = match load(&a.file)? {
        Source::Gcl(p) if a.kind == Kind::Wf => {
            let mode = if a.trust_exclusive {
                Exclusivity::Trusted
            } else {
                Exclusivity::Syntactic
            };
            render(&transform_wf_program(&p, mode).map_err(|e| precondition(&e))?)
        }
        Source::Gcl(p) => render(&p),
        Source::Csp(sys) => render(&csp::translate_csp(&sys)),
        Source::Par(sys) => {
            let p = par::translate_par(&sys).map_err(|e| precondition(&e))?;
            format!(
                "{}{}",
                par::label_table(&sys).map_err(|e| precondition(&e))?,
                render(&p)
            )
        }
    };
    match &a.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Fail(EXIT_IO, format!("{}: {e}", path.display())))?
        }
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn load_lts(path: &Path) -> Result<Lts, Fail> {
    equiv::parse_lts(&read(path)?).map_err(|e| located(path, e))
}

fn cmd_lts(a: &LtsArgs, out: &mut impl Write) -> CmdResult {
    let (l, r) = (load_lts(&a.left)?, load_lts(&a.right)?);
    let divergence = |e: equiv::Divergence| Fail(EXIT_PRECONDITION, e.to_string());
    let verdict: Option<String> = match a.relation {
        Relation::Bisim => equiv::bisim_witness(&l, &r).map(|w| w.to_string()),
        Relation::May => {
            (!equiv::may_pass(&l, &r)).then(|| "no computation reaches success".to_string())
        }
        Relation::Must => equiv::must_failure(&l, &r).map(|f| f.to_string()),
        Relation::Refines => equiv::refinement_witness(&l, &r, a.depth)
            .map_err(divergence)?
            .map(|f| format!("failure {f} not allowed")),
    };
    match verdict {
        None => {
            emit(out, "true\n")?;
            Ok(EXIT_OK)
        }
        Some(w) => {
            emit(out, &format!("false: {w}\n"))?;
            Ok(EXIT_FAILED)
        }
    }
}

fn cmd_fmt(path: &Path, out: &mut impl Write) -> CmdResult {
    let text = read(path)?;
    let rendered = match extension(path) {
        "gcl" => render(&parse_gcl(&text).map_err(|e| located(path, e))?),
        "csp" => render_csp(&parse_csp(&text).map_err(|e| located(path, e))?),
        "par" => render_par(&parse_par(&text).map_err(|e| located(path, e))?),
        "lts" => equiv::render_lts(&load_lts(path)?),
        "lfp" => gcl_core::fairness::render_fixpoint(
            &parse_fixpoint(&text).map_err(|e| located(path, e))?,
        ),
        other => {
            return Err(usage(format!(
                "{}: unknown file type `.{other}`",
                path.display()
            )))
        }
    };
    emit(out, &rendered)?;
    Ok(EXIT_OK)
}
