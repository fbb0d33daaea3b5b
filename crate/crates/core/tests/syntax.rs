mod common;

use gcl_core::syntax::typeck::check_program;
use gcl_core::syntax::{
    parse_csp, parse_gcl, parse_par, render, render_csp, render_par, ParseError,
};
use proptest::prelude::*;

use common::corpus;

const FILES: &[&str] = &[
    "euclid.gcl",
    "feijen.gcl",
    "goon.gcl",
    "max.gcl",
    "maxpoint.gcl",
    "queens.gcl",
    "race.gcl",
    "sort4.gcl",
    "sfr.csp",
    "deadlock.csp",
    "zerosearch.par",
    "await_false.par",
];

const TOKENS: &[&str] = &[
    ";", "->", "[]", ":=", "do", "od", "if", "fi", "(", ")", "[", "]", "x", "1", "-", "?", "!",
    "||", "true", "not", ",", "..", "\n", " ",
];

#[derive(Debug, Clone)]
enum Edit {
    Delete(usize, usize),
    Insert(usize, usize),
    Swap(usize, usize),
}

fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        (any::<usize>(), 1..8usize).prop_map(|(a, n)| Edit::Delete(a, n)),
        (any::<usize>(), 0..TOKENS.len()).prop_map(|(a, k)| Edit::Insert(a, k)),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Edit::Swap(a, b)),
    ]
}

fn apply(text: &str, edits: &[Edit]) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for e in edits {
        let n = chars.len().max(1);
        match *e {
            Edit::Delete(a, k) => {
                let a = a % n;
                chars.drain(a..(a + k).min(chars.len()));
            }
            Edit::Insert(a, k) => {
                let a = a % (chars.len() + 1);
                chars.splice(a..a, TOKENS[k].chars());
            }
            Edit::Swap(a, b) => {
                let len = chars.len();
                if len > 0 {
                    chars.swap(a % len, b % len);
                }
            }
        }
    }
    chars.into_iter().collect()
}

fn check_position(text: &str, e: &ParseError) -> Result<(), String> {
    let lines = text.split('\n').count();
    if e.pos.line < 1 || e.pos.line > lines || e.pos.col < 1 {
        return Err(format!("position {} outside {lines} lines: {e}", e.pos));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mutated_sources_parse_or_report_a_position(
        file in 0..FILES.len(),
        edits in prop::collection::vec(edit(), 1..=3),
    ) {
        let name = FILES[file];
        let text = apply(&corpus(name), &edits);
        let r = if name.ends_with(".gcl") {
            parse_gcl(&text).map(|p| {
                check_program(&p).map_err(|e| format!("accepted ill-typed program: {e}"))?;
                let again = parse_gcl(&render(&p)).map_err(|e| e.to_string())?;
                if again != p { Err("render does not round-trip".to_string()) } else { Ok(()) }
            })
        } else if name.ends_with(".csp") {
            parse_csp(&text).map(|s| {
                let again = parse_csp(&render_csp(&s)).map_err(|e| e.to_string())?;
                if again != s { Err("render does not round-trip".to_string()) } else { Ok(()) }
            })
        } else {
            parse_par(&text).map(|s| {
                let again = parse_par(&render_par(&s)).map_err(|e| e.to_string())?;
                if again != s { Err("render does not round-trip".to_string()) } else { Ok(()) }
            })
        };
        let verdict = match r {
            Ok(inner) => inner,
            Err(e) => check_position(&text, &e),
        };
        prop_assert!(verdict.is_ok(), "{}\n---\n{}", verdict.unwrap_err(), text);
    }
}
