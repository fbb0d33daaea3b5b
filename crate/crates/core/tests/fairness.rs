mod common;

use std::collections::BTreeSet;

use gcl_core::engine::{explore_demonic, Limits, Outcome};
use gcl_core::fairness::{
    kleene_lfp, parse_fixpoint, render_fixpoint, run_fair, transform_wf_program,
    weak_fair_outcomes, Exclusivity, FairOptions, FixpointInstance, Policy,
};
use gcl_core::state::State;
use gcl_core::syntax::{parse_gcl, GclProgram};
use proptest::prelude::*;

use common::{corpus, oracles};

const COMMANDS: &[&str] = &[
    "x < {a} -> x := x + 1",
    "y < {a} -> y := y + 1",
    "x + y < {a} -> x := x + 1",
    "x < {a} and y < {b} -> y := y + 1",
    "x < {a} -> x, y := x + 1, y + 1",
];

fn program(cmds: &[(usize, i64, i64)]) -> GclProgram {
    let body: Vec<String> = cmds
        .iter()
        .map(|&(k, a, b)| {
            COMMANDS[k]
                .replace("{a}", &a.to_string())
                .replace("{b}", &b.to_string())
        })
        .collect();
    parse_gcl(&format!("var x, y: int;\ndo {}\nod", body.join("\n[] "))).unwrap()
}

fn command() -> impl Strategy<Value = (usize, i64, i64)> {
    (0..COMMANDS.len(), 1..=3i64, 1..=3i64)
}

fn canonical(states: &[State]) -> BTreeSet<String> {
    states.iter().map(State::canonical).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transform_matches_fair_scheduler(cmds in prop::collection::vec(command(), 1..=3), r in 1u64..=3) {
        let p = program(&cmds);
        let s0 = State::new(&p.declarations);
        let t = transform_wf_program(&p, Exclusivity::Syntactic).unwrap();
        let rep = explore_demonic(&t, s0.extend_to(&t.declarations), Limits::default().with_choice_bound(r));
        prop_assert!(rep.is_complete() && !rep.has_failure() && !rep.has_divergence());
        let got: BTreeSet<String> = rep.terminated().iter().map(|s| s.restrict(&["x", "y"]).canonical()).collect();
        let want = canonical(&weak_fair_outcomes(&p, s0.clone(), r, Limits::default()).unwrap());
        prop_assert_eq!(&got, &want);
        prop_assert_eq!(t.declarations.len(), p.declarations.len() + cmds.len());
        let all: BTreeSet<String> = explore_demonic(&p, s0.clone(), Limits::default())
            .terminated()
            .iter()
            .map(|s| s.canonical())
            .collect();
        prop_assert!(got.is_subset(&all));
        for seed in 0..10 {
            let o = run_fair(&p, s0.clone(), FairOptions::new(Policy::Weak, seed).with_reset_bound(r)).unwrap();
            let Outcome::Terminated(f) = o else { panic!("seed {seed}: {o}") };
            prop_assert!(want.contains(&f.canonical()));
        }
    }

    #[test]
    fn generous_priorities_allow_every_terminating_run(cmds in prop::collection::vec(command(), 1..=3)) {
        let p = program(&cmds);
        let s0 = State::new(&p.declarations);
        let all: BTreeSet<String> = explore_demonic(&p, s0.clone(), Limits::default())
            .terminated()
            .iter()
            .map(|s| s.canonical())
            .collect();
        let fair = canonical(&weak_fair_outcomes(&p, s0.clone(), 8, Limits::default()).unwrap());
        prop_assert_eq!(&fair, &all);
        for seed in 0..10 {
            let o = run_fair(&p, s0.clone(), FairOptions::new(Policy::Strong, seed)).unwrap();
            let Outcome::Terminated(f) = o else { panic!("seed {seed}: {o}") };
            prop_assert!(all.contains(&f.canonical()));
        }
    }

    #[test]
    fn fixpoint_tables_round_trip(n in 1usize..=3, h in 0u32..=3, salt in any::<u64>()) {
        let inst = FixpointInstance::from_fn(n, h, |x| {
            x.iter().enumerate().map(|(i, v)| ((*v as u64 + salt.rotate_left(i as u32 * 7)) % (h as u64 + 1)) as u32).collect()
        });
        prop_assert_eq!(parse_fixpoint(&render_fixpoint(&inst)).unwrap(), inst);
    }
}

#[test]
fn strong_fairness_ends_goon() {
    let p = parse_gcl(&corpus("goon.gcl")).unwrap();
    for seed in 0..200 {
        let o = run_fair(
            &p,
            State::new(&p.declarations),
            FairOptions::new(Policy::Strong, seed),
        )
        .unwrap();
        assert!(o.is_terminated(), "seed {seed}: {o}");
    }
}

#[test]
fn corpus_fixpoints_agree_with_kleene() {
    for name in ["lfp_mutual.lfp", "lfp_table.lfp"] {
        let inst = parse_fixpoint(&corpus(name)).unwrap();
        let f = |x: &[u32]| inst.apply(x).unwrap();
        assert_eq!(
            kleene_lfp(&inst).unwrap(),
            oracles::kleene(&f, inst.n),
            "{name}"
        );
    }
}

#[test]
fn generated_fixpoint_programs_are_current() {
    for (lfp, gcl) in [
        ("lfp_mutual.lfp", "lfp_mutual.gcl"),
        ("lfp_table.lfp", "lfp_table.gcl"),
    ] {
        let inst = parse_fixpoint(&corpus(lfp)).unwrap();
        let p = gcl_core::fairness::chaotic_iteration_program(&inst).unwrap();
        assert_eq!(parse_gcl(&corpus(gcl)).unwrap(), p, "{gcl}");
    }
}
