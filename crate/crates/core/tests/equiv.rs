mod common;

use std::collections::{BTreeMap, BTreeSet};

use gcl_core::equiv::{
    bisim_witness, bisimilar, failures, may_pass, must_pass, parse_lts, refinement_witness,
    refines, render_lts, Lts, TAU,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::corpus;
use common::lts_gen::{failure_signature, must_distinguishable, must_preorder, random_lts};

fn lts(seed: u64, n: usize) -> Lts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(0.08..0.3);
    random_lts(&mut rng, n, p)
}

/// Same system with states renamed by a rotation.
fn rotated(l: &Lts, k: usize) -> Lts {
    let n = l.states.len();
    let f = |s: usize| (s + k) % n;
    let mut r = Lts::with_size(n, &["a", "b"]);
    r.init = f(l.init);
    for (s, a, t) in &l.transitions {
        r.add(f(*s), a, f(*t));
    }
    r
}

fn visible_traces(l: &Lts, depth: usize) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    let mut frontier = vec![(Vec::new(), l.init)];
    while let Some((trace, s)) = frontier.pop() {
        out.insert(trace.clone());
        for (a, t) in &l
            .transitions
            .iter()
            .filter(|x| x.0 == s)
            .map(|x| (x.1.clone(), x.2))
            .collect::<Vec<_>>()
        {
            let mut next = trace.clone();
            if a != TAU {
                if next.len() == depth {
                    continue;
                }
                next.push(a.clone());
            }
            frontier.push((next, *t));
        }
    }
    out
}

fn det(seed: u64) -> Lts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut l = Lts::with_size(4, &["a", "b"]);
    for s in 0..4 {
        for x in ["a", "b"] {
            if rng.gen_bool(0.6) {
                l.add(s, x, rng.gen_range(0..4));
            }
        }
    }
    l
}

type Signature = BTreeMap<Vec<String>, Vec<BTreeSet<String>>>;

/// Every failure of `q` is a failure of `p`, refusals compared up to
/// subsets.
fn signature_included(q: &Signature, p: &Signature) -> bool {
    q.iter().all(|(trace, rq)| {
        p.get(trace)
            .is_some_and(|rp| rq.iter().all(|r| rp.iter().any(|m| r.is_subset(m))))
    })
}

/// Quotient of the reachable part by trace equivalence of states.
fn language_quotient(l: &Lts) -> Lts {
    let n = l.states.len();
    let reach = l.reachable();
    let lang = |s: usize| {
        let mut m = l.clone();
        m.init = s;
        visible_traces(&m, n)
    };
    let mut classes: Vec<BTreeSet<Vec<String>>> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    for s in (0..n).filter(|&s| reach[s]) {
        let t = lang(s);
        class_of[s] = classes.iter().position(|c| *c == t).unwrap_or_else(|| {
            classes.push(t);
            classes.len() - 1
        });
    }
    let mut q = Lts::with_size(classes.len(), &["a", "b"]);
    q.init = class_of[l.init];
    for (s, a, t) in &l.transitions {
        if reach[*s] && !q.succ_on(class_of[*s], a).any(|x| x == class_of[*t]) {
            q.add(class_of[*s], a, class_of[*t]);
        }
    }
    q
}

/// Random deterministic test tree over `{a, b}` of the given depth, nodes
/// optionally escaping to success internally.
fn test_tree(rng: &mut ChaCha8Rng, depth: usize) -> Lts {
    let mut t = Lts::new(vec!["ok".into()], vec!["a".into(), "b".into()], 0);
    t.success.insert(0);
    fn node(t: &mut Lts, rng: &mut ChaCha8Rng, depth: usize) -> usize {
        if rng.gen_bool(0.2) {
            return 0;
        }
        let id = t.states.len();
        t.states.push(format!("n{id}"));
        if rng.gen_bool(0.3) {
            t.add(id, TAU, 0);
        }
        if depth > 0 {
            for a in ["a", "b"] {
                if rng.gen_bool(0.6) {
                    let c = node(t, rng, depth - 1);
                    t.add(id, a, c);
                }
            }
        }
        id
    }
    t.init = node(&mut t, rng, depth);
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bisimilarity_is_an_equivalence(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), k in 1..5usize) {
        let (p, q, r) = (lts(a, 5), lts(b, 5), lts(c, 5));
        prop_assert!(bisimilar(&p, &p));
        prop_assert!(bisimilar(&p, &rotated(&p, k)));
        prop_assert_eq!(bisimilar(&p, &q), bisimilar(&q, &p));
        if bisimilar(&p, &q) && bisimilar(&q, &r) {
            prop_assert!(bisimilar(&p, &r));
        }
        prop_assert_eq!(bisim_witness(&p, &q).is_none(), bisimilar(&p, &q));
    }

    #[test]
    fn bisimilar_systems_agree_on_failures_and_tests(a in any::<u64>(), k in 1..5usize) {
        let p = lts(a, 5);
        let q = rotated(&p, k);
        prop_assert_eq!(failures(&p, 4).unwrap().maximal, failures(&q, 4).unwrap().maximal);
        prop_assert!(!must_distinguishable(&p, &q, 3));
    }

    #[test]
    fn separating_tests_are_found(a in any::<u64>(), b in any::<u64>(), t in any::<u64>()) {
        let (p, q) = (lts(a, 3), lts(b, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let distinguishable = must_distinguishable(&p, &q, 3);
        for _ in 0..20 {
            let test = test_tree(&mut rng, 3);
            if must_pass(&p, &test) != must_pass(&q, &test) {
                prop_assert!(distinguishable, "{}\n{}\n{}", render_lts(&p), render_lts(&q), render_lts(&test));
            }
        }
        let same = failure_signature(&p, 3) == failure_signature(&q, 3);
        prop_assert_eq!(same, !distinguishable);
    }

    #[test]
    fn may_testing_sees_traces(a in any::<u64>(), t in any::<u64>()) {
        let p = lts(a, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let traces = visible_traces(&p, 3);
        for _ in 0..10 {
            let test = test_tree(&mut rng, 2);
            let expected = visible_traces(&test, 3).iter().any(|tr| {
                traces.contains(tr) && reaches_success(&test, tr)
            });
            prop_assert_eq!(may_pass(&p, &test), expected);
        }
    }

    #[test]
    fn refinement_is_a_preorder(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (p, q, r) = (lts(a, 4), lts(b, 4), lts(c, 4));
        prop_assert!(refines(&p, &p, 4).unwrap());
        if refines(&p, &q, 4).unwrap() && refines(&q, &r, 4).unwrap() {
            prop_assert!(refines(&p, &r, 4).unwrap());
        }
        let both = refines(&p, &q, 4).unwrap() && refines(&q, &p, 4).unwrap();
        prop_assert_eq!(both, failures(&p, 4).unwrap().maximal == failures(&q, 4).unwrap().maximal);
        prop_assert_eq!(refinement_witness(&p, &q, 4).unwrap().is_none(), refines(&p, &q, 4).unwrap());
    }

    #[test]
    fn deterministic_systems_compare_by_language(a in any::<u64>(), b in any::<u64>()) {
        let (p, q) = (det(a), det(b));
        prop_assert!(p.is_deterministic() && q.is_deterministic());
        let same_language = visible_traces(&p, 8) == visible_traces(&q, 8);
        prop_assert_eq!(bisimilar(&p, &q), same_language);
        prop_assert_eq!(!must_distinguishable(&p, &q, 8), same_language);
    }

    #[test]
    fn must_preorder_is_reverse_failure_inclusion(a in any::<u64>(), b in any::<u64>()) {
        let (p, q) = (lts(a, 3), lts(b, 3));
        let included = signature_included(&failure_signature(&q, 3), &failure_signature(&p, 3));
        prop_assert_eq!(must_preorder(&p, &q, 3), included, "{}\n{}", render_lts(&p), render_lts(&q));
    }

    #[test]
    fn language_quotient_of_deterministic_system_is_bisimilar(a in any::<u64>()) {
        let p = det(a);
        let q = language_quotient(&p);
        prop_assert!(q.is_deterministic());
        prop_assert!(q.states.len() <= p.reachable().iter().filter(|&&r| r).count());
        prop_assert!(bisimilar(&p, &q), "{}\n{}", render_lts(&p), render_lts(&q));
    }

    #[test]
    fn rendering_round_trips(a in any::<u64>()) {
        let p = lts(a, 5);
        prop_assert_eq!(parse_lts(&render_lts(&p)).unwrap(), p);
    }
}

/// Whether the trace leads a deterministic test to a success state,
/// possibly after internal moves.
fn reaches_success(test: &Lts, trace: &[String]) -> bool {
    let mut s = test.init;
    for a in trace {
        match test.succ_on(s, a).next() {
            Some(t) => s = t,
            None => return false,
        }
    }
    test.success.contains(&s) || test.succ_on(s, TAU).any(|t| test.success.contains(&t))
}

#[test]
fn vending_machines() {
    let p = parse_lts(&corpus("P.lts")).unwrap();
    let q = parse_lts(&corpus("Q.lts")).unwrap();
    let t = parse_lts(&corpus("T.lts")).unwrap();
    assert!(must_pass(&p, &t) && !must_pass(&q, &t));
    assert_eq!(visible_traces(&p, 3), visible_traces(&q, 3));
}
