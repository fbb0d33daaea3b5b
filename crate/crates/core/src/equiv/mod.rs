//! Equivalences of finite labelled transition systems: strong
//! bisimilarity, may and must testing, stable failures and refinement.

mod bisim;
mod failures;
mod lts;
mod testing;

pub use bisim::{bisim_witness, bisimilar, BisimWitness};
pub use failures::{
    check_divergence_free, failures, failures_over, refinement_witness, refines, Divergence,
    Failure, Failures,
};
pub use lts::{parse_lts, render_lts, Lts, LtsError, TAU};
pub use testing::{may_pass, must_failure, must_pass, MustFailure};

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    const P: &str = "alphabet i t c\nstates p1 p2 p3 p4\ninit p1\n\
        trans p1 i p2\ntrans p2 t p3\ntrans p2 c p4\n";
    const Q: &str = "alphabet i t c\nstates q1 q2 q2' q3 q4\ninit q1\n\
        trans q1 i q2\ntrans q1 i q2'\ntrans q2 t q3\ntrans q2' c q4\n";
    const T: &str = "alphabet i t c\nstates t1 t2 ok\ninit t1\n\
        trans t1 i t2\ntrans t2 c ok\nsuccess ok\n";

    fn fig() -> (Lts, Lts, Lts) {
        (
            parse_lts(P).unwrap(),
            parse_lts(Q).unwrap(),
            parse_lts(T).unwrap(),
        )
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn vending_machines() {
        let (p, q, t) = fig();
        let w = bisim_witness(&p, &q).unwrap();
        assert_eq!(w.to_string(), "(p2,q2) differ on c");
        assert!(bisimilar(&p, &p));
        assert!(may_pass(&p, &t) && may_pass(&q, &t));
        assert!(must_pass(&p, &t));
        assert_eq!(
            must_failure(&q, &t).unwrap().to_string(),
            "stuck at (q2,t2)"
        );
        assert!(refines(&p, &q, 4).unwrap());
        let w = refinement_witness(&q, &p, 4).unwrap().unwrap();
        assert_eq!(w.trace, ["i"]);
        assert!(w.refusal.contains("c"));
    }

    #[test]
    fn failures_of_figure() {
        let (p, q, _) = fig();
        let fp = failures(&p, 3).unwrap();
        let fq = failures(&q, 3).unwrap();
        let i = vec!["i".to_string()];
        assert!(fp.contains(&i, &set(&["i"])));
        assert!(!fp.contains(&i, &set(&["c"])));
        assert!(fq.contains(&i, &set(&["c"])));
        assert!(fp.contains(&[], &set(&[])));
    }

    #[test]
    fn duplicated_state_stays_bisimilar() {
        let (p, _, _) = fig();
        let p2 = parse_lts(
            "alphabet i t c\nstates p1 p2 p2b p3 p4\ninit p1\n\
             trans p1 i p2\ntrans p1 i p2b\ntrans p2 t p3\ntrans p2 c p4\n\
             trans p2b t p3\ntrans p2b c p4\n",
        )
        .unwrap();
        assert!(bisimilar(&p, &p2));
    }

    #[test]
    fn trivial_tests() {
        let (p, _, _) = fig();
        let unreachable = parse_lts("alphabet i\nstates a b\ninit a\nsuccess b\n").unwrap();
        assert!(!may_pass(&p, &unreachable));
        let at_once = parse_lts("alphabet i\nstates a\ninit a\nsuccess a\n").unwrap();
        assert!(must_pass(&p, &at_once));
    }

    #[test]
    fn divergence_is_reported() {
        let l =
            parse_lts("alphabet a\nstates x y\ninit x\ntrans x tau y\ntrans y tau x\n").unwrap();
        let e = failures(&l, 2).unwrap_err();
        assert_eq!(e.cycle.len(), 2);
    }

    #[test]
    fn text_format() {
        let (p, q, t) = fig();
        for l in [p, q, t] {
            assert_eq!(parse_lts(&render_lts(&l)).unwrap(), l);
        }
        let n = parse_lts("alphabet a\nstates 3\ninit s2\ntrans s0 a s1\n").unwrap();
        assert_eq!(n.states, ["s0", "s1", "s2"]);
        assert!(parse_lts("alphabet a\nstates x\ninit x\ntrans x b x\n").is_err());
        assert!(parse_lts("alphabet a tau\nstates x\ninit x\n").is_err());
        assert!(parse_lts("states x\n").is_err());
    }
}
