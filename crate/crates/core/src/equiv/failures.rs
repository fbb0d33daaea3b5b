use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::lts::{Lts, TAU};

/// A trace and a set of actions refused in some stable state after it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Failure {
    pub trace: Vec<String>,
    pub refusal: BTreeSet<String>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<&str> = self.refusal.iter().map(String::as_str).collect();
        write!(f, "(<{}>, {{{}}})", self.trace.join(","), r.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("divergence: internal cycle through {}", cycle.join(" -> "))]
pub struct Divergence {
    pub cycle: Vec<String>,
}

/// Failures up to a trace length, stored as maximal refusals per trace.
/// The represented set is closed under subsets of refusals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failures {
    pub alphabet: BTreeSet<String>,
    pub depth: usize,
    pub maximal: BTreeMap<Vec<String>, Vec<BTreeSet<String>>>,
}

impl Failures {
    pub fn contains(&self, trace: &[String], refusal: &BTreeSet<String>) -> bool {
        self.maximal
            .get(trace)
            .is_some_and(|rs| rs.iter().any(|r| refusal.is_subset(r)))
    }

    pub fn traces(&self) -> impl Iterator<Item = &Vec<String>> {
        self.maximal.keys()
    }

    /// Failures with maximal refusals, in order.
    pub fn iter(&self) -> impl Iterator<Item = Failure> + '_ {
        self.maximal.iter().flat_map(|(t, rs)| {
            rs.iter().map(move |r| Failure {
                trace: t.clone(),
                refusal: r.clone(),
            })
        })
    }

    /// A failure of `self` outside `other`, if any.
    pub fn not_in(&self, other: &Failures) -> Option<Failure> {
        self.iter().find(|f| !other.contains(&f.trace, &f.refusal))
    }

    /// Every failure of the expanded set; exponential in the alphabet.
    pub fn expand(&self) -> BTreeSet<Failure> {
        let mut out = BTreeSet::new();
        for f in self.iter() {
            let items: Vec<&String> = f.refusal.iter().collect();
            for mask in 0u64..(1 << items.len()) {
                let refusal = items
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, a)| (*a).clone())
                    .collect();
                out.insert(Failure {
                    trace: f.trace.clone(),
                    refusal,
                });
            }
        }
        out
    }
}

fn tau_closure(l: &Lts, from: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = from.into_iter().collect();
    let mut stack: Vec<usize> = out.iter().copied().collect();
    while let Some(s) = stack.pop() {
        for t in l.succ_on(s, TAU) {
            if out.insert(t) {
                stack.push(t);
            }
        }
    }
    out
}

pub fn check_divergence_free(l: &Lts) -> Result<(), Divergence> {
    match l.tau_cycle() {
        None => Ok(()),
        Some(c) => Err(Divergence {
            cycle: c.iter().map(|&s| l.states[s].clone()).collect(),
        }),
    }
}

/// Failures of `l` with traces of length at most `depth`, refusals over
/// the alphabet of `l`.
pub fn failures(l: &Lts, depth: usize) -> Result<Failures, Divergence> {
    let alphabet: BTreeSet<String> = l.alphabet.iter().cloned().collect();
    failures_over(l, &alphabet, depth)
}

/// As [`failures`] with refusals over `alphabet`.
pub fn failures_over(
    l: &Lts,
    alphabet: &BTreeSet<String>,
    depth: usize,
) -> Result<Failures, Divergence> {
    check_divergence_free(l)?;
    let mut maximal = BTreeMap::new();
    let mut frontier = vec![(Vec::<String>::new(), tau_closure(l, [l.init]))];
    for len in 0..=depth {
        let mut next = Vec::new();
        for (trace, set) in frontier {
            let mut refusals: Vec<BTreeSet<String>> = Vec::new();
            for &s in set.iter().filter(|&&s| l.is_stable(s)) {
                let offered = l.initials(s);
                let r: BTreeSet<String> = alphabet
                    .iter()
                    .filter(|a| !offered.contains(a.as_str()))
                    .cloned()
                    .collect();
                if !refusals.iter().any(|x| r.is_subset(x)) {
                    refusals.retain(|x| !x.is_subset(&r));
                    refusals.push(r);
                }
            }
            refusals.sort();
            if len < depth {
                for a in alphabet {
                    let after = tau_closure(l, set.iter().flat_map(|&s| l.succ_on(s, a)));
                    if !after.is_empty() {
                        let mut t = trace.clone();
                        t.push(a.clone());
                        next.push((t, after));
                    }
                }
            }
            maximal.insert(trace, refusals);
        }
        frontier = next;
    }
    Ok(Failures {
        alphabet: alphabet.clone(),
        depth,
        maximal,
    })
}

/// Failures of `p` included in those of `q`, traces up to `depth`. The
/// verdict is exact for acyclic systems once `depth` exceeds both state
/// counts; otherwise it covers the bounded prefix only.
pub fn refines(p: &Lts, q: &Lts, depth: usize) -> Result<bool, Divergence> {
    Ok(refinement_witness(p, q, depth)?.is_none())
}

/// A failure of `p` that `q` lacks.
pub fn refinement_witness(p: &Lts, q: &Lts, depth: usize) -> Result<Option<Failure>, Divergence> {
    let alphabet: BTreeSet<String> = p.alphabet.iter().chain(&q.alphabet).cloned().collect();
    let fp = failures_over(p, &alphabet, depth)?;
    let fq = failures_over(q, &alphabet, depth)?;
    Ok(fp.not_in(&fq))
}
