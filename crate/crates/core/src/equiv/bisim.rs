use std::collections::HashMap;
use std::fmt;

use super::lts::Lts;

/// `p_state` and `q_state` are related by every candidate relation up to
/// here, but one of them has a `label` move the other cannot match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimWitness {
    pub p_state: String,
    pub q_state: String,
    pub label: String,
}

impl fmt::Display for BisimWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}) differ on {}",
            self.p_state, self.q_state, self.label
        )
    }
}

/// Disjoint union of `p` and `q`, states of `q` shifted by `p.states.len()`.
struct Union<'a> {
    p: &'a Lts,
    q: &'a Lts,
}

impl Union<'_> {
    fn len(&self) -> usize {
        self.p.states.len() + self.q.states.len()
    }

    fn succ(&self, s: usize) -> Vec<(&str, usize)> {
        let np = self.p.states.len();
        if s < np {
            self.p.succ(s).collect()
        } else {
            self.q.succ(s - np).map(|(a, t)| (a, t + np)).collect()
        }
    }
}

/// Block numbers per state after each refinement round; the last entry is
/// the coarsest bisimulation.
fn refine(u: &Union<'_>) -> Vec<Vec<usize>> {
    let mut rounds = vec![vec![0; u.len()]];
    loop {
        let prev = rounds.last().expect("nonempty");
        let mut ids: HashMap<(usize, Vec<(&str, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = (0..u.len())
            .map(|s| {
                let mut sig: Vec<(&str, usize)> =
                    u.succ(s).into_iter().map(|(a, t)| (a, prev[t])).collect();
                sig.sort();
                sig.dedup();
                let n = ids.len();
                *ids.entry((prev[s], sig)).or_insert(n)
            })
            .collect();
        let blocks_before = prev.iter().max().map_or(0, |m| m + 1);
        let stable = ids.len() == blocks_before;
        rounds.push(next);
        if stable {
            return rounds;
        }
    }
}

pub fn bisimilar(p: &Lts, q: &Lts) -> bool {
    bisim_witness(p, q).is_none()
}

/// `None` when the initial states are bisimilar, otherwise the deepest
/// distinguishing pair reached by following unmatched moves.
pub fn bisim_witness(p: &Lts, q: &Lts) -> Option<BisimWitness> {
    let u = Union { p, q };
    let rounds = refine(&u);
    let np = p.states.len();
    let (mut a, mut b) = (p.init, q.init + np);
    let final_round = rounds.last().expect("nonempty");
    if final_round[a] == final_round[b] {
        return None;
    }
    loop {
        let k = rounds
            .iter()
            .position(|r| r[a] != r[b])
            .expect("split somewhere");
        let prev = &rounds[k - 1];
        match unmatched(&u, a, b, prev)
            .or_else(|| unmatched(&u, b, a, prev).map(|(l, t, o)| (l, o, t)))
        {
            Some((label, x, y)) => match (x, y) {
                (Some(x), Some(y)) => {
                    a = x;
                    b = y;
                }
                _ => {
                    return Some(BisimWitness {
                        p_state: p.states[a].clone(),
                        q_state: q.states[b - np].clone(),
                        label,
                    })
                }
            },
            None => unreachable!("states split in round {k} must differ in some move"),
        }
    }
}

/// A move `from --l--> x` with no `other --l--> y` in the same block of
/// `prev`; returns `l`, `x` and the first `l`-successor of `other` if any.
fn unmatched(
    u: &Union<'_>,
    from: usize,
    other: usize,
    prev: &[usize],
) -> Option<(String, Option<usize>, Option<usize>)> {
    let theirs = u.succ(other);
    for (l, x) in u.succ(from) {
        let mut same = theirs.iter().filter(|(m, _)| *m == l);
        if !same.clone().any(|&(_, y)| prev[y] == prev[x]) {
            return Some((l.to_string(), Some(x), same.next().map(|&(_, y)| y)));
        }
    }
    None
}
