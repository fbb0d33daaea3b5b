//! Fair execution of one-level programs at the scheduler level.

use std::collections::{HashSet, VecDeque};

use rand::Rng;

use super::onelevel::{split_one_level, NotOneLevel, OneLevelProgram};
use crate::engine::{
    eval_guards, explore, rng_from_seed, run_config, Bound, Guards, Limits, Machine, Outcome,
};
use crate::state::State;
use crate::syntax::{GclProgram, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Priorities as in the weak-fairness transformation: the enabled
    /// command with the least counter runs; it is reset, other enabled
    /// commands count down, disabled ones are reset.
    Weak,
    /// Each command accumulates one unit of debt per step in which it is
    /// enabled; the enabled command with the largest debt runs and is
    /// cleared.
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairOptions {
    pub policy: Policy,
    pub seed: u64,
    /// Total machine steps, including one per loop iteration.
    pub fuel: u64,
    /// Weak policy: fresh priorities are drawn from `0..=reset_bound`.
    pub reset_bound: u64,
}

impl FairOptions {
    pub fn new(policy: Policy, seed: u64) -> Self {
        FairOptions {
            policy,
            seed,
            fuel: 100_000,
            reset_bound: 16,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_reset_bound(mut self, r: u64) -> Self {
        self.reset_bound = r;
        self
    }
}

/// One loop iteration as seen by the scheduler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairStep {
    pub enabled: Vec<bool>,
    /// Priorities (weak) or debts (strong) when the choice was made.
    pub counters: Vec<i64>,
    pub selected: usize,
}

pub fn run_fair(p: &GclProgram, s0: State, opts: FairOptions) -> Result<Outcome, NotOneLevel> {
    Ok(run_fair_traced(p, s0, opts)?.0)
}

pub fn run_fair_traced(
    p: &GclProgram,
    s0: State,
    opts: FairOptions,
) -> Result<(Outcome, Vec<FairStep>), NotOneLevel> {
    let ol = split_one_level(p)?;
    Ok(FairRun::new(&ol, opts).run(s0))
}

struct FairRun<'a> {
    ol: &'a OneLevelProgram,
    opts: FairOptions,
    init: Machine,
    bodies: Vec<Machine>,
}

fn body_machine(ol: &OneLevelProgram, s: &Stmt) -> Machine {
    Machine::new(&GclProgram {
        declarations: ol.declarations.clone(),
        body: s.clone(),
    })
}

impl<'a> FairRun<'a> {
    fn new(ol: &'a OneLevelProgram, opts: FairOptions) -> Self {
        FairRun {
            ol,
            opts,
            init: body_machine(ol, &ol.init),
            bodies: ol
                .commands
                .iter()
                .map(|c| body_machine(ol, &c.body))
                .collect(),
        }
    }

    fn run(&self, s0: State) -> (Outcome, Vec<FairStep>) {
        let mut rng = rng_from_seed(self.opts.seed);
        let mut trace = Vec::new();
        let mut fuel = self.opts.fuel;
        let n = self.ol.commands.len();
        let r = self.opts.reset_bound as i64;
        let mut counters: Vec<i64> = match self.opts.policy {
            Policy::Weak => (0..n).map(|_| rng.gen_range(0..=r)).collect(),
            Policy::Strong => vec![0; n],
        };

        let (out, used) = run_config(&self.init, self.init.initial(s0), &mut rng, fuel);
        let Outcome::Terminated(mut state) = out else {
            return (out, trace);
        };
        fuel -= used;
        loop {
            if fuel == 0 {
                return (Outcome::BoundExceeded(Bound::Fuel), trace);
            }
            fuel -= 1;
            let enabled = match eval_guards(self.ol.guards(), &state) {
                Guards::Error(reason) => return (Outcome::Failed { reason, state }, trace),
                Guards::Enabled(on) => on,
            };
            if enabled.is_empty() {
                return (Outcome::Terminated(state), trace);
            }
            let mask: Vec<bool> = (0..n).map(|k| enabled.contains(&k)).collect();
            if self.opts.policy == Policy::Strong {
                for &k in &enabled {
                    counters[k] += 1;
                }
            }
            let best = match self.opts.policy {
                Policy::Weak => enabled.iter().map(|&k| counters[k]).min(),
                Policy::Strong => enabled.iter().map(|&k| counters[k]).max(),
            }
            .expect("some command is enabled");
            let tied: Vec<usize> = enabled
                .iter()
                .copied()
                .filter(|&k| counters[k] == best)
                .collect();
            let i = tied[rng.gen_range(0..tied.len())];
            trace.push(FairStep {
                enabled: mask.clone(),
                counters: counters.clone(),
                selected: i,
            });
            match self.opts.policy {
                Policy::Weak => {
                    for k in 0..n {
                        if k == i || !mask[k] {
                            counters[k] = rng.gen_range(0..=r);
                        } else {
                            counters[k] -= 1;
                        }
                    }
                }
                Policy::Strong => counters[i] = 0,
            }
            let m = &self.bodies[i];
            let (out, used) = run_config(m, m.initial(state), &mut rng, fuel);
            match out {
                Outcome::Terminated(s) => state = s,
                other => return (other, trace),
            }
            fuel -= used;
        }
    }
}

/// Final states of all weakly fair computations whose priorities are drawn
/// from `0..=reset_bound`, by exhaustive search over (state, priorities).
/// Bodies are explored exhaustively, so nondeterministic bodies are allowed.
pub fn weak_fair_outcomes(
    p: &GclProgram,
    s0: State,
    reset_bound: u64,
    lim: Limits,
) -> Result<Vec<State>, String> {
    let ol = split_one_level(p).map_err(|e| e.to_string())?;
    let n = ol.commands.len();
    let r = reset_bound as i64;
    let finals = |m: &Machine, s: State| -> Result<Vec<State>, String> {
        let rep = explore(m, m.initial(s), lim).report;
        if !rep.is_complete() || rep.has_failure() || rep.has_divergence() {
            return Err(format!("body did not terminate cleanly: {}", rep.to_text()));
        }
        Ok(rep.terminated().into_iter().cloned().collect())
    };
    let init = body_machine(&ol, &ol.init);
    let bodies: Vec<Machine> = ol
        .commands
        .iter()
        .map(|c| body_machine(&ol, &c.body))
        .collect();

    let all_resets: Vec<Vec<i64>> = product(&vec![(0..=r).collect::<Vec<_>>(); n]);
    let mut seen: HashSet<(State, Vec<i64>)> = HashSet::new();
    let mut queue = VecDeque::new();
    for s in finals(&init, s0)? {
        for z in &all_resets {
            let node = (s.clone(), z.clone());
            if seen.insert(node.clone()) {
                queue.push_back(node);
            }
        }
    }
    let mut out: Vec<State> = Vec::new();
    while let Some((s, z)) = queue.pop_front() {
        if seen.len() > lim.max_configs {
            return Err("state limit exceeded".into());
        }
        let enabled = match eval_guards(ol.guards(), &s) {
            Guards::Error(r) => return Err(format!("guard evaluation failed: {r}")),
            Guards::Enabled(on) => on,
        };
        if enabled.is_empty() {
            if !out.contains(&s) {
                out.push(s);
            }
            continue;
        }
        let least = enabled.iter().map(|&k| z[k]).min().expect("nonempty");
        for &i in enabled.iter().filter(|&&k| z[k] == least) {
            let choices: Vec<Vec<i64>> = (0..n)
                .map(|k| {
                    if k != i && enabled.contains(&k) {
                        vec![z[k] - 1]
                    } else {
                        (0..=r).collect()
                    }
                })
                .collect();
            let next_z = product(&choices);
            for s2 in finals(&bodies[i], s.clone())? {
                for z2 in &next_z {
                    let node = (s2.clone(), z2.clone());
                    if seen.insert(node.clone()) {
                        queue.push_back(node);
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn product(choices: &[Vec<i64>]) -> Vec<Vec<i64>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}
