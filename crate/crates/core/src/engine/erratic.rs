//! Single seeded computation with uniformly random choices.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::explore::{Halt, Step};
use super::machine::{Config, Machine, Node};
use super::outcome::{Bound, Outcome};
use crate::state::State;
use crate::syntax::GclProgram;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Natural number with P(n) = 2^-(n+1).
pub fn geometric(rng: &mut impl Rng) -> u64 {
    let mut n = 0;
    while rng.gen_bool(0.5) {
        n += 1;
    }
    n
}

/// One step chosen at random. `None` means the configuration halted.
pub fn random_step(m: &Machine, c: &Config, rng: &mut impl Rng) -> Result<Config, Halt> {
    if let Some(&top) = c.residue.last() {
        if let Node::Random(x) = m.node(top) {
            let mut residue = c.residue.clone();
            residue.pop();
            let state = c.state.clone().with(x, BigInt::from(geometric(rng)));
            return Ok(Config { residue, state });
        }
    }
    match m.step(c) {
        Step::Halt(h) => Err(h),
        Step::Next(mut v) => {
            let k = rng.gen_range(0..v.len());
            Ok(v.swap_remove(k).1)
        }
    }
}

/// Runs `c` until it halts or `fuel` steps have been taken; also returns
/// the number of steps used.
pub fn run_config(m: &Machine, mut c: Config, rng: &mut impl Rng, fuel: u64) -> (Outcome, u64) {
    for used in 0..fuel {
        match random_step(m, &c, rng) {
            Ok(next) => c = next,
            Err(Halt::Terminated) => return (Outcome::Terminated(c.state), used),
            Err(Halt::Failed(reason)) => {
                return (
                    Outcome::Failed {
                        reason,
                        state: c.state,
                    },
                    used,
                )
            }
        }
    }
    if c.is_terminated() {
        return (Outcome::Terminated(c.state), fuel);
    }
    (Outcome::BoundExceeded(Bound::Fuel), fuel)
}

pub fn run_erratic(p: &GclProgram, s0: State, seed: u64, fuel: u64) -> Outcome {
    let m = Machine::new(p);
    let mut rng = rng_from_seed(seed);
    run_config(&m, m.initial(s0), &mut rng, fuel).0
}
