//! Rewards, epsilon-greedy action selection and the Q-learning update.

use rand::Rng;

use super::state::StateIndex;
use super::table::{ActionSet, QTable};
use crate::bp::sign;
use crate::error::{Error, Result};

/// Reward schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rewards {
    /// Successful decode, both outputs of the PE kept their sign.
    pub success_both: f64,
    /// Successful decode, exactly one output kept its sign.
    pub success_one: f64,
    /// Successful decode, both outputs flipped.
    pub success_none: f64,
    pub sign_kept: f64,
    pub sign_flipped: f64,
}

impl Default for Rewards {
    fn default() -> Self {
        Rewards {
            success_both: 20.0,
            success_one: 10.0,
            success_none: 0.0,
            sign_kept: 1.0,
            sign_flipped: -1.0,
        }
    }
}

impl Rewards {
    /// Per-visit reward for a tracked output; zero counts as positive.
    #[inline]
    pub fn step(&self, curr: f64, prev: f64) -> f64 {
        if sign(curr) == sign(prev) {
            self.sign_kept
        } else {
            self.sign_flipped
        }
    }

    /// Reward for a PE on the iteration where decoding succeeded.
    #[inline]
    pub fn terminal(&self, first_kept: bool, second_kept: bool) -> f64 {
        match (first_kept, second_kept) {
            (true, true) => self.success_both,
            (false, false) => self.success_none,
            _ => self.success_one,
        }
    }

    pub fn max_abs(&self) -> f64 {
        [
            self.success_both,
            self.success_one,
            self.success_none,
            self.sign_kept,
            self.sign_flipped,
        ]
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub rewards: Rewards,
    pub actions: ActionSet,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            alpha: 0.1,
            gamma: 0.6,
            epsilon: 0.5,
            rewards: Rewards::default(),
            actions: ActionSet::standard(),
        }
    }
}

impl AgentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        Ok(())
    }
}

/// Highest-valued action; ties go to the smallest index.
pub fn greedy_action(table: &QTable, state: StateIndex) -> usize {
    let row = table.row(state);
    let mut best = 0;
    for (a, &q) in row.iter().enumerate().skip(1) {
        if q > row[best] {
            best = a;
        }
    }
    best
}

/// Uniformly random action with probability `epsilon`, greedy otherwise.
/// Draws nothing from `rng` when `epsilon == 0`.
pub fn select_action<R: Rng + ?Sized>(
    table: &QTable,
    state: StateIndex,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        rng.random_range(0..table.num_actions())
    } else {
        greedy_action(table, state)
    }
}

/// `Q(s,a) += alpha (r + gamma max_a' Q(s',a') - Q(s,a))`; returns the new
/// value.
pub fn q_update(
    table: &mut QTable,
    state: StateIndex,
    action: usize,
    reward: f64,
    next: StateIndex,
    alpha: f64,
    gamma: f64,
) -> f64 {
    let best_next = table.row(next).iter().copied().fold(f64::NEG_INFINITY, f64::max);
    apply(table, state, action, reward + gamma * best_next, alpha)
}

/// Update for a transition that ends the episode: the target is the reward
/// alone.
pub fn q_update_terminal(table: &mut QTable, state: StateIndex, action: usize, reward: f64, alpha: f64) -> f64 {
    apply(table, state, action, reward, alpha)
}

#[inline]
fn apply(table: &mut QTable, state: StateIndex, action: usize, target: f64, alpha: f64) -> f64 {
    let old = table.q(state, action);
    let new = old + alpha * (target - old);
    table.set_q(state, action, new);
    table.record_visit(state, action);
    new
}
