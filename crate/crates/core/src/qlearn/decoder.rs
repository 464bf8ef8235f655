//! Q-learning-driven BP.
//!
//! From the second iteration on, every directional PE update is a decision
//! point. The agent reads the state of the four inputs and picks a
//! correction factor. An output that flipped sign against the previous
//! iteration is reweighted with that factor; an output that kept its sign is
//! left alone. The transition is rewarded on the next visit to the same PE
//! and direction by whether the top output kept its sign. When the decoder
//! reaches a consistent estimate, the last decision of every PE and
//! direction receives a terminal reward and decoding stops.

use rand::Rng;

use super::agent::{greedy_action, q_update, q_update_terminal, select_action, AgentParams};
use super::state::{encode_state, StateIndex};
use super::table::QTable;
use crate::bp::{run_bp, sign, BpOptions, BpOutput, Direction, MessageGrid, Reweighting, Site};
use crate::code::PolarCode;
use crate::enhanced::compute_rho;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Epsilon-greedy actions, table updated.
    Train,
    /// Greedy actions, table untouched.
    Eval,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    state: StateIndex,
    action: usize,
    kept: [bool; 2],
}

enum Table<'t> {
    Learn(&'t mut QTable),
    Frozen(&'t QTable),
}

struct Agent<'t, 'r, R: ?Sized> {
    table: Table<'t>,
    params: &'t AgentParams,
    rng: Option<&'r mut R>,
    pending: Vec<Option<Pending>>,
}

impl<R: Rng + ?Sized> Reweighting for Agent<'_, '_, R> {
    fn weights(
        &mut self,
        site: &Site,
        inputs: &[f64; 4],
        provisional: &[f64; 2],
        previous: &[f64; 2],
    ) -> [f64; 2] {
        let state = encode_state(inputs);
        let kept = [
            sign(provisional[0]) == sign(previous[0]),
            sign(provisional[1]) == sign(previous[1]),
        ];
        let action = match &mut self.table {
            Table::Learn(table) => {
                let key = site.slot * 2 + usize::from(site.direction == Direction::Right);
                if let Some(p) = self.pending[key].take() {
                    let reward = self.params.rewards.step(provisional[0], previous[0]);
                    q_update(table, p.state, p.action, reward, state, self.params.alpha, self.params.gamma);
                }
                let rng = self.rng.as_deref_mut().expect("training agent has a random source");
                let action = select_action(table, state, self.params.epsilon, rng);
                self.pending[key] = Some(Pending { state, action, kept });
                action
            }
            Table::Frozen(table) => greedy_action(table, state),
        };
        let beta = self.params.actions.value(action);
        let rho = |k: usize| {
            if kept[k] {
                1.0
            } else {
                compute_rho(provisional[k], previous[k], beta)
            }
        };
        [rho(0), rho(1)]
    }
}

fn check_shape(table: &QTable, params: &AgentParams) -> Result<()> {
    if table.actions() != &params.actions {
        return Err(Error::TableShape {
            expected: params.actions.len(),
            found: table.num_actions(),
        });
    }
    Ok(())
}

/// One training episode. Decoding always stops at the first consistent
/// estimate, since that is what triggers the terminal reward.
pub fn qlbp_train<R: Rng + ?Sized>(
    code: &PolarCode,
    channel_llrs: &[f64],
    t_max: usize,
    table: &mut QTable,
    params: &AgentParams,
    rng: &mut R,
) -> Result<BpOutput> {
    check_shape(table, params)?;
    params.validate()?;
    let slots = code.stages() * code.len() / 2 * 2;
    let mut agent = Agent {
        table: Table::Learn(table),
        params,
        rng: Some(rng),
        pending: vec![None; slots],
    };
    let run = run_bp(
        code,
        channel_llrs,
        BpOptions { t_max, early_stop: true },
        &mut agent,
        |_| {},
    )?;
    if run.converged {
        let Table::Learn(table) = agent.table else {
            unreachable!()
        };
        for p in agent.pending.iter().flatten() {
            let reward = params.rewards.terminal(p.kept[0], p.kept[1]);
            q_update_terminal(table, p.state, p.action, reward, params.alpha);
        }
    }
    Ok(BpOutput {
        info_bits: code.extract_info_bits(&run.u_hat),
        iterations: run.iterations,
        converged: run.converged,
    })
}

/// Greedy decoding with a frozen table.
pub fn qlbp_eval(
    code: &PolarCode,
    channel_llrs: &[f64],
    options: BpOptions,
    table: &QTable,
    params: &AgentParams,
) -> Result<BpOutput> {
    qlbp_eval_observed(code, channel_llrs, options, table, params, |_| {})
}

/// [`qlbp_eval`] with a callback receiving the grid after every iteration.
pub fn qlbp_eval_observed<F: FnMut(&MessageGrid)>(
    code: &PolarCode,
    channel_llrs: &[f64],
    options: BpOptions,
    table: &QTable,
    params: &AgentParams,
    observer: F,
) -> Result<BpOutput> {
    check_shape(table, params)?;
    let mut agent = Agent::<crate::channel::SimRng> {
        table: Table::Frozen(table),
        params,
        rng: None,
        pending: Vec::new(),
    };
    let run = run_bp(code, channel_llrs, options, &mut agent, observer)?;
    Ok(BpOutput {
        info_bits: code.extract_info_bits(&run.u_hat),
        iterations: run.iterations,
        converged: run.converged,
    })
}

/// Mode-dispatching entry point. In [`Mode::Eval`] the table is only read.
pub fn qlbp_decode<R: Rng + ?Sized>(
    code: &PolarCode,
    channel_llrs: &[f64],
    t_max: usize,
    table: &mut QTable,
    params: &AgentParams,
    mode: Mode,
    rng: &mut R,
) -> Result<BpOutput> {
    match mode {
        Mode::Train => qlbp_train(code, channel_llrs, t_max, table, params, rng),
        Mode::Eval => qlbp_eval(code, channel_llrs, BpOptions { t_max, early_stop: true }, table, params),
    }
}
