//! Tabular Q-learning agent selecting per-PE correction factors.

mod agent;
mod decoder;
mod state;
mod table;

pub use agent::{greedy_action, q_update, q_update_terminal, select_action, AgentParams, Rewards};
pub use decoder::{qlbp_decode, qlbp_eval, qlbp_eval_observed, qlbp_train, Mode};
pub use state::{encode_state, lehmer_rank, lehmer_unrank, StateIndex, STATE_COUNT};
pub use table::{ActionSet, QTable};
