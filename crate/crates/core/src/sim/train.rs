//! Sequential QLBP training over random frames.

use std::ops::Range;
use std::path::Path;

use super::config::{DecoderKind, SimConfig};
use super::runner::{code_sigma, random_frame};
use crate::channel::seeded_rng;
use crate::code::PolarCode;
use crate::error::{Error, Result};
use crate::qlearn::{qlbp_train, QTable};

/// Frames between progress log lines.
pub const LOG_EVERY: usize = 1000;

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub table: QTable,
    /// Per frame: whether decoding reached a consistent estimate.
    pub successes: Vec<bool>,
}

impl TrainReport {
    pub fn success_count(&self, frames: Range<usize>) -> u64 {
        self.successes[frames].iter().filter(|&&s| s).count() as u64
    }

    pub fn success_rate(&self, frames: Range<usize>) -> f64 {
        let n = frames.len().max(1) as f64;
        self.success_count(frames) as f64 / n
    }
}

/// Trains a fresh table on `train_frames` frames at `train_ebn0_db`.
///
/// Frames come from the generator seeded with `seed`; exploration draws come
/// from stream 1 of the same seed.
pub fn train_qlbp(config: &SimConfig) -> Result<TrainReport> {
    if config.decoder != DecoderKind::Qlbp {
        return Err(Error::Config(format!("training requires decoder qlbp, got {}", config.decoder)));
    }
    if config.train_frames == 0 {
        return Err(Error::Config("train_frames must be at least 1".into()));
    }
    config.validate()?;
    let params = config.agent_params();
    let code = PolarCode::construct(config.n, config.k, config.design_ebn0_db)?;
    let sigma = code_sigma(&code, config.train_ebn0_db);
    let mut table = QTable::new(params.actions.clone());
    let mut channel_rng = seeded_rng(config.seed);
    let mut agent_rng = seeded_rng(config.seed);
    agent_rng.set_stream(1);

    let frames = config.train_frames as usize;
    let mut successes = Vec::with_capacity(frames);
    for f in 0..frames {
        let (_, llrs) = random_frame(&code, sigma, &mut channel_rng)?;
        let out = qlbp_train(&code, &llrs, config.t_max, &mut table, &params, &mut agent_rng)?;
        successes.push(out.converged);
        if (f + 1) % LOG_EVERY == 0 {
            let recent = &successes[f + 1 - LOG_EVERY..];
            let rate = recent.iter().filter(|&&s| s).count() as f64 / LOG_EVERY as f64;
            log::info!("frame {}: success rate over last {LOG_EVERY} = {rate:.4}", f + 1);
        }
    }
    Ok(TrainReport { table, successes })
}

/// [`train_qlbp`] followed by saving the table to `out`. The output path is
/// checked for writability before training starts.
pub fn train_qlbp_driver(config: &SimConfig, out: impl AsRef<Path>) -> Result<TrainReport> {
    let out = out.as_ref();
    std::fs::File::create(out).map_err(|e| Error::io(out, e))?;
    let report = train_qlbp(config)?;
    report.table.save(out)?;
    Ok(report)
}
