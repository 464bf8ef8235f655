//! Monte Carlo frame loop and decoder dispatch.

use std::time::Instant;

use rand::Rng;

use super::config::{DecoderKind, SimConfig};
use crate::baselines::{sc_decode, scl_decode};
use crate::bp::{run_bp, BpOptions, MessageGrid, Unweighted};
use crate::channel::{add_noise, channel_llr, modulate, seeded_rng, sigma_from_ebn0, SimRng};
use crate::code::PolarCode;
use crate::enhanced::{WeightContext, DEFAULT_BETA};
use crate::error::{Error, Result};
use crate::qlearn::{qlbp_eval_observed, AgentParams, QTable};

/// Frames handed to each worker between stopping-rule checks.
const ROUND_FRAMES: u64 = 64;

/// Error statistics for one Eb/N0 value.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub ebn0_db: f64,
    pub frames_run: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iterations: f64,
    pub wall_time_s: f64,
}

impl CurvePoint {
    fn from_tally(ebn0_db: f64, k: usize, t: Tally, wall_time_s: f64) -> Self {
        let frames = t.frames.max(1) as f64;
        let bits = if k == 0 { 1.0 } else { frames * k as f64 };
        CurvePoint {
            ebn0_db,
            frames_run: t.frames,
            bit_errors: t.bit_errors,
            frame_errors: t.frame_errors,
            ber: t.bit_errors as f64 / bits,
            fer: t.frame_errors as f64 / frames,
            avg_iterations: t.iterations as f64 / frames,
            wall_time_s,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    iterations: u64,
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Tally) {
        self.frames += o.frames;
        self.bit_errors += o.bit_errors;
        self.frame_errors += o.frame_errors;
        self.iterations += o.iterations;
    }
}

enum Engine {
    Sc,
    Scl(usize),
    Bp,
    Ebp(f64),
    Qlbp(QTable, AgentParams),
}

/// Draws uniform information bits, encodes, modulates and passes the word
/// through the channel. Returns the information bits and the channel LLRs.
pub fn random_frame<R: Rng + ?Sized>(code: &PolarCode, sigma: f64, rng: &mut R) -> Result<(Vec<u8>, Vec<f64>)> {
    let info: Vec<u8> = (0..code.k()).map(|_| u8::from(rng.random::<bool>())).collect();
    let x = code.encode(&code.place_info_bits(&info)?)?;
    let y = add_noise(&modulate(&x), sigma, rng);
    Ok((info, channel_llr(&y, sigma)))
}

/// Noise level for a code at `ebn0_db`. A rate-0 code has no information
/// energy to normalize by and is simulated as if it carried one bit.
pub fn code_sigma(code: &PolarCode, ebn0_db: f64) -> f64 {
    let rate = if code.k() == 0 {
        1.0 / code.len() as f64
    } else {
        code.rate()
    };
    sigma_from_ebn0(ebn0_db, rate)
}

/// A configured code and decoder, ready to run points.
pub struct Simulator {
    config: SimConfig,
    code: PolarCode,
    engine: Engine,
}

impl Simulator {
    /// Validates the configuration and loads the Q-table for `qlbp`.
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let table = if config.decoder == DecoderKind::Qlbp {
            let path = config
                .qtable_path
                .as_ref()
                .ok_or_else(|| Error::Config("qlbp evaluation requires qtable_path".into()))?;
            Some(QTable::load(path, &config.agent_params().actions)?)
        } else {
            None
        };
        Self::build(config, table)
    }

    /// A `qlbp` simulator using an in-memory table.
    pub fn with_qtable(config: SimConfig, table: QTable) -> Result<Self> {
        config.validate()?;
        if config.decoder != DecoderKind::Qlbp {
            return Err(Error::Config(format!("q-table given to decoder {}", config.decoder)));
        }
        Self::build(config, Some(table))
    }

    fn build(config: SimConfig, table: Option<QTable>) -> Result<Self> {
        let code = PolarCode::construct(config.n, config.k, config.design_ebn0_db)?;
        let engine = match config.decoder {
            DecoderKind::Sc => Engine::Sc,
            DecoderKind::Scl => Engine::Scl(
                config
                    .list_size
                    .ok_or_else(|| Error::Config("scl requires list_size".into()))?,
            ),
            DecoderKind::Bp => Engine::Bp,
            DecoderKind::Ebp => Engine::Ebp(config.beta.unwrap_or(DEFAULT_BETA)),
            DecoderKind::Qlbp => {
                let params = config.agent_params();
                let table = table.expect("qlbp engine built with a table");
                if table.actions() != &params.actions {
                    return Err(Error::TableShape {
                        expected: params.actions.len(),
                        found: table.num_actions(),
                    });
                }
                Engine::Qlbp(table, params)
            }
        };
        Ok(Simulator {
            config,
            code,
            engine,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn code(&self) -> &PolarCode {
        &self.code
    }

    /// Correction factor in effect for `ebp`.
    pub fn beta(&self) -> Option<f64> {
        match self.engine {
            Engine::Ebp(b) => Some(b),
            _ => None,
        }
    }

    /// Decodes one frame; returns the information bits and iterations used
    /// (zero for SC/SCL).
    pub fn decode(&self, channel_llrs: &[f64]) -> Result<(Vec<u8>, usize)> {
        self.decode_observed(channel_llrs, |_| {})
    }

    /// [`Simulator::decode`] with a callback receiving the BP message grid
    /// after every iteration. SC and SCL never call it.
    pub fn decode_observed<F: FnMut(&MessageGrid)>(&self, channel_llrs: &[f64], observer: F) -> Result<(Vec<u8>, usize)> {
        let opts = BpOptions {
            t_max: self.config.t_max,
            early_stop: self.config.early_stop,
        };
        let run = match &self.engine {
            Engine::Sc => return Ok((sc_decode(&self.code, channel_llrs)?, 0)),
            Engine::Scl(l) => return Ok((scl_decode(&self.code, channel_llrs, *l)?, 0)),
            Engine::Bp => run_bp(&self.code, channel_llrs, opts, &mut Unweighted, observer)?,
            Engine::Ebp(beta) => run_bp(&self.code, channel_llrs, opts, &mut WeightContext::new(*beta)?, observer)?,
            Engine::Qlbp(table, params) => {
                let o = qlbp_eval_observed(&self.code, channel_llrs, opts, table, params, observer)?;
                return Ok((o.info_bits, o.iterations));
            }
        };
        Ok((self.code.extract_info_bits(&run.u_hat), run.iterations))
    }

    fn run_frames(&self, rng: &mut SimRng, quota: u64, sigma: f64, error_budget: u64) -> Result<Tally> {
        let mut t = Tally::default();
        while t.frames < quota && t.frame_errors < error_budget {
            let (info, llrs) = random_frame(&self.code, sigma, rng)?;
            let (decoded, iterations) = self.decode(&llrs)?;
            let errors = info.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64;
            t.frames += 1;
            t.bit_errors += errors;
            t.frame_errors += u64::from(errors > 0);
            t.iterations += iterations as u64;
        }
        Ok(t)
    }

    /// Runs frames at `ebn0_db` until `max_frames` or `min_frame_errors`.
    ///
    /// Worker `w` draws from its own generator seeded with `seed + w`; with
    /// a fixed worker count the result is fully determined by the seed.
    pub fn run_point(&self, ebn0_db: f64) -> Result<CurvePoint> {
        let started = Instant::now();
        let sigma = code_sigma(&self.code, ebn0_db);
        let workers = self.config.workers as u64;
        let target = match self.config.min_frame_errors {
            0 => u64::MAX,
            m => m,
        };
        let mut rngs: Vec<SimRng> = (0..workers)
            .map(|w| seeded_rng(self.config.seed.wrapping_add(w)))
            .collect();
        let mut total = Tally::default();
        while total.frames < self.config.max_frames && total.frame_errors < target {
            let round = (self.config.max_frames - total.frames).min(ROUND_FRAMES * workers);
            let budget = target - total.frame_errors;
            let results: Vec<Result<Tally>> = if workers == 1 {
                vec![self.run_frames(&mut rngs[0], round, sigma, budget)]
            } else {
                std::thread::scope(|scope| {
                    let handles: Vec<_> = rngs
                        .iter_mut()
                        .enumerate()
                        .map(|(w, rng)| {
                            let quota = round / workers + u64::from((w as u64) < round % workers);
                            scope.spawn(move || self.run_frames(rng, quota, sigma, budget))
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("simulation worker panicked"))
                        .collect()
                })
            };
            for r in results {
                total += r?;
            }
        }
        let point = CurvePoint::from_tally(ebn0_db, self.code.k(), total, started.elapsed().as_secs_f64());
        debug_assert!(point.frame_errors <= point.bit_errors);
        Ok(point)
    }

    pub fn run_sweep(&self) -> Result<Vec<CurvePoint>> {
        self.config
            .ebn0_points
            .iter()
            .map(|&p| {
                let point = self.run_point(p)?;
                log::info!(
                    "{} Eb/N0={} dB frames={} BER={:.3e} FER={:.3e}",
                    self.config.decoder,
                    p,
                    point.frames_run,
                    point.ber,
                    point.fer
                );
                Ok(point)
            })
            .collect()
    }
}

pub fn run_point(config: &SimConfig, ebn0_db: f64) -> Result<CurvePoint> {
    Simulator::new(config.clone())?.run_point(ebn0_db)
}

pub fn run_sweep(config: &SimConfig) -> Result<Vec<CurvePoint>> {
    Simulator::new(config.clone())?.run_sweep()
}
