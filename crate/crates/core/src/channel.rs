//! BPSK modulation over an AWGN channel and channel LLRs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The generator used for every random draw in the simulator.
///
/// ChaCha8 output is stable across platforms and crate releases, so a seed
/// fully determines a simulation.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Noise level for a given Eb/N0 with unit-energy BPSK symbols:
/// `sigma^2 = 1 / (2 R Eb/N0)`.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

pub fn ebn0_from_sigma(sigma: f64, rate: f64) -> f64 {
    10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub sigma: f64,
    pub rate: f64,
    pub ebn0_db: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Self {
        ChannelParams {
            sigma: sigma_from_ebn0(ebn0_db, rate),
            rate,
            ebn0_db,
        }
    }
}

/// `0 -> +1`, `1 -> -1`.
pub fn modulate(x: &[u8]) -> Vec<f64> {
    x.iter().map(|&b| 1.0 - 2.0 * f64::from(b)).collect()
}

/// Adds i.i.d. `N(0, sigma^2)` noise.
pub fn add_noise<R: Rng + ?Sized>(s: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    s.iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + sigma * z
        })
        .collect()
}

/// `L_j = 2 y_j / sigma^2`.
pub fn channel_llr(y: &[f64], sigma: f64) -> Vec<f64> {
    let scale = 2.0 / (sigma * sigma);
    y.iter().map(|&v| scale * v).collect()
}
