//! Reference error rates and binomial confidence bounds.

use statrs::function::erf::erfc;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Raw BPSK bit error rate seen by each coded bit at rate `rate`.
pub fn uncoded_ber(ebn0_db: f64, rate: f64) -> f64 {
    q_function((2.0 * rate * 10f64.powf(ebn0_db / 10.0)).sqrt())
}

/// Probability that at least one of `k` independent raw decisions fails.
pub fn uncoded_fer(ebn0_db: f64, rate: f64, k: usize) -> f64 {
    1.0 - (1.0 - uncoded_ber(ebn0_db, rate)).powi(k as i32)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// True unless the first proportion is significantly larger than the second,
/// i.e. `a <= b` holds within the two intervals.
pub fn not_significantly_greater(a: (u64, u64), b: (u64, u64), z: f64) -> bool {
    let (a_lo, _) = wilson_interval(a.0, a.1, z);
    let (_, b_hi) = wilson_interval(b.0, b.1, z);
    a_lo <= b_hi
}

/// Normal-approximation interval for the mean of i.i.d. samples,
/// `mean ± z·sd/sqrt(n)` with the unbiased standard deviation.
///
/// Used for BER: bit errors cluster inside failed frames, so the frame is
/// the independent unit and the per-frame error fraction is the sample.
pub fn mean_interval(samples: &[f64], z: f64) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, mean);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let half = z * (var / n as f64).sqrt();
    (mean - half, mean + half)
}
