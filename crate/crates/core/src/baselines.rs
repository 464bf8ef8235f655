//! Successive cancellation (SC) and SC list decoders.
//!
//! Both use exact min-sum kernels, `f(a, b) = sign(a) sign(b) min(|a|, |b|)`
//! and `g(a, b, c) = b + (1 - 2c) a`, and force frozen bits to zero.

use crate::code::{expect_len, PolarCode};
use crate::error::{Error, Result};

#[inline]
fn f_kernel(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// LLR and partial-sum workspace of one decoding path.
///
/// `llr[l]` holds the `2^l` LLRs of the current subtree at level `l`
/// (level `n` is the channel and is not stored). `left[l]` holds the
/// re-encoded left child of the current level-`l + 1` subtree.
#[derive(Debug, Clone)]
struct ScState {
    stages: usize,
    llr: Vec<Vec<f64>>,
    left: Vec<Vec<u8>>,
    scratch: Vec<u8>,
    u: Vec<u8>,
}

impl ScState {
    fn new(stages: usize) -> Self {
        let len = 1 << stages;
        ScState {
            stages,
            llr: (0..stages).map(|l| vec![0.0; 1 << l]).collect(),
            left: (0..stages).map(|l| vec![0; 1 << l]).collect(),
            scratch: vec![0; 2 * len],
            u: Vec::with_capacity(len),
        }
    }

    /// Decision LLR of source bit `phi`, which must be the next undecided bit.
    fn leaf_llr(&mut self, channel: &[f64], phi: usize) -> f64 {
        let n = self.stages;
        if n == 0 {
            return channel[0];
        }
        let top = if phi == 0 {
            n
        } else {
            phi.trailing_zeros() as usize + 1
        };
        for level in (1..=top).rev() {
            let half = 1 << (level - 1);
            let (lower, upper) = self.llr.split_at_mut(level);
            let dst = &mut lower[level - 1];
            let src: &[f64] = if level == n { channel } else { &upper[0] };
            if level == top && phi != 0 {
                let partial = &self.left[level - 1];
                for k in 0..half {
                    let a = src[k];
                    dst[k] = src[k + half] + if partial[k] == 0 { a } else { -a };
                }
            } else {
                for k in 0..half {
                    dst[k] = f_kernel(src[k], src[k + half]);
                }
            }
        }
        self.llr[0][0]
    }

    fn commit(&mut self, phi: usize, bit: u8) {
        self.u.push(bit);
        // The codeword of the finished level-l subtree lives in
        // scratch[2^l .. 2^(l+1)].
        self.scratch[1] = bit;
        let mut level = 0;
        while level < self.stages && (phi >> level) & 1 == 1 {
            let h = 1 << level;
            let (cur, parent) = self.scratch.split_at_mut(2 * h);
            let right = &cur[h..2 * h];
            let left = &self.left[level];
            for k in 0..h {
                parent[k] = left[k] ^ right[k];
                parent[h + k] = right[k];
            }
            level += 1;
        }
        if level < self.stages {
            let h = 1 << level;
            self.left[level].copy_from_slice(&self.scratch[h..2 * h]);
        }
    }
}

/// Successive cancellation decoding; returns the information bits.
pub fn sc_decode(code: &PolarCode, channel_llrs: &[f64]) -> Result<Vec<u8>> {
    expect_len(code.len(), channel_llrs.len())?;
    let mut state = ScState::new(code.stages());
    for phi in 0..code.len() {
        let llr = state.leaf_llr(channel_llrs, phi);
        let bit = if code.is_frozen(phi) { 0 } else { u8::from(llr < 0.0) };
        state.commit(phi, bit);
    }
    Ok(code.extract_info_bits(&state.u))
}

#[inline]
fn penalty(llr: f64, bit: u8) -> f64 {
    if u8::from(llr < 0.0) == bit {
        0.0
    } else {
        llr.abs()
    }
}

/// One surviving path of the list decoder.
#[derive(Debug, Clone)]
pub struct SclPath {
    /// Accumulated penalty; lower is better.
    pub metric: f64,
    state: ScState,
}

impl SclPath {
    pub fn decided_bits(&self) -> &[u8] {
        &self.state.u
    }
}

/// SC list decoding without CRC; the lowest-metric path wins.
pub fn scl_decode(code: &PolarCode, channel_llrs: &[f64], list_size: usize) -> Result<Vec<u8>> {
    let paths = scl_paths(code, channel_llrs, list_size)?;
    Ok(code.extract_info_bits(paths[0].decided_bits()))
}

/// Runs SCL and returns the final list ordered by metric (stable).
pub fn scl_paths(code: &PolarCode, channel_llrs: &[f64], list_size: usize) -> Result<Vec<SclPath>> {
    if list_size == 0 || !list_size.is_power_of_two() {
        return Err(Error::ListSize(list_size));
    }
    expect_len(code.len(), channel_llrs.len())?;
    let mut paths = vec![SclPath {
        metric: 0.0,
        state: ScState::new(code.stages()),
    }];
    let mut llrs = Vec::with_capacity(list_size);
    let mut candidates: Vec<(usize, u8, f64)> = Vec::with_capacity(2 * list_size);

    for phi in 0..code.len() {
        llrs.clear();
        llrs.extend(paths.iter_mut().map(|p| p.state.leaf_llr(channel_llrs, phi)));
        if code.is_frozen(phi) {
            for (p, &l) in paths.iter_mut().zip(&llrs) {
                p.metric += penalty(l, 0);
                p.state.commit(phi, 0);
            }
            continue;
        }

        candidates.clear();
        for (i, (p, &l)) in paths.iter().zip(&llrs).enumerate() {
            for bit in [0u8, 1] {
                candidates.push((i, bit, p.metric + penalty(l, bit)));
            }
        }
        candidates.sort_by(|a, b| a.2.total_cmp(&b.2));
        candidates.truncate(list_size);

        let mut uses = vec![0usize; paths.len()];
        for &(i, _, _) in &candidates {
            uses[i] += 1;
        }
        let mut parents: Vec<Option<SclPath>> = paths.drain(..).map(Some).collect();
        for &(i, bit, metric) in &candidates {
            uses[i] -= 1;
            let mut child = if uses[i] == 0 {
                parents[i].take().expect("parent consumed once")
            } else {
                parents[i].clone().expect("parent alive")
            };
            child.metric = metric;
            child.state.commit(phi, bit);
            paths.push(child);
        }
    }
    paths.sort_by(|a, b| a.metric.total_cmp(&b.metric));
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{add_noise, channel_llr, modulate, seeded_rng};
    use rand::Rng;

    /// Textbook recursive SC, independent of the iterative workspace.
    /// Returns (u, re-encoded codeword) for the subtree.
    fn sc_oracle(llrs: &[f64], frozen: &[bool]) -> (Vec<u8>, Vec<u8>) {
        if llrs.len() == 1 {
            let bit = if frozen[0] { 0 } else { (llrs[0] < 0.0) as u8 };
            return (vec![bit], vec![bit]);
        }
        let h = llrs.len() / 2;
        let (top, bottom) = llrs.split_at(h);
        let minus: Vec<f64> = top
            .iter()
            .zip(bottom)
            .map(|(&a, &b)| a.signum() * b.signum() * a.abs().min(b.abs()))
            .collect();
        let (u1, c1) = sc_oracle(&minus, &frozen[..h]);
        let plus: Vec<f64> = top
            .iter()
            .zip(bottom)
            .zip(&c1)
            .map(|((&a, &b), &c)| b + if c == 1 { -a } else { a })
            .collect();
        let (u2, c2) = sc_oracle(&plus, &frozen[h..]);
        let cw = c1.iter().zip(&c2).map(|(a, b)| a ^ b).chain(c2.iter().copied()).collect();
        (u1.into_iter().chain(u2).collect(), cw)
    }

    #[test]
    fn sc_matches_recursive_oracle_exhaustively() {
        let code = PolarCode::construct(8, 4, 0.0).unwrap();
        let mut rng = seeded_rng(17);
        let noise = add_noise(&[0.0; 8], 0.5, &mut rng);
        for msg in 0..16u8 {
            let info: Vec<u8> = (0..4).map(|b| (msg >> b) & 1).collect();
            let x = code.encode(&code.place_info_bits(&info).unwrap()).unwrap();
            let y: Vec<f64> = modulate(&x).iter().zip(&noise).map(|(s, z)| s + z).collect();
            let llrs = channel_llr(&y, 0.5);
            let (u, cw) = sc_oracle(&llrs, code.frozen_mask());
            assert_eq!(sc_decode(&code, &llrs).unwrap(), code.extract_info_bits(&u));
            assert_eq!(code.encode(&u).unwrap(), cw);
        }
    }

    #[test]
    fn sc_matches_oracle_on_random_inputs() {
        let mut rng = seeded_rng(4);
        for &(n, k) in &[(16usize, 8usize), (64, 20), (256, 128)] {
            let code = PolarCode::construct(n, k, 1.0).unwrap();
            for _ in 0..50 {
                let llrs: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
                let (u, _) = sc_oracle(&llrs, code.frozen_mask());
                assert_eq!(sc_decode(&code, &llrs).unwrap(), code.extract_info_bits(&u));
            }
        }
    }

    #[test]
    fn noiseless_and_degenerate() {
        let code = PolarCode::construct(64, 32, 2.0).unwrap();
        let info: Vec<u8> = (0..32).map(|i| (i % 3 == 1) as u8).collect();
        let x = code.encode(&code.place_info_bits(&info).unwrap()).unwrap();
        let llrs: Vec<f64> = modulate(&x).iter().map(|s| s * 2e12).collect();
        assert_eq!(sc_decode(&code, &llrs).unwrap(), info);
        assert_eq!(scl_decode(&code, &llrs, 8).unwrap(), info);

        let empty = PolarCode::construct(8, 0, 2.0).unwrap();
        assert!(sc_decode(&empty, &[1.0; 8]).unwrap().is_empty());
        assert!(scl_decode(&empty, &[-1.0; 8], 4).unwrap().is_empty());

        let single = PolarCode::construct(1, 1, 2.0).unwrap();
        assert_eq!(sc_decode(&single, &[-1.0]).unwrap(), vec![1]);
    }

    #[test]
    fn list_of_one_is_sc() {
        let code = PolarCode::construct(128, 64, 2.0).unwrap();
        let mut rng = seeded_rng(8);
        for _ in 0..200 {
            let llrs: Vec<f64> = (0..128).map(|_| rng.random_range(-3.0..5.0)).collect();
            assert_eq!(scl_decode(&code, &llrs, 1).unwrap(), sc_decode(&code, &llrs).unwrap());
        }
    }

    #[test]
    fn list_invariants() {
        let code = PolarCode::construct(32, 16, 2.0).unwrap();
        let mut rng = seeded_rng(21);
        for _ in 0..50 {
            let llrs: Vec<f64> = (0..32).map(|_| rng.random_range(-3.0..4.0)).collect();
            let paths = scl_paths(&code, &llrs, 4).unwrap();
            assert!(paths.len() <= 4);
            assert!(paths.windows(2).all(|w| w[0].metric <= w[1].metric));
            for p in &paths {
                for j in code.frozen_set() {
                    assert_eq!(p.decided_bits()[j], 0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_list_size() {
        let code = PolarCode::construct(8, 4, 2.0).unwrap();
        assert!(matches!(scl_decode(&code, &[1.0; 8], 3), Err(Error::ListSize(3))));
        assert!(matches!(scl_decode(&code, &[1.0; 8], 0), Err(Error::ListSize(0))));
    }
}
