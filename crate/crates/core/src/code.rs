//! Polar code construction, encoding and codeword-membership checks.
//!
//! Codes use the plain Kronecker transform `x = u·G^{⊗n}` with
//! `G = [[1,0],[1,1]]` and no bit-reversal permutation. All indices are
//! 0-based.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Default design Eb/N0 (dB) for the Bhattacharyya construction.
pub const DEFAULT_DESIGN_EBN0_DB: f64 = 2.0;

/// A polar code `P(N, K)` with its information and frozen sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    stages: usize,
    info: Vec<usize>,
    frozen: Vec<bool>,
    design_ebn0_db: Option<f64>,
}

/// Bhattacharyya parameters of the `len` synthesized bit-channels for a
/// BPSK/AWGN channel at `design_ebn0_db` and code rate `rate`.
///
/// Index bits are consumed most-significant first; a 0 bit takes the
/// degraded branch `2z - z^2`, a 1 bit the upgraded branch `z^2`.
pub fn bhattacharyya(len: usize, rate: f64, design_ebn0_db: f64) -> Vec<f64> {
    let mut z = vec![(-rate * 10f64.powf(design_ebn0_db / 10.0)).exp()];
    while z.len() < len {
        z = z
            .iter()
            .flat_map(|&v| [2.0 * v - v * v, v * v])
            .collect();
    }
    z
}

impl PolarCode {
    /// Builds a code whose information set is the `k` bit-channels with the
    /// smallest Bhattacharyya parameter (ties go to the smaller index).
    pub fn construct(len: usize, k: usize, design_ebn0_db: f64) -> Result<Self> {
        check_dims(len, k)?;
        let z = bhattacharyya(len, k as f64 / len as f64, design_ebn0_db);
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
        let mut info = order[..k].to_vec();
        info.sort_unstable();
        let mut code = Self::from_info_set(len, info)?;
        code.design_ebn0_db = Some(design_ebn0_db);
        Ok(code)
    }

    /// Builds a code from an explicit information set.
    pub fn from_info_set(len: usize, mut info: Vec<usize>) -> Result<Self> {
        check_dims(len, info.len())?;
        info.sort_unstable();
        if info.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InfoSet("duplicate index".into()));
        }
        if let Some(&bad) = info.iter().find(|&&j| j >= len) {
            return Err(Error::InfoSet(format!("index {bad} >= {len}")));
        }
        let mut frozen = vec![true; len];
        for &j in &info {
            frozen[j] = false;
        }
        Ok(PolarCode {
            stages: len.trailing_zeros() as usize,
            info,
            frozen,
            design_ebn0_db: None,
        })
    }

    /// Block length N.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    /// Always false; a code has at least one bit.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of information bits K.
    pub fn k(&self) -> usize {
        self.info.len()
    }

    /// Number of factor-graph stages, `log2 N`.
    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    /// Design Eb/N0 used for construction; `None` for explicit info sets.
    pub fn design_ebn0_db(&self) -> Option<f64> {
        self.design_ebn0_db
    }

    /// Sorted information set.
    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.frozen[j]).collect()
    }

    pub fn is_frozen(&self, j: usize) -> bool {
        self.frozen[j]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    /// Scatters `info` into the information positions of an all-zero word.
    pub fn place_info_bits(&self, info: &[u8]) -> Result<Vec<u8>> {
        expect_len(self.k(), info.len())?;
        let mut u = vec![0u8; self.len()];
        for (&pos, &bit) in self.info.iter().zip(info) {
            u[pos] = bit;
        }
        Ok(u)
    }

    /// Gathers the information positions of `u`.
    pub fn extract_info_bits(&self, u: &[u8]) -> Vec<u8> {
        self.info.iter().map(|&j| u[j]).collect()
    }

    /// `x = u·G^{⊗n}` over GF(2).
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        expect_len(self.len(), u.len())?;
        let mut x = u.to_vec();
        polar_transform(&mut x);
        Ok(x)
    }

    /// True iff `encode(u_hat) == x_hat`.
    pub fn is_consistent(&self, u_hat: &[u8], x_hat: &[u8]) -> bool {
        if u_hat.len() != self.len() || x_hat.len() != self.len() {
            return false;
        }
        let mut x = u_hat.to_vec();
        polar_transform(&mut x);
        x == x_hat
    }

    /// Frozen-set file: `N K design_ebn0_db` then the information indices.
    pub fn to_frozen_file(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.len(),
            self.k(),
            self.design_ebn0_db.unwrap_or(f64::NAN)
        );
        let idx: Vec<String> = self.info.iter().map(|j| j.to_string()).collect();
        let _ = writeln!(out, "{}", idx.join(" "));
        out
    }

    pub fn from_frozen_file(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let head = lines.next().ok_or(Error::Format {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = head.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Format {
                line: 1,
                msg: "expected `N K design_ebn0_db`".into(),
            });
        }
        let bad = |msg: &str| Error::Format {
            line: 1,
            msg: msg.to_string(),
        };
        let len: usize = fields[0].parse().map_err(|_| bad("bad N"))?;
        let k: usize = fields[1].parse().map_err(|_| bad("bad K"))?;
        let design: f64 = fields[2].parse().map_err(|_| bad("bad design Eb/N0"))?;
        let info = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>().map_err(|_| Error::Format {
                    line: 2,
                    msg: format!("bad index `{s}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if info.len() != k {
            return Err(Error::Format {
                line: 2,
                msg: format!("expected {k} indices, found {}", info.len()),
            });
        }
        let mut code = Self::from_info_set(len, info)?;
        code.design_ebn0_db = (!design.is_nan()).then_some(design);
        Ok(code)
    }
}

/// In-place butterfly evaluation of `x ← x·G^{⊗n}`; `bits.len()` must be a
/// power of two.
pub fn polar_transform(bits: &mut [u8]) {
    let len = bits.len();
    let mut half = len / 2;
    while half >= 1 {
        for block in (0..len).step_by(2 * half) {
            for k in block..block + half {
                bits[k] ^= bits[k + half];
            }
        }
        half /= 2;
    }
}

fn check_dims(len: usize, k: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BlockLength(len));
    }
    if k > len {
        return Err(Error::InfoCount { k, n: len });
    }
    Ok(())
}

pub(crate) fn expect_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
