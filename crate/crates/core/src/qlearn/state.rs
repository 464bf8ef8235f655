//! 384-state encoding of a PE's four input LLRs.

/// Number of distinct states: 4! magnitude orderings × 2^4 sign patterns.
pub const STATE_COUNT: usize = 384;

const FACTORIAL: [usize; 4] = [6, 2, 1, 1];

/// `perm_rank * 16 + sign_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex(u16);

impl StateIndex {
    pub fn new(index: usize) -> Option<Self> {
        (index < STATE_COUNT).then_some(StateIndex(index as u16))
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    /// Bit `k` set iff input `k` was negative.
    pub fn sign_bits(self) -> usize {
        self.index() & 0xf
    }

    /// Lehmer rank of the ascending-magnitude permutation.
    pub fn perm_rank(self) -> usize {
        self.index() >> 4
    }
}

/// Lehmer rank of a permutation of `0..4`.
pub fn lehmer_rank(perm: &[usize; 4]) -> usize {
    (0..4)
        .map(|i| perm[i + 1..].iter().filter(|&&p| p < perm[i]).count() * FACTORIAL[i])
        .sum()
}

/// Inverse of [`lehmer_rank`].
pub fn lehmer_unrank(mut rank: usize) -> [usize; 4] {
    let mut pool = vec![0, 1, 2, 3];
    let mut perm = [0; 4];
    for (i, slot) in perm.iter_mut().enumerate() {
        let digit = rank / FACTORIAL[i];
        rank %= FACTORIAL[i];
        *slot = pool.remove(digit);
    }
    perm
}

/// Encodes the sign pattern and magnitude ordering of four LLRs.
///
/// Zero counts as nonnegative. Equal magnitudes keep their positional order.
pub fn encode_state(inputs: &[f64; 4]) -> StateIndex {
    let sign_bits = inputs
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < 0.0)
        .fold(0usize, |acc, (k, _)| acc | 1 << k);
    let mut perm = [0usize, 1, 2, 3];
    // Insertion sort: stable and allocation-free.
    for i in 1..4 {
        let mut j = i;
        while j > 0 && inputs[perm[j - 1]].abs() > inputs[perm[j]].abs() {
            perm.swap(j - 1, j);
            j -= 1;
        }
    }
    StateIndex((lehmer_rank(&perm) * 16 + sign_bits) as u16)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(encode_state(&[1.0, 2.0, 3.0, 4.0]).index(), 0);
        assert_eq!(encode_state(&[-1.0, 2.0, 3.0, 4.0]).index(), 1);
        assert_eq!(encode_state(&[0.0, -0.0, 0.0, 0.0]).index(), 0);
        // Reversed magnitudes are the last permutation.
        assert_eq!(encode_state(&[4.0, 3.0, 2.0, 1.0]).perm_rank(), 23);
    }

    #[test]
    fn ties_keep_position() {
        assert_eq!(encode_state(&[2.0, -2.0, 2.0, 2.0]).perm_rank(), 0);
        assert_eq!(encode_state(&[5.0, 1.0, 1.0, 5.0]), encode_state(&[5.0, 1.0, 1.0, 6.0]));
    }

    #[test]
    fn rank_roundtrip() {
        for r in 0..24 {
            assert_eq!(lehmer_rank(&lehmer_unrank(r)), r);
        }
    }

    #[test]
    fn bijection_over_all_states() {
        let mut hits = [0u32; STATE_COUNT];
        for rank in 0..24 {
            // perm[k] is the input position holding the k-th smallest magnitude.
            let perm = lehmer_unrank(rank);
            for signs in 0..16usize {
                let mut inputs = [0.0; 4];
                for (k, &pos) in perm.iter().enumerate() {
                    let m = (k + 1) as f64;
                    inputs[pos] = if signs >> pos & 1 == 1 { -m } else { m };
                }
                let s = encode_state(&inputs);
                assert_eq!(s.perm_rank(), rank);
                assert_eq!(s.sign_bits(), signs);
                hits[s.index()] += 1;
            }
        }
        assert!(hits.iter().all(|&h| h == 1));
    }
}
