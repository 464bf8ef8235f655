//! Belief propagation over the polar factor graph.
//!
//! The graph has `n + 1` columns of `N` nodes. Column 0 is the source side
//! (`u`), column `n` the channel side (`x`). The processing element (PE) of
//! stage `s` joins nodes `top` and `bottom = top + 2^s` of column `s` with
//! the same nodes of column `s + 1`, enforcing `x_top = u_top ^ u_bottom` and
//! `x_bottom = u_bottom`.
//!
//! The butterflies of the transform commute, so any stage order describes the
//! same code. With natural-order indices and no bit reversal, putting the
//! stride-1 stage on the source side is the arrangement under which BP
//! performs on par with SC; the reverse order converges to wrong codewords
//! far more often.
//!
//! One iteration is a right-going pass over stages `0..n` followed by a
//! left-going pass over stages `n-1..=0`; each pass reads the freshest
//! messages available.

use crate::code::{expect_len, polar_transform, PolarCode};
use crate::error::{Error, Result};

/// Saturation value standing in for an infinite LLR (frozen bits).
pub const INF_LLR: f64 = 1e30;

/// Scale of the normalized min-sum operator.
pub const MIN_SUM_SCALE: f64 = 0.9375;

/// Sign with `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Scaled min-sum box-plus: `0.9375 · sign(x) · sign(y) · min(|x|, |y|)`.
#[inline]
pub fn g_op(x: f64, y: f64) -> f64 {
    MIN_SUM_SCALE * sign(x) * sign(y) * x.abs().min(y.abs())
}

#[inline]
pub(crate) fn saturate(v: f64) -> f64 {
    v.clamp(-INF_LLR, INF_LLR)
}

/// Direction of a PE update. `Right` produces messages for column `s + 1`,
/// `Left` for column `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

/// A processing element: stage and its two node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeIndex {
    pub stage: usize,
    pub top: usize,
    pub bottom: usize,
}

/// The `N/2` PEs of `stage` in ascending `top` order. Stage `s` joins nodes
/// `j` and `j + 2^s`, so the source-side stage pairs adjacent nodes.
pub fn stage_pes(len: usize, stage: usize) -> impl Iterator<Item = PeIndex> {
    debug_assert!(2 << stage <= len);
    let stride = 1 << stage;
    (0..len).step_by(2 * stride).flat_map(move |block| {
        (block..block + stride).map(move |top| PeIndex {
            stage,
            top,
            bottom: top + stride,
        })
    })
}

/// Left- and right-going messages with a snapshot of the previous iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageGrid {
    len: usize,
    stages: usize,
    left: Vec<f64>,
    right: Vec<f64>,
    left_prev: Vec<f64>,
    right_prev: Vec<f64>,
    iteration: usize,
}

impl MessageGrid {
    /// Channel LLRs on the channel column, `INF_LLR` on frozen source nodes,
    /// zero elsewhere.
    pub fn new(code: &PolarCode, channel_llrs: &[f64]) -> Result<Self> {
        let len = code.len();
        expect_len(len, channel_llrs.len())?;
        let stages = code.stages();
        let size = (stages + 1) * len;
        let mut left = vec![0.0; size];
        let mut right = vec![0.0; size];
        left[stages * len..].copy_from_slice(channel_llrs);
        for (r, &frozen) in right.iter_mut().zip(code.frozen_mask()) {
            if frozen {
                *r = INF_LLR;
            }
        }
        Ok(MessageGrid {
            len,
            stages,
            left_prev: left.clone(),
            right_prev: right.clone(),
            left,
            right,
            iteration: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    /// Number of completed iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    #[inline]
    fn at(&self, column: usize, node: usize) -> usize {
        column * self.len + node
    }

    pub fn left(&self, column: usize, node: usize) -> f64 {
        self.left[self.at(column, node)]
    }

    pub fn right(&self, column: usize, node: usize) -> f64 {
        self.right[self.at(column, node)]
    }

    pub fn left_prev(&self, column: usize, node: usize) -> f64 {
        self.left_prev[self.at(column, node)]
    }

    pub fn right_prev(&self, column: usize, node: usize) -> f64 {
        self.right_prev[self.at(column, node)]
    }

    pub fn left_column(&self, column: usize) -> &[f64] {
        &self.left[column * self.len..(column + 1) * self.len]
    }

    pub fn right_column(&self, column: usize) -> &[f64] {
        &self.right[column * self.len..(column + 1) * self.len]
    }

    /// True when no entry is NaN and every entry lies in `[-INF_LLR, INF_LLR]`.
    pub fn is_well_formed(&self) -> bool {
        self.left
            .iter()
            .chain(&self.right)
            .all(|v| !v.is_nan() && v.abs() <= INF_LLR)
    }

    /// The four operands of a directional update.
    ///
    /// `Right`: `[R(s,top), R(s,bottom), L(s+1,top), L(s+1,bottom)]`;
    /// `Left`: `[L(s+1,top), L(s+1,bottom), R(s,top), R(s,bottom)]`.
    pub fn pe_inputs(&self, pe: PeIndex, direction: Direction) -> [f64; 4] {
        let (a, b) = (self.at(pe.stage, pe.top), self.at(pe.stage, pe.bottom));
        let (c, d) = (self.at(pe.stage + 1, pe.top), self.at(pe.stage + 1, pe.bottom));
        match direction {
            Direction::Right => [self.right[a], self.right[b], self.left[c], self.left[d]],
            Direction::Left => [self.left[c], self.left[d], self.right[a], self.right[b]],
        }
    }

    /// Current values of the two messages a directional update writes.
    pub fn pe_outputs(&self, pe: PeIndex, direction: Direction) -> [f64; 2] {
        let (src, col) = match direction {
            Direction::Right => (&self.right, pe.stage + 1),
            Direction::Left => (&self.left, pe.stage),
        };
        [src[self.at(col, pe.top)], src[self.at(col, pe.bottom)]]
    }

    /// Values of the same two messages at the end of the previous iteration.
    pub fn pe_previous_outputs(&self, pe: PeIndex, direction: Direction) -> [f64; 2] {
        let (src, col) = match direction {
            Direction::Right => (&self.right_prev, pe.stage + 1),
            Direction::Left => (&self.left_prev, pe.stage),
        };
        [src[self.at(col, pe.top)], src[self.at(col, pe.bottom)]]
    }

    fn store(&mut self, pe: PeIndex, direction: Direction, out: [f64; 2]) {
        let (dst, col) = match direction {
            Direction::Right => (&mut self.right, pe.stage + 1),
            Direction::Left => (&mut self.left, pe.stage),
        };
        dst[col * self.len + pe.top] = out[0];
        dst[col * self.len + pe.bottom] = out[1];
    }

    fn snapshot(&mut self) {
        self.left_prev.copy_from_slice(&self.left);
        self.right_prev.copy_from_slice(&self.right);
    }
}

/// One directional PE update with its inputs scaled by `weights`.
///
/// With `weights = [w0, w1]`:
/// `Right`: `[g(w0 Ra, w0 (Ld + Rb)), g(w1 Lc, w1 Ra) + w1 Rb]`;
/// `Left`: `[g(w0 Lc, w0 (Ld + Rb)), g(w1 Lc, w1 Ra) + w1 Ld]`.
#[inline]
pub fn directional_update(direction: Direction, inputs: &[f64; 4], weights: [f64; 2]) -> [f64; 2] {
    let [w0, w1] = weights;
    match direction {
        Direction::Right => {
            let [ra, rb, lc, ld] = *inputs;
            [
                saturate(g_op(w0 * ra, w0 * (ld + rb))),
                saturate(g_op(w1 * lc, w1 * ra) + w1 * rb),
            ]
        }
        Direction::Left => {
            let [lc, ld, ra, rb] = *inputs;
            [
                saturate(g_op(w0 * lc, w0 * (ld + rb))),
                saturate(g_op(w1 * lc, w1 * ra) + w1 * ld),
            ]
        }
    }
}

/// Unweighted update of one PE from the grid's current values, returned as
/// `[L(s,top), L(s,bottom), R(s+1,top), R(s+1,bottom)]`. Does not modify the
/// grid.
pub fn pe_update_standard(grid: &MessageGrid, pe: PeIndex) -> [f64; 4] {
    let [la, lb] = directional_update(Direction::Left, &grid.pe_inputs(pe, Direction::Left), [1.0; 2]);
    let [rc, rd] =
        directional_update(Direction::Right, &grid.pe_inputs(pe, Direction::Right), [1.0; 2]);
    [la, lb, rc, rd]
}

/// Hard decisions on the source and channel columns; a zero sum decides 1.
pub fn hard_decide(grid: &MessageGrid) -> (Vec<u8>, Vec<u8>) {
    let mut u = vec![0; grid.len];
    let mut x = vec![0; grid.len];
    hard_decide_into(grid, &mut u, &mut x);
    (u, x)
}

fn hard_decide_into(grid: &MessageGrid, u: &mut [u8], x: &mut [u8]) {
    let decide = |l: &[f64], r: &[f64], out: &mut [u8]| {
        for ((o, a), b) in out.iter_mut().zip(l).zip(r) {
            *o = u8::from(a + b <= 0.0);
        }
    };
    decide(grid.left_column(0), grid.right_column(0), u);
    decide(
        grid.left_column(grid.stages),
        grid.right_column(grid.stages),
        x,
    );
}

/// Where a directional update happens, passed to a [`Reweighting`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub pe: PeIndex,
    /// Dense index of the PE over all stages, `stage * N/2 + ordinal`.
    pub slot: usize,
    pub direction: Direction,
    /// 1-based iteration number.
    pub iteration: usize,
}

/// Per-update input weights for the BP engine.
///
/// Consulted from the second iteration on, after the unweighted
/// (provisional) outputs have been computed. Returning `[1.0, 1.0]` keeps the
/// provisional outputs.
pub trait Reweighting {
    fn weights(
        &mut self,
        site: &Site,
        inputs: &[f64; 4],
        provisional: &[f64; 2],
        previous: &[f64; 2],
    ) -> [f64; 2];
}

/// Plain BP.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unweighted;

impl Reweighting for Unweighted {
    #[inline]
    fn weights(&mut self, _: &Site, _: &[f64; 4], _: &[f64; 2], _: &[f64; 2]) -> [f64; 2] {
        [1.0, 1.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BpOptions {
    pub t_max: usize,
    pub early_stop: bool,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions {
            t_max: 60,
            early_stop: true,
        }
    }
}

/// Full result of an engine run.
#[derive(Debug, Clone, PartialEq)]
pub struct BpRun {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
    pub iterations: usize,
    /// `encode(u_hat) == x_hat` at exit.
    pub converged: bool,
}

/// Decoder output restricted to the information set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpOutput {
    pub info_bits: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
}

/// Runs BP with a reweighting policy. `observer` sees the grid after every
/// iteration.
pub fn run_bp<W, F>(
    code: &PolarCode,
    channel_llrs: &[f64],
    options: BpOptions,
    weighting: &mut W,
    mut observer: F,
) -> Result<BpRun>
where
    W: Reweighting + ?Sized,
    F: FnMut(&MessageGrid),
{
    if options.t_max == 0 {
        return Err(Error::IterationCap);
    }
    let mut grid = MessageGrid::new(code, channel_llrs)?;
    let len = code.len();
    let stages = code.stages();
    let mut u_hat = vec![0u8; len];
    let mut x_hat = vec![0u8; len];
    let mut reencoded = vec![0u8; len];
    let mut converged = false;

    for t in 1..=options.t_max {
        grid.snapshot();
        grid.iteration = t;
        for stage in 0..stages {
            sweep_stage(&mut grid, stage, Direction::Right, t, weighting);
        }
        for stage in (0..stages).rev() {
            sweep_stage(&mut grid, stage, Direction::Left, t, weighting);
        }
        observer(&grid);

        hard_decide_into(&grid, &mut u_hat, &mut x_hat);
        reencoded.copy_from_slice(&u_hat);
        polar_transform(&mut reencoded);
        converged = reencoded == x_hat;
        if options.early_stop && converged {
            break;
        }
    }
    Ok(BpRun {
        u_hat,
        x_hat,
        iterations: grid.iteration,
        converged,
    })
}

fn sweep_stage<W: Reweighting + ?Sized>(
    grid: &mut MessageGrid,
    stage: usize,
    direction: Direction,
    t: usize,
    weighting: &mut W,
) {
    let half = grid.len / 2;
    for (ordinal, pe) in stage_pes(grid.len, stage).enumerate() {
        let inputs = grid.pe_inputs(pe, direction);
        let provisional = directional_update(direction, &inputs, [1.0, 1.0]);
        let out = if t >= 2 {
            let site = Site {
                pe,
                slot: stage * half + ordinal,
                direction,
                iteration: t,
            };
            let previous = grid.pe_previous_outputs(pe, direction);
            let w = weighting.weights(&site, &inputs, &provisional, &previous);
            if w == [1.0, 1.0] {
                provisional
            } else {
                directional_update(direction, &inputs, w)
            }
        } else {
            provisional
        };
        grid.store(pe, direction, out);
    }
}

/// Standard BP decoding; returns the information bits of `u_hat`.
pub fn bp_decode(
    code: &PolarCode,
    channel_llrs: &[f64],
    t_max: usize,
    early_stop: bool,
) -> Result<BpOutput> {
    let run = run_bp(
        code,
        channel_llrs,
        BpOptions { t_max, early_stop },
        &mut Unweighted,
        |_| {},
    )?;
    Ok(BpOutput {
        info_bits: code.extract_info_bits(&run.u_hat),
        iterations: run.iterations,
        converged: run.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g_examples() {
        assert_eq!(g_op(5.0, -3.0), -2.8125);
        assert_eq!(g_op(0.0, 7.0), 0.0);
        assert_eq!(g_op(0.0, -7.0), 0.0);
        assert_eq!(g_op(INF_LLR, 4.0), 3.75);
    }

    #[test]
    fn pe_enumeration_covers_each_stage() {
        for len in [2usize, 8, 64] {
            let stages = len.trailing_zeros() as usize;
            for s in 0..stages {
                let pes: Vec<_> = stage_pes(len, s).collect();
                assert_eq!(pes.len(), len / 2);
                let mut seen = vec![0; len];
                for pe in &pes {
                    let stride = 1 << s;
                    assert_eq!(pe.top & stride, 0);
                    assert_eq!(pe.bottom, pe.top + stride);
                    seen[pe.top] += 1;
                    seen[pe.bottom] += 1;
                }
                assert!(seen.iter().all(|&c| c == 1));
            }
        }
    }

    #[test]
    fn grid_initialization() {
        let code = PolarCode::from_info_set(8, vec![3, 5, 6, 7]).unwrap();
        let llrs = [1.5, -0.7, 2.2, 0.4, -1.1, 0.9, -0.3, 1.8];
        let grid = MessageGrid::new(&code, &llrs).unwrap();
        assert_eq!(grid.left_column(3), &llrs);
        for j in 0..8 {
            let expected = if code.is_frozen(j) { INF_LLR } else { 0.0 };
            assert_eq!(grid.right(0, j), expected);
        }
        assert!(grid.left_column(0).iter().all(|&v| v == 0.0));
        assert_eq!(grid.iteration(), 0);
        assert!(MessageGrid::new(&code, &llrs[..4]).is_err());
    }

    #[test]
    fn zero_messages_stay_zero() {
        let code = PolarCode::from_info_set(4, vec![0, 1, 2, 3]).unwrap();
        let grid = MessageGrid::new(&code, &[0.0; 4]).unwrap();
        for s in 0..2 {
            for pe in stage_pes(4, s) {
                assert_eq!(pe_update_standard(&grid, pe), [0.0; 4]);
            }
        }
    }

    #[test]
    fn frozen_input_saturation() {
        let inputs = [INF_LLR, 0.5, 2.0, -1.25];
        let out = directional_update(Direction::Right, &inputs, [1.0, 1.0]);
        assert_eq!(out[0], MIN_SUM_SCALE * -1.0 * (-1.25f64 + 0.5).abs());
    }

    #[test]
    fn hard_decision_ties_decide_one() {
        let code = PolarCode::from_info_set(2, vec![0, 1]).unwrap();
        let mut grid = MessageGrid::new(&code, &[3.0, -0.1]).unwrap();
        let (_, x) = hard_decide(&grid);
        assert_eq!(x, vec![0, 1]);
        grid.left[0] = 0.0;
        grid.left[1] = -0.0;
        let (u, _) = hard_decide(&grid);
        assert_eq!(u, vec![1, 1]);
    }

    /// First-iteration grid for the N=8 code with info set {3,5,6,7}, from a
    /// standalone trace written with 1-based indices.
    #[test]
    fn first_iteration_trace_n8() {
        let code = PolarCode::from_info_set(8, vec![3, 5, 6, 7]).unwrap();
        let llrs = [1.5, -0.7, 2.2, 0.4, -1.1, 0.9, -0.3, 1.8];
        let mut grid = None;
        run_bp(
            &code,
            &llrs,
            BpOptions { t_max: 1, early_stop: false },
            &mut Unweighted,
            |g| grid = Some(g.clone()),
        )
        .unwrap();
        let grid = grid.unwrap();
        let left: [[f64; 8]; 4] = [
            [0.2471923828125, -0.1043701171875, 0.2252197265625, -1.4102783203125, 0.263671875, 1.107421875, -0.28125, 1.8],
            [0.263671875, -0.3515625, -1.248046875, -0.240234375, 0.28125, 0.84375, -0.3, 1.8],
            [-1.03125, -0.65625, -0.28125, 0.375, -1.1, 0.9, -0.3, 1.8],
            llrs,
        ];
        let right: [[f64; 8]; 4] = [
            [INF_LLR, INF_LLR, INF_LLR, 0.0, INF_LLR, 0.0, 0.0, 0.0],
            [9.375e+29, INF_LLR, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        for c in 0..4 {
            for j in 0..8 {
                assert!((grid.left(c, j) - left[c][j]).abs() < 1e-12, "L[{c}][{j}]");
                let r = right[c][j];
                assert!((grid.right(c, j) - r).abs() <= 1e-12 * r.abs().max(1.0), "R[{c}][{j}]");
            }
        }
    }

    #[test]
    fn noiseless_decodes_exactly() {
        let code = PolarCode::construct(64, 32, 2.0).unwrap();
        let info: Vec<u8> = (0..32).map(|i| (i * 7 % 3 == 0) as u8).collect();
        let x = code.encode(&code.place_info_bits(&info).unwrap()).unwrap();
        let sigma: f64 = 1e-6;
        let llrs: Vec<f64> = x.iter().map(|&b| 2.0 * (1.0 - 2.0 * b as f64) / (sigma * sigma)).collect();
        let out = bp_decode(&code, &llrs, 60, true).unwrap();
        assert_eq!(out.info_bits, info);
        assert!(out.converged);
    }

    #[test]
    fn all_frozen_code_decodes_to_nothing() {
        let code = PolarCode::construct(16, 0, 2.0).unwrap();
        let out = bp_decode(&code, &[-0.3; 16], 10, true).unwrap();
        assert!(out.info_bits.is_empty());
        assert!(out.converged);
    }

    #[test]
    fn rejects_zero_iteration_cap() {
        let code = PolarCode::construct(4, 2, 2.0).unwrap();
        assert!(matches!(bp_decode(&code, &[1.0; 4], 0, true), Err(Error::IterationCap)));
    }

    fn llr() -> impl Strategy<Value = f64> {
        prop_oneof![
            8 => -50.0f64..50.0,
            1 => Just(INF_LLR),
            1 => Just(-INF_LLR),
            1 => Just(0.0),
        ]
    }

    proptest! {
        #[test]
        fn g_laws(x in llr(), y in llr()) {
            prop_assert_eq!(g_op(x, y), g_op(y, x));
            prop_assert_eq!(g_op(x, y).abs(), MIN_SUM_SCALE * x.abs().min(y.abs()));
            if x != 0.0 && y != 0.0 {
                prop_assert_eq!(sign(g_op(x, y)), sign(x) * sign(y));
            }
        }

        #[test]
        fn grid_never_holds_nan(llrs in proptest::collection::vec(llr(), 16), t in 1usize..20) {
            let code = PolarCode::construct(16, 8, 1.0).unwrap();
            let mut ok = true;
            let run = run_bp(&code, &llrs, BpOptions { t_max: t, early_stop: true }, &mut Unweighted, |g| ok &= g.is_well_formed()).unwrap();
            prop_assert!(ok);
            if run.converged {
                prop_assert_eq!(code.encode(&run.u_hat).unwrap(), run.x_hat);
            }
        }
    }
}
