//! Recurrent-network genome (indirect encoding).
//!
//! The network has eight input, eight hidden and eight output nodes. At each
//! step the previous output vector is the input:
//!
//! ```text
//! h' = tanh(W x + R h + b_w)
//! o[0..6] = softmax(Y h' + b_y)     gear size
//! o[6..8] = tanh(Z h' + b_z)        placement, continue/stop
//! ```
//!
//! Both `h` and `x` start as all-ones vectors.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{PlacementFlag, Step, MAX_GEARS, MIN_GEARS};
use crate::{Error, Result};

pub const NODES: usize = 8;
pub const GEAR_OUTPUTS: usize = 6;
pub const CONTROL_OUTPUTS: usize = 2;

const W_OFF: usize = 0;
const R_OFF: usize = W_OFF + NODES * NODES;
const BW_OFF: usize = R_OFF + NODES * NODES;
const Z_OFF: usize = BW_OFF + NODES;
const BZ_OFF: usize = Z_OFF + CONTROL_OUTPUTS * NODES;
const Y_OFF: usize = BZ_OFF + CONTROL_OUTPUTS;
const BY_OFF: usize = Y_OFF + GEAR_OUTPUTS * NODES;

/// Number of scalars in a flattened genome.
pub const GENOME_LEN: usize = BY_OFF + GEAR_OUTPUTS;

/// Fixed-topology RNN weights.
///
/// Flattened layout, all matrices row-major (one row per destination node):
/// `W` (8×8), `R` (8×8), `b_w` (8), `Z` (2×8), `b_z` (2), `Y` (6×8), `b_y` (6).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RnnGenome {
    genes: Vec<f64>,
}

impl RnnGenome {
    pub fn from_flat(genes: Vec<f64>) -> Result<Self> {
        if genes.len() != GENOME_LEN {
            return Err(Error::InvalidGenome(alloc::format!(
                "rnn genome needs {GENOME_LEN} scalars, got {}",
                genes.len()
            )));
        }
        if let Some(i) = genes.iter().position(|g| !g.is_finite()) {
            return Err(Error::InvalidGenome(alloc::format!("gene {i} is not finite")));
        }
        Ok(Self { genes })
    }

    pub fn zeros() -> Self {
        Self { genes: alloc::vec![0.0; GENOME_LEN] }
    }

    /// Each scalar i.i.d. uniform on [-1, 1].
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self { genes: (0..GENOME_LEN).map(|_| rng.random_range(-1.0..=1.0)).collect() }
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.genes
    }

    /// Mutable access to the flat gene vector. Callers must keep entries finite.
    pub fn genes_mut(&mut self) -> &mut [f64] {
        &mut self.genes
    }

    pub fn w(&self, row: usize, col: usize) -> f64 {
        self.genes[W_OFF + row * NODES + col]
    }

    pub fn set_w(&mut self, row: usize, col: usize, v: f64) {
        self.genes[W_OFF + row * NODES + col] = v;
    }

    pub fn set_r(&mut self, row: usize, col: usize, v: f64) {
        self.genes[R_OFF + row * NODES + col] = v;
    }

    pub fn set_bias_hidden(&mut self, row: usize, v: f64) {
        self.genes[BW_OFF + row] = v;
    }

    pub fn set_z(&mut self, row: usize, col: usize, v: f64) {
        self.genes[Z_OFF + row * NODES + col] = v;
    }

    pub fn set_bias_control(&mut self, row: usize, v: f64) {
        self.genes[BZ_OFF + row] = v;
    }

    pub fn set_y(&mut self, row: usize, col: usize, v: f64) {
        self.genes[Y_OFF + row * NODES + col] = v;
    }

    pub fn set_bias_gear(&mut self, row: usize, v: f64) {
        self.genes[BY_OFF + row] = v;
    }

    /// `M x` for the row-major matrix at `off`, plus `bias` when given.
    fn affine<const ROWS: usize>(&self, off: usize, bias: Option<usize>, x: &[f64; NODES]) -> [f64; ROWS] {
        let mut out = [0.0; ROWS];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.genes[off + i * NODES..off + (i + 1) * NODES];
            let b = bias.map_or(0.0, |b| self.genes[b + i]);
            *o = b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        out
    }
}

impl TryFrom<Vec<f64>> for RnnGenome {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::from_flat(v)
    }
}

impl From<RnnGenome> for Vec<f64> {
    fn from(g: RnnGenome) -> Self {
        g.genes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RnnState {
    pub hidden: [f64; NODES],
    pub output: [f64; NODES],
}

impl Default for RnnState {
    fn default() -> Self {
        Self { hidden: [1.0; NODES], output: [1.0; NODES] }
    }
}

/// One forward step. Returns the new state and the emitted output vector.
pub fn rnn_step(genome: &RnnGenome, state: &RnnState) -> (RnnState, [f64; NODES]) {
    let x = &state.output;
    let mut pre = genome.affine::<NODES>(W_OFF, Some(BW_OFF), x);
    let rec = genome.affine::<NODES>(R_OFF, None, &state.hidden);
    for (p, r) in pre.iter_mut().zip(rec) {
        *p += r;
    }
    let hidden = pre.map(libm::tanh);

    let logits = genome.affine::<GEAR_OUTPUTS>(Y_OFF, Some(BY_OFF), &hidden);
    let control = genome.affine::<CONTROL_OUTPUTS>(Z_OFF, Some(BZ_OFF), &hidden);

    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps = logits.map(|l| libm::exp(l - max));
    let total: f64 = exps.iter().sum();

    let mut output = [0.0; NODES];
    for (o, e) in output.iter_mut().zip(exps) {
        *o = e / total;
    }
    output[GEAR_OUTPUTS] = libm::tanh(control[0]);
    output[GEAR_OUTPUTS + 1] = libm::tanh(control[1]);
    (RnnState { hidden, output }, output)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub input: [f64; NODES],
    pub hidden: [f64; NODES],
    pub output: [f64; NODES],
    pub gear_id: u8,
    pub flag: PlacementFlag,
}

/// Per-emitted-gear activations, in step order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActivationTrace {
    pub steps: Vec<TraceStep>,
}

impl ActivationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Index of the largest gear-size output, ties to the lowest id (1-based).
fn pick_gear(output: &[f64; NODES]) -> u8 {
    let mut best = 0;
    for i in 1..GEAR_OUTPUTS {
        if output[i] > output[best] {
            best = i;
        }
    }
    best as u8 + 1
}

/// Runs the network until it stops (never before two gears, never after six).
pub fn decode(genome: &RnnGenome) -> (Vec<Step>, ActivationTrace) {
    let mut state = RnnState::default();
    let mut steps = Vec::with_capacity(MAX_GEARS);
    let mut trace = ActivationTrace::default();
    loop {
        let input = state.output;
        let (next, out) = rnn_step(genome, &state);
        let gear_id = pick_gear(&out);
        let flag = if out[GEAR_OUTPUTS] >= 0.0 { PlacementFlag::Coaxial } else { PlacementFlag::Linear };
        steps.push(Step::new(gear_id, flag));
        trace.steps.push(TraceStep { input, hidden: next.hidden, output: out, gear_id, flag });
        state = next;

        let wants_stop = out[GEAR_OUTPUTS + 1] < 0.0;
        if steps.len() >= MAX_GEARS || (wants_stop && steps.len() >= MIN_GEARS) {
            break;
        }
    }
    (steps, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn layout_adds_up() {
        assert_eq!(GENOME_LEN, 208);
        assert_eq!(BY_OFF, 202);
    }

    #[test]
    fn zero_genome_step_is_uniform() {
        let g = RnnGenome::zeros();
        let state = RnnState { hidden: [0.3; NODES], output: [-0.7; NODES] };
        let (next, out) = rnn_step(&g, &state);
        assert_eq!(next.hidden, [0.0; NODES]);
        for o in &out[..6] {
            assert_eq!(*o, 1.0 / 6.0);
        }
        assert_eq!(out[6], 0.0);
        assert_eq!(out[7], 0.0);
        assert_eq!(next.output, out);
    }

    #[test]
    fn hand_sized_case() {
        let mut g = RnnGenome::zeros();
        let b = libm::atanh(0.5);
        for i in 0..NODES {
            g.set_bias_hidden(i, b);
        }
        g.set_bias_control(0, 0.3);
        g.set_bias_control(1, -0.2);
        g.set_bias_gear(0, 1.0);
        let (next, out) = rnn_step(&g, &RnnState::default());
        for h in next.hidden {
            assert!((h - 0.5).abs() < 1e-12);
        }
        // frozen from scalar arithmetic: tanh(0.3), tanh(-0.2), e/(e+5)
        assert!((out[6] - 0.291_312_612_451_590_9).abs() < 1e-12);
        assert!((out[7] + 0.197_375_320_224_904).abs() < 1e-12);
        assert!((out[0] - 0.352_187_428_351_751_5).abs() < 1e-12);
    }

    #[test]
    fn input_weights_see_previous_output() {
        let mut g = RnnGenome::zeros();
        g.set_w(0, 0, 1.0);
        let state = RnnState { hidden: [0.0; NODES], output: [0.25; NODES] };
        let (next, _) = rnn_step(&g, &state);
        assert!((next.hidden[0] - libm::tanh(0.25)).abs() < 1e-15);
        let mut g = RnnGenome::zeros();
        g.set_r(0, 0, 1.0);
        let (next, _) = rnn_step(&g, &state);
        assert_eq!(next.hidden[0], 0.0);
    }

    #[test]
    fn zero_genome_decodes_to_six_small_coaxial_gears() {
        let (steps, trace) = decode(&RnnGenome::zeros());
        assert_eq!(steps, [Step::new(1, PlacementFlag::Coaxial); 6]);
        assert_eq!(trace.len(), 6);
    }

    #[test]
    fn early_stop_is_overridden() {
        let mut g = RnnGenome::zeros();
        g.set_bias_control(1, -1.0);
        let (steps, trace) = decode(&g);
        assert_eq!(steps.len(), 2);
        assert_eq!(trace.len(), 2);
    }

    #[test]
    fn output_is_fed_forward() {
        let mut rng = stream(3, Purpose::Fuzz, 0, 0);
        let g = RnnGenome::random(&mut rng);
        let (_, trace) = decode(&g);
        assert_eq!(trace.steps[0].input, [1.0; NODES]);
        for w in trace.steps.windows(2) {
            assert_eq!(w[1].input, w[0].output);
        }
    }

    #[test]
    fn decode_is_deterministic() {
        let mut rng = stream(11, Purpose::Fuzz, 0, 0);
        let g = RnnGenome::random(&mut rng);
        assert_eq!(decode(&g), decode(&g));
    }

    #[test]
    fn random_genome_range_and_mean() {
        let mut rng = stream(5, Purpose::Fuzz, 0, 0);
        let n = 10_000;
        let mut sums = [0.0; GENOME_LEN];
        for _ in 0..n {
            let g = RnnGenome::random(&mut rng);
            for (s, v) in sums.iter_mut().zip(g.as_flat()) {
                assert!((-1.0..=1.0).contains(v));
                *s += v;
            }
        }
        for s in sums {
            assert!((s / n as f64).abs() <= 0.05);
        }
        let a = RnnGenome::random(&mut stream(9, Purpose::Init, 0, 0));
        let b = RnnGenome::random(&mut stream(9, Purpose::Init, 0, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn from_flat_validates() {
        assert!(RnnGenome::from_flat(alloc::vec![0.0; 207]).is_err());
        let mut v = alloc::vec![0.0; GENOME_LEN];
        v[3] = f64::NAN;
        assert!(RnnGenome::from_flat(v).is_err());
    }
}
