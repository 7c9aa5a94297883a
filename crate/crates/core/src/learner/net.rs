//! The agent network: per-symbol embeddings, one gated recurrent (LSTM)
//! layer, and an affine head squashed to (0,1).
//!
//! Parameters live in one flat vector so that the optimizer, gradient
//! clipping and finite-difference checks can treat them uniformly. The
//! layout is embeddings, then input weights, recurrent weights and biases
//! for the four gates (input, forget, candidate, output), then the head.

use rand::Rng;
use thiserror::Error;

use crate::numeral::{Numeral, Symbol};
use crate::seed;

pub const EMBED_DIM: usize = 5;
pub const HIDDEN: usize = 10;
const GATES: usize = 4 * HIDDEN;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("symbol {0} has no embedding")]
    UnknownSymbol(Symbol),
}

/// Offsets of each parameter block in the flat vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    n_symbols: usize,
    wx: usize,
    wh: usize,
    bias: usize,
    head_w: usize,
    head_b: usize,
    len: usize,
}

impl Layout {
    fn new(n_symbols: usize) -> Self {
        let wx = n_symbols * EMBED_DIM;
        let wh = wx + GATES * EMBED_DIM;
        let bias = wh + GATES * HIDDEN;
        let head_w = bias + GATES;
        let head_b = head_w + HIDDEN;
        Layout {
            n_symbols,
            wx,
            wh,
            bias,
            head_w,
            head_b,
            len: head_b + 1,
        }
    }
}

/// All learnable parameters of one agent, tied to a fixed symbol alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    symbols: Vec<Symbol>,
    layout: Layout,
    theta: Vec<f64>,
}

/// Per-step activations recorded by the forward pass for backprop.
#[derive(Debug, Clone, Copy)]
struct StepCache {
    sym: usize,
    gate_i: [f64; HIDDEN],
    gate_f: [f64; HIDDEN],
    gate_g: [f64; HIDDEN],
    gate_o: [f64; HIDDEN],
    cell: [f64; HIDDEN],
    tanh_cell: [f64; HIDDEN],
    hidden: [f64; HIDDEN],
}

impl Default for StepCache {
    fn default() -> Self {
        StepCache {
            sym: 0,
            gate_i: [0.0; HIDDEN],
            gate_f: [0.0; HIDDEN],
            gate_g: [0.0; HIDDEN],
            gate_o: [0.0; HIDDEN],
            cell: [0.0; HIDDEN],
            tanh_cell: [0.0; HIDDEN],
            hidden: [0.0; HIDDEN],
        }
    }
}

/// Reusable forward tape; avoids per-item allocation in the training loop.
#[derive(Debug, Default)]
pub struct Tape {
    steps: Vec<StepCache>,
    /// Pre-squash head activation and final mean.
    head_input: f64,
    mu: f64,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl AgentParams {
    /// Fresh parameters for the given alphabet: embeddings and recurrent
    /// weights uniform in ±0.1, the head all zero so the initial mean sits
    /// at 0.5, the middle of the range.
    pub fn init<I>(alphabet: I, init_seed: u64) -> Self
    where
        I: IntoIterator<Item = Symbol>,
    {
        let mut symbols: Vec<Symbol> = alphabet.into_iter().collect();
        symbols.sort_unstable();
        symbols.dedup();
        let layout = Layout::new(symbols.len());
        let mut rng = seed::rng(init_seed);
        let mut theta = vec![0.0; layout.len];
        for slot in theta.iter_mut().take(layout.head_w) {
            *slot = rng.random_range(-0.1..0.1);
        }
        AgentParams {
            symbols,
            layout,
            theta,
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    /// Embedding row index of a symbol.
    pub fn index_of(&self, symbol: Symbol) -> Result<usize, NetError> {
        self.symbols
            .binary_search(&symbol)
            .map_err(|_| NetError::UnknownSymbol(symbol))
    }

    /// Encodes a numeral as embedding indices.
    pub fn encode(&self, numeral: &Numeral) -> Result<Vec<usize>, NetError> {
        numeral
            .symbols()
            .iter()
            .map(|&sym| self.index_of(sym))
            .collect()
    }

    /// Deterministic mean prediction in (0,1) for a numeral.
    pub fn forward(&self, numeral: &Numeral) -> Result<f64, NetError> {
        let encoded = self.encode(numeral)?;
        let mut tape = Tape::default();
        Ok(self.forward_tape(&encoded, &mut tape))
    }

    /// Forward pass over pre-encoded symbols, recording activations.
    pub fn forward_tape(&self, encoded: &[usize], tape: &mut Tape) -> f64 {
        tape.steps.clear();
        let lay = self.layout;
        let theta = &self.theta;
        let mut h_prev = [0.0; HIDDEN];
        let mut c_prev = [0.0; HIDDEN];
        for &sym in encoded {
            let x = &theta[sym * EMBED_DIM..(sym + 1) * EMBED_DIM];
            let mut z = [0.0; GATES];
            z.copy_from_slice(&theta[lay.bias..lay.bias + GATES]);
            for (row, zr) in theta[lay.wx..lay.wh].chunks_exact(EMBED_DIM).zip(&mut z) {
                let mut acc = 0.0;
                for (w, xi) in row.iter().zip(x) {
                    acc += w * xi;
                }
                *zr += acc;
            }
            for (row, zr) in theta[lay.wh..lay.bias].chunks_exact(HIDDEN).zip(&mut z) {
                let mut acc = 0.0;
                for (w, hi) in row.iter().zip(&h_prev) {
                    acc += w * hi;
                }
                *zr += acc;
            }
            let mut step = StepCache {
                sym,
                ..StepCache::default()
            };
            for j in 0..HIDDEN {
                step.gate_i[j] = sigmoid(z[j]);
                step.gate_f[j] = sigmoid(z[HIDDEN + j]);
                step.gate_g[j] = z[2 * HIDDEN + j].tanh();
                step.gate_o[j] = sigmoid(z[3 * HIDDEN + j]);
                step.cell[j] = step.gate_f[j] * c_prev[j] + step.gate_i[j] * step.gate_g[j];
                step.tanh_cell[j] = step.cell[j].tanh();
                step.hidden[j] = step.gate_o[j] * step.tanh_cell[j];
            }
            h_prev = step.hidden;
            c_prev = step.cell;
            tape.steps.push(step);
        }
        let head_w = &theta[lay.head_w..lay.head_b];
        let mut u = theta[lay.head_b];
        for (w, hi) in head_w.iter().zip(&h_prev) {
            u += w * hi;
        }
        tape.head_input = u;
        tape.mu = sigmoid(u);
        tape.mu
    }

    /// Accumulates `d_loss/d_theta` into `grad` given `d_loss/d_mu` and the
    /// tape of the corresponding forward pass. Plain backpropagation through
    /// time over the recorded steps.
    pub fn backward(&self, tape: &Tape, d_mu: f64, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.theta.len());
        let lay = self.layout;
        let theta = &self.theta;
        let steps = &tape.steps;
        let last_hidden = steps
            .last()
            .map(|s| s.hidden)
            .unwrap_or([0.0; HIDDEN]);

        let mu = tape.mu;
        let d_u = d_mu * mu * (1.0 - mu);
        grad[lay.head_b] += d_u;
        for j in 0..HIDDEN {
            grad[lay.head_w + j] += d_u * last_hidden[j];
        }
        let mut dh = [0.0; HIDDEN];
        for (j, dh_j) in dh.iter_mut().enumerate() {
            *dh_j = d_u * theta[lay.head_w + j];
        }
        let mut dc = [0.0; HIDDEN];

        for t in (0..steps.len()).rev() {
            let step = &steps[t];
            let (h_prev, c_prev) = if t > 0 {
                (steps[t - 1].hidden, steps[t - 1].cell)
            } else {
                ([0.0; HIDDEN], [0.0; HIDDEN])
            };
            let mut dz = [0.0; GATES];
            for j in 0..HIDDEN {
                let o = step.gate_o[j];
                let d_o = dh[j] * step.tanh_cell[j];
                dz[3 * HIDDEN + j] = d_o * o * (1.0 - o);
                dc[j] += dh[j] * o * (1.0 - step.tanh_cell[j] * step.tanh_cell[j]);
                let i = step.gate_i[j];
                let d_i = dc[j] * step.gate_g[j];
                dz[j] = d_i * i * (1.0 - i);
                let f = step.gate_f[j];
                let d_f = dc[j] * c_prev[j];
                dz[HIDDEN + j] = d_f * f * (1.0 - f);
                let g = step.gate_g[j];
                dz[2 * HIDDEN + j] = dc[j] * i * (1.0 - g * g);
            }
            let x_row = step.sym * EMBED_DIM;
            let mut x = [0.0; EMBED_DIM];
            x.copy_from_slice(&theta[x_row..x_row + EMBED_DIM]);
            let mut dx = [0.0; EMBED_DIM];
            let mut dh_prev = [0.0; HIDDEN];
            for (r, &dz_r) in dz.iter().enumerate() {
                let wx_row = lay.wx + r * EMBED_DIM;
                for k in 0..EMBED_DIM {
                    dx[k] += theta[wx_row + k] * dz_r;
                    grad[wx_row + k] += dz_r * x[k];
                }
                grad[lay.bias + r] += dz_r;
                let wh_row = lay.wh + r * HIDDEN;
                for k in 0..HIDDEN {
                    dh_prev[k] += theta[wh_row + k] * dz_r;
                    grad[wh_row + k] += dz_r * h_prev[k];
                }
            }
            for k in 0..EMBED_DIM {
                grad[x_row + k] += dx[k];
            }
            for j in 0..HIDDEN {
                dc[j] *= step.gate_f[j];
            }
            dh = dh_prev;
        }
    }

    /// Named parameter blocks, for per-block gradient diagnostics.
    pub fn block_ranges(&self) -> Vec<(&'static str, std::ops::Range<usize>)> {
        let lay = self.layout;
        vec![
            ("embeddings", 0..lay.wx),
            ("gates", lay.wx..lay.head_w),
            ("head", lay.head_w..lay.len),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeral::{builtin_system, BuiltinName};

    fn mandarin_params(seed: u64) -> (AgentParams, crate::numeral::NumeralSystem) {
        let sys = builtin_system(BuiltinName::Mandarin);
        let params = AgentParams::init(sys.alphabet(), seed);
        (params, sys)
    }

    #[test]
    fn zero_head_gives_midpoint_mean() {
        let (params, sys) = mandarin_params(3);
        for numeral in sys.numerals().values() {
            let mu = params.forward(numeral).unwrap();
            assert_eq!(mu, 0.5, "{numeral}");
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let (params, sys) = mandarin_params(4);
        let numeral = sys.numeral(47).unwrap();
        assert_eq!(
            params.forward(numeral).unwrap(),
            params.forward(numeral).unwrap()
        );
    }

    #[test]
    fn unknown_symbol_is_reported() {
        let (params, _) = mandarin_params(5);
        let foreign = crate::numeral::tokenize("20").unwrap();
        match params.forward(&foreign) {
            Err(NetError::UnknownSymbol(Symbol::Atom(20))) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn mean_stays_in_open_unit_interval() {
        let sys = builtin_system(BuiltinName::Mandarin);
        for draw in 0..1000u64 {
            let mut params = AgentParams::init(sys.alphabet(), draw);
            // Randomize the head too; init leaves it zero.
            let n = params.len();
            let mut rng = crate::seed::rng(draw ^ 0xabcd);
            use rand::Rng;
            for slot in params.theta_mut()[n - HIDDEN - 1..].iter_mut() {
                *slot = rng.random_range(-1.0..1.0);
            }
            for numeral in sys.numerals().values() {
                let mu = params.forward(numeral).unwrap();
                assert!(mu.is_finite() && mu > 0.0 && mu < 1.0, "{numeral}: {mu}");
            }
        }
    }

    #[test]
    fn parameter_count_is_fixed_by_alphabet() {
        let (params, _) = mandarin_params(0);
        // 12 symbols * 5 + 4*10*5 + 4*10*10 + 4*10 + 10 + 1
        assert_eq!(params.len(), 12 * 5 + 200 + 400 + 40 + 11);
    }

    /// Central finite differences over every coordinate must match the
    /// analytic gradient of mu.
    #[test]
    fn backward_matches_finite_differences_on_mu() {
        let (mut params, sys) = mandarin_params(11);
        // Non-zero head so gradients reach every block.
        let mut rng = crate::seed::rng(0xfeed);
        use rand::Rng;
        let n = params.len();
        for slot in params.theta_mut()[n - HIDDEN - 1..].iter_mut() {
            *slot = rng.random_range(-0.1..0.1);
        }
        let numeral = sys.numeral(23).unwrap(); // length 5 exercises recurrence
        let encoded = params.encode(numeral).unwrap();
        let mut tape = Tape::default();
        params.forward_tape(&encoded, &mut tape);
        let mut grad = vec![0.0; params.len()];
        params.backward(&tape, 1.0, &mut grad);

        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for idx in 0..params.len() {
            let orig = params.theta()[idx];
            params.theta_mut()[idx] = orig + h;
            let up = params.forward_tape(&encoded, &mut tape);
            params.theta_mut()[idx] = orig - h;
            let down = params.forward_tape(&encoded, &mut tape);
            params.theta_mut()[idx] = orig;
            let fd = (up - down) / (2.0 * h);
            worst = worst.max((fd - grad[idx]).abs());
        }
        assert!(worst < 1e-8, "max abs deviation {worst}");
    }
}
