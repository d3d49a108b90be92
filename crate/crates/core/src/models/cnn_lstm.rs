//! Conv1d(k, same) → ReLU → Conv1d(k, same) → ReLU → LSTM → affine head,
//! with a hand-written backward pass.
//!
//! Parameters live in one flat vector; [`CnnLstmWeights::layout`] names the
//! tensors in storage order:
//!
//! | name           | shape         |
//! |----------------|---------------|
//! | `conv1.weight` | `[F1, C, K]`  |
//! | `conv1.bias`   | `[F1]`        |
//! | `conv2.weight` | `[F2, F1, K]` |
//! | `conv2.bias`   | `[F2]`        |
//! | `lstm.w_ih`    | `[4H, F2]`    |
//! | `lstm.w_hh`    | `[4H, H]`     |
//! | `lstm.bias`    | `[4H]`        |
//! | `head.weight`  | `[H]`         |
//! | `head.bias`    | `[1]`         |
//!
//! LSTM gate rows are ordered input, forget, cell, output. Convolutions are
//! cross-correlations with zero padding `K / 2` on both sides.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dd::{Dd, Real};
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnnLstmConfig {
    pub in_channels: usize,
    pub conv1_channels: usize,
    pub conv2_channels: usize,
    pub kernel: usize,
    pub hidden: usize,
    pub seed: u64,
}

impl CnnLstmConfig {
    /// 16/32 conv channels, kernel 3, 32 hidden units.
    pub fn new(in_channels: usize, seed: u64) -> Self {
        CnnLstmConfig {
            in_channels,
            conv1_channels: 16,
            conv2_channels: 32,
            kernel: 3,
            hidden: 32,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let sizes = [
            self.in_channels,
            self.conv1_channels,
            self.conv2_channels,
            self.hidden,
        ];
        if sizes.contains(&0) {
            return Err(ModelError::InvalidConfig(
                "layer sizes must be positive".into(),
            ));
        }
        if self.kernel % 2 == 0 {
            return Err(ModelError::InvalidConfig(
                "kernel must be odd for same padding".into(),
            ));
        }
        Ok(())
    }
}

/// Named tensor in the flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub shape: Vec<usize>,
    pub offset: usize,
}

impl ParamSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy)]
struct Offsets {
    c1w: usize,
    c1b: usize,
    c2w: usize,
    c2b: usize,
    wih: usize,
    whh: usize,
    bias: usize,
    hw: usize,
    hb: usize,
    total: usize,
}

impl Offsets {
    fn new(cfg: &CnnLstmConfig) -> Self {
        let (c, f1, f2, k, h) = (
            cfg.in_channels,
            cfg.conv1_channels,
            cfg.conv2_channels,
            cfg.kernel,
            cfg.hidden,
        );
        let c1w = 0;
        let c1b = c1w + f1 * c * k;
        let c2w = c1b + f1;
        let c2b = c2w + f2 * f1 * k;
        let wih = c2b + f2;
        let whh = wih + 4 * h * f2;
        let bias = whh + 4 * h * h;
        let hw = bias + 4 * h;
        let hb = hw + h;
        Offsets {
            c1w,
            c1b,
            c2w,
            c2b,
            wih,
            whh,
            bias,
            hw,
            hb,
            total: hb + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnLstmWeights {
    cfg: CnnLstmConfig,
    params: Vec<f64>,
}

impl CnnLstmWeights {
    pub fn layout(cfg: &CnnLstmConfig) -> Vec<ParamSpec> {
        let o = Offsets::new(cfg);
        let (c, f1, f2, k, h) = (
            cfg.in_channels,
            cfg.conv1_channels,
            cfg.conv2_channels,
            cfg.kernel,
            cfg.hidden,
        );
        vec![
            ParamSpec {
                name: "conv1.weight",
                shape: vec![f1, c, k],
                offset: o.c1w,
            },
            ParamSpec {
                name: "conv1.bias",
                shape: vec![f1],
                offset: o.c1b,
            },
            ParamSpec {
                name: "conv2.weight",
                shape: vec![f2, f1, k],
                offset: o.c2w,
            },
            ParamSpec {
                name: "conv2.bias",
                shape: vec![f2],
                offset: o.c2b,
            },
            ParamSpec {
                name: "lstm.w_ih",
                shape: vec![4 * h, f2],
                offset: o.wih,
            },
            ParamSpec {
                name: "lstm.w_hh",
                shape: vec![4 * h, h],
                offset: o.whh,
            },
            ParamSpec {
                name: "lstm.bias",
                shape: vec![4 * h],
                offset: o.bias,
            },
            ParamSpec {
                name: "head.weight",
                shape: vec![h],
                offset: o.hw,
            },
            ParamSpec {
                name: "head.bias",
                shape: vec![1],
                offset: o.hb,
            },
        ]
    }

    pub fn param_count(cfg: &CnnLstmConfig) -> usize {
        Offsets::new(cfg).total
    }

    /// Wraps a flat parameter vector laid out as in [`Self::layout`].
    pub fn from_params(cfg: CnnLstmConfig, params: Vec<f64>) -> Result<Self, ModelError> {
        cfg.validate()?;
        let expected = Self::param_count(&cfg);
        if params.len() != expected {
            return Err(ModelError::ShapeMismatch {
                expected,
                got: params.len(),
            });
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Numerical("non-finite parameter".into()));
        }
        Ok(CnnLstmWeights { cfg, params })
    }

    pub fn zeros(cfg: CnnLstmConfig) -> Result<Self, ModelError> {
        let n = Self::param_count(&cfg);
        Self::from_params(cfg, vec![0.0; n])
    }

    pub fn config(&self) -> &CnnLstmConfig {
        &self.cfg
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        Self::layout(&self.cfg)
            .into_iter()
            .find(|s| s.name == name)
            .map(|s| &self.params[s.offset..s.offset + s.len()])
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        let spec = Self::layout(&self.cfg)
            .into_iter()
            .find(|s| s.name == name)?;
        Some(&mut self.params[spec.offset..spec.offset + spec.len()])
    }
}

/// Uniform `±1/√fan_in` per layer, drawn in layout order from a ChaCha8
/// stream seeded with `cfg.seed`. Convolutions use `in_channels × kernel` as
/// fan-in; the LSTM and head use the hidden size.
pub fn init_cnn_lstm(cfg: &CnnLstmConfig) -> Result<CnnLstmWeights, ModelError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let conv1 = 1.0 / ((cfg.in_channels * cfg.kernel) as f64).sqrt();
    let conv2 = 1.0 / ((cfg.conv1_channels * cfg.kernel) as f64).sqrt();
    let rec = 1.0 / (cfg.hidden as f64).sqrt();
    let mut params = Vec::with_capacity(CnnLstmWeights::param_count(cfg));
    for spec in CnnLstmWeights::layout(cfg) {
        let bound = match spec.name {
            "conv1.weight" | "conv1.bias" => conv1,
            "conv2.weight" | "conv2.bias" => conv2,
            _ => rec,
        };
        params.extend((0..spec.len()).map(|_| rng.gen_range(-bound..bound)));
    }
    CnnLstmWeights::from_params(*cfg, params)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations of one forward pass, kept for the backward pass. Buffers are
/// reused across samples.
#[derive(Debug, Default, Clone)]
pub(crate) struct Workspace {
    steps: usize,
    input: Vec<f64>,
    pre1: Vec<f64>,
    act1: Vec<f64>,
    pre2: Vec<f64>,
    // conv2 output, time-major [T, F2]
    seq: Vec<f64>,
    // gate activations, [T, 4H]
    gates: Vec<f64>,
    // cell and hidden states, [T + 1, H]; row 0 is the zero initial state
    cell: Vec<f64>,
    hid: Vec<f64>,
    tanh_c: Vec<f64>,
    // backward scratch
    d_seq: Vec<f64>,
    d_act1: Vec<f64>,
    dz: Vec<f64>,
    dh: Vec<f64>,
    dc: Vec<f64>,
}

impl CnnLstmWeights {
    fn offsets(&self) -> Offsets {
        Offsets::new(&self.cfg)
    }

    /// Forward pass for one `C × T` channel-major window.
    pub(crate) fn forward_ws(&self, x: &[f64], ws: &mut Workspace) -> f64 {
        let cfg = &self.cfg;
        let o = self.offsets();
        let p = &self.params;
        let (c_in, f1, f2, k, h) = (
            cfg.in_channels,
            cfg.conv1_channels,
            cfg.conv2_channels,
            cfg.kernel,
            cfg.hidden,
        );
        let t_len = x.len() / c_in;
        let pad = k / 2;
        ws.steps = t_len;
        ws.input.clear();
        ws.input.extend_from_slice(x);
        ws.pre1.resize(f1 * t_len, 0.0);
        ws.act1.resize(f1 * t_len, 0.0);
        ws.pre2.resize(f2 * t_len, 0.0);
        ws.seq.resize(t_len * f2, 0.0);
        ws.gates.resize(t_len * 4 * h, 0.0);
        ws.cell.resize((t_len + 1) * h, 0.0);
        ws.hid.resize((t_len + 1) * h, 0.0);
        ws.tanh_c.resize(t_len * h, 0.0);

        conv_same(
            &p[o.c1w..o.c1b],
            &p[o.c1b..o.c2w],
            x,
            c_in,
            f1,
            k,
            t_len,
            pad,
            &mut ws.pre1,
        );
        for (a, z) in ws.act1.iter_mut().zip(&ws.pre1) {
            *a = z.max(0.0);
        }
        conv_same(
            &p[o.c2w..o.c2b],
            &p[o.c2b..o.wih],
            &ws.act1,
            f1,
            f2,
            k,
            t_len,
            pad,
            &mut ws.pre2,
        );
        for f in 0..f2 {
            for t in 0..t_len {
                ws.seq[t * f2 + f] = ws.pre2[f * t_len + t].max(0.0);
            }
        }

        let w_ih = &p[o.wih..o.whh];
        let w_hh = &p[o.whh..o.bias];
        let bias = &p[o.bias..o.hw];
        ws.cell[..h].fill(0.0);
        ws.hid[..h].fill(0.0);
        for t in 0..t_len {
            let xt = &ws.seq[t * f2..(t + 1) * f2];
            let h_prev = &ws.hid[t * h..(t + 1) * h];
            let z = &mut ws.gates[t * 4 * h..(t + 1) * 4 * h];
            for r in 0..4 * h {
                let wi = &w_ih[r * f2..(r + 1) * f2];
                let wh = &w_hh[r * h..(r + 1) * h];
                z[r] = bias[r] + dot(wi, xt) + dot(wh, h_prev);
            }
            for j in 0..h {
                z[j] = sigmoid(z[j]);
                z[h + j] = sigmoid(z[h + j]);
                z[2 * h + j] = z[2 * h + j].tanh();
                z[3 * h + j] = sigmoid(z[3 * h + j]);
            }
            for j in 0..h {
                let c = z[h + j] * ws.cell[t * h + j] + z[j] * z[2 * h + j];
                let tc = c.tanh();
                ws.cell[(t + 1) * h + j] = c;
                ws.tanh_c[t * h + j] = tc;
                ws.hid[(t + 1) * h + j] = z[3 * h + j] * tc;
            }
        }
        let h_last = &ws.hid[t_len * h..(t_len + 1) * h];
        dot(&p[o.hw..o.hb], h_last) + p[o.hb]
    }

    /// Accumulates `dy · ∂y/∂θ` into `grad` for the pass stored in `ws`.
    /// `drop_carry` removes the forget-gate path from the cell-state
    /// recursion; it exists only to exercise the gradient checker.
    pub(crate) fn backward_ws(
        &self,
        ws: &mut Workspace,
        dy: f64,
        grad: &mut [f64],
        drop_carry: bool,
    ) {
        let cfg = &self.cfg;
        let o = self.offsets();
        let p = &self.params;
        let (c_in, f1, f2, k, h) = (
            cfg.in_channels,
            cfg.conv1_channels,
            cfg.conv2_channels,
            cfg.kernel,
            cfg.hidden,
        );
        let t_len = ws.steps;
        let pad = k / 2;

        let h_last = &ws.hid[t_len * h..(t_len + 1) * h];
        for j in 0..h {
            grad[o.hw + j] += dy * h_last[j];
        }
        grad[o.hb] += dy;

        ws.dh.clear();
        ws.dh.extend(p[o.hw..o.hb].iter().map(|w| dy * w));
        ws.dc.clear();
        ws.dc.resize(h, 0.0);
        ws.dz.resize(4 * h, 0.0);
        ws.d_seq.clear();
        ws.d_seq.resize(t_len * f2, 0.0);
        let w_ih = &p[o.wih..o.whh];
        let w_hh = &p[o.whh..o.bias];

        for t in (0..t_len).rev() {
            let z = &ws.gates[t * 4 * h..(t + 1) * 4 * h];
            let c_prev = &ws.cell[t * h..(t + 1) * h];
            for j in 0..h {
                let (i, f, g, og) = (z[j], z[h + j], z[2 * h + j], z[3 * h + j]);
                let tc = ws.tanh_c[t * h + j];
                let dh = ws.dh[j];
                let dc = ws.dc[j] + dh * og * (1.0 - tc * tc);
                ws.dz[j] = dc * g * i * (1.0 - i);
                ws.dz[h + j] = dc * c_prev[j] * f * (1.0 - f);
                ws.dz[2 * h + j] = dc * i * (1.0 - g * g);
                ws.dz[3 * h + j] = dh * tc * og * (1.0 - og);
                ws.dc[j] = if drop_carry { 0.0 } else { dc * f };
            }
            let xt = &ws.seq[t * f2..(t + 1) * f2];
            let h_prev = &ws.hid[t * h..(t + 1) * h];
            ws.dh.fill(0.0);
            let dxt = &mut ws.d_seq[t * f2..(t + 1) * f2];
            for r in 0..4 * h {
                let dzr = ws.dz[r];
                if dzr == 0.0 {
                    continue;
                }
                grad[o.bias + r] += dzr;
                let gi = &mut grad[o.wih + r * f2..o.wih + (r + 1) * f2];
                axpy(dzr, xt, gi);
                let gh = &mut grad[o.whh + r * h..o.whh + (r + 1) * h];
                axpy(dzr, h_prev, gh);
                axpy(dzr, &w_ih[r * f2..(r + 1) * f2], dxt);
                axpy(dzr, &w_hh[r * h..(r + 1) * h], &mut ws.dh);
            }
        }

        // conv2: gradient w.r.t. its pre-activation, stored channel-major in pre2's shape
        let mut d_pre2 = std::mem::take(&mut ws.pre2);
        for f in 0..f2 {
            for t in 0..t_len {
                let idx = f * t_len + t;
                d_pre2[idx] = if d_pre2[idx] > 0.0 {
                    ws.d_seq[t * f2 + f]
                } else {
                    0.0
                };
            }
        }
        ws.d_act1.clear();
        ws.d_act1.resize(f1 * t_len, 0.0);
        conv_same_backward(
            &p[o.c2w..o.c2b],
            &ws.act1,
            &d_pre2,
            f1,
            f2,
            k,
            t_len,
            pad,
            &mut grad[o.c2w..o.wih],
            Some(&mut ws.d_act1),
        );
        ws.pre2 = d_pre2;
        // pre2 now holds gradients; the next forward pass overwrites it

        let mut d_pre1 = std::mem::take(&mut ws.d_act1);
        for (d, z) in d_pre1.iter_mut().zip(&ws.pre1) {
            if *z <= 0.0 {
                *d = 0.0;
            }
        }
        conv_same_backward(
            &p[o.c1w..o.c1b],
            &ws.input,
            &d_pre1,
            c_in,
            f1,
            k,
            t_len,
            pad,
            &mut grad[o.c1w..o.c2w],
            None,
        );
        ws.d_act1 = d_pre1;
    }

    /// One prediction per window.
    pub fn forward(&self, batch: &[&[f64]]) -> Result<Vec<f64>, ModelError> {
        let mut ws = Workspace::default();
        batch
            .iter()
            .map(|x| {
                self.check_input(x)?;
                Ok(self.forward_ws(x, &mut ws))
            })
            .collect()
    }

    pub(crate) fn check_input(&self, x: &[f64]) -> Result<(), ModelError> {
        let c = self.cfg.in_channels;
        if x.is_empty() || x.len() % c != 0 {
            return Err(ModelError::ShapeMismatch {
                expected: c,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Numerical("non-finite input".into()));
        }
        Ok(())
    }
}

pub fn cnn_lstm_forward(w: &CnnLstmWeights, batch: &[&[f64]]) -> Result<Vec<f64>, ModelError> {
    w.forward(batch)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out[f, t] = b[f] + Σ_c Σ_k w[f, c, k] · x[c, t + k - pad]`, zero outside.
#[allow(clippy::too_many_arguments)]
fn conv_same(
    w: &[f64],
    b: &[f64],
    x: &[f64],
    c_in: usize,
    c_out: usize,
    k: usize,
    t_len: usize,
    pad: usize,
    out: &mut [f64],
) {
    for f in 0..c_out {
        let row = &mut out[f * t_len..(f + 1) * t_len];
        row.fill(b[f]);
        for c in 0..c_in {
            let xc = &x[c * t_len..(c + 1) * t_len];
            for kk in 0..k {
                let wv = w[(f * c_in + c) * k + kk];
                // t + kk - pad in [0, t_len)
                let lo = pad.saturating_sub(kk);
                let hi = (t_len + pad).saturating_sub(kk).min(t_len);
                for t in lo..hi {
                    row[t] += wv * xc[t + kk - pad];
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn conv_same_backward(
    w: &[f64],
    x: &[f64],
    d_out: &[f64],
    c_in: usize,
    c_out: usize,
    k: usize,
    t_len: usize,
    pad: usize,
    grad: &mut [f64],
    mut d_x: Option<&mut Vec<f64>>,
) {
    let bias_off = c_out * c_in * k;
    for f in 0..c_out {
        let d_row = &d_out[f * t_len..(f + 1) * t_len];
        grad[bias_off + f] += d_row.iter().sum::<f64>();
        for c in 0..c_in {
            let xc = &x[c * t_len..(c + 1) * t_len];
            for kk in 0..k {
                let lo = pad.saturating_sub(kk);
                let hi = (t_len + pad).saturating_sub(kk).min(t_len);
                let widx = (f * c_in + c) * k + kk;
                let mut acc = 0.0;
                for t in lo..hi {
                    acc += d_row[t] * xc[t + kk - pad];
                }
                grad[widx] += acc;
                if let Some(dx) = d_x.as_deref_mut() {
                    let wv = w[widx];
                    let dxc = &mut dx[c * t_len..(c + 1) * t_len];
                    for t in lo..hi {
                        dxc[t + kk - pad] += wv * d_row[t];
                    }
                }
            }
        }
    }
}

/// Squared error `(y - target)²` of one window and its full parameter gradient.
pub fn loss_and_gradient(
    w: &CnnLstmWeights,
    x: &[f64],
    target: f64,
) -> Result<(f64, Vec<f64>), ModelError> {
    w.check_input(x)?;
    let mut ws = Workspace::default();
    let y = w.forward_ws(x, &mut ws);
    let mut grad = vec![0.0; w.params.len()];
    w.backward_ws(&mut ws, 2.0 * (y - target), &mut grad, false);
    Ok(((y - target).powi(2), grad))
}

/// Max over all parameters of `|g_a - g_n| / max(|g_a| + |g_n|, 1e-8)`,
/// with `g_n` the central difference `(L(θ+ε) - L(θ-ε)) / 2ε` of the squared
/// error `L = (y - target)²`.
///
/// Differences are first taken in f64. Where that disagrees with the
/// analytic value by more than [`REFINE_ABOVE`], f64 roundoff in the forward
/// pass (a few ulps of `y`, i.e. ~1e-11 after division by 2ε) can dominate,
/// so the same difference is re-evaluated in double-double arithmetic.
pub fn gradient_check(
    w: &CnnLstmWeights,
    x: &[f64],
    target: f64,
    eps: f64,
) -> Result<f64, ModelError> {
    let (_, analytic) = loss_and_gradient(w, x, target)?;
    Ok(compare_with_finite_differences(
        w, x, target, eps, &analytic,
    ))
}

/// Relative error above which a finite difference is recomputed in
/// double-double precision.
pub const REFINE_ABOVE: f64 = 1e-6;

fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / (a.abs() + n.abs()).max(1e-8)
}

pub(crate) fn compare_with_finite_differences(
    w: &CnnLstmWeights,
    x: &[f64],
    target: f64,
    eps: f64,
    analytic: &[f64],
) -> f64 {
    let mut probe = w.clone();
    let mut ws = Workspace::default();
    let mut worst: f64 = 0.0;
    let x_dd: Vec<Dd> = x.iter().map(|v| Dd::from_f64(*v)).collect();
    let mut p_dd: Option<Vec<Dd>> = None;
    let t_dd = Dd::from_f64(target);
    for i in 0..analytic.len() {
        let orig = probe.params[i];
        probe.params[i] = orig + eps;
        let up = probe.forward_ws(x, &mut ws);
        probe.params[i] = orig - eps;
        let down = probe.forward_ws(x, &mut ws);
        probe.params[i] = orig;
        // (up - t)² - (down - t)², factored to avoid cancellation
        let numeric = (up - down) * (up + down - 2.0 * target) / (2.0 * eps);
        let mut err = relative_error(analytic[i], numeric);
        // refinement removes roundoff only; not worth it below the running max
        if err > REFINE_ABOVE && err > worst {
            let p = p_dd.get_or_insert_with(|| w.params.iter().map(|v| Dd::from_f64(*v)).collect());
            p[i] = Dd::sum(orig, eps);
            let up = reference_forward(&w.cfg, p, &x_dd) - t_dd;
            p[i] = Dd::sum(orig, -eps);
            let down = reference_forward(&w.cfg, p, &x_dd) - t_dd;
            p[i] = Dd::from_f64(orig);
            let numeric = ((up * up - down * down) / Dd::from_f64(2.0 * eps)).hi;
            err = relative_error(analytic[i], numeric);
        }
        worst = worst.max(err);
    }
    worst
}

/// Direct transcription of the forward pass over any [`Real`] scalar. Slow;
/// used to cross-check [`CnnLstmWeights::forward`] and for extended-precision
/// finite differences.
pub(crate) fn reference_forward<R: Real>(cfg: &CnnLstmConfig, p: &[R], x: &[R]) -> R {
    let o = Offsets::new(cfg);
    let (c_in, f1, f2, k, h) = (
        cfg.in_channels,
        cfg.conv1_channels,
        cfg.conv2_channels,
        cfg.kernel,
        cfg.hidden,
    );
    let t_len = x.len() / c_in;
    let conv = |w: usize, b: usize, input: &[R], cin: usize, cout: usize| -> Vec<R> {
        let mut out = Vec::with_capacity(cout * t_len);
        for f in 0..cout {
            for t in 0..t_len {
                let mut s = p[b + f];
                for c in 0..cin {
                    for kk in 0..k {
                        let src = t as isize + kk as isize - (k / 2) as isize;
                        if src >= 0 && (src as usize) < t_len {
                            s = s + p[w + (f * cin + c) * k + kk] * input[c * t_len + src as usize];
                        }
                    }
                }
                out.push(s.relu());
            }
        }
        out
    };
    let a1 = conv(o.c1w, o.c1b, x, c_in, f1);
    let a2 = conv(o.c2w, o.c2b, &a1, f1, f2);
    let mut hs = vec![R::of(0.0); h];
    let mut cs = vec![R::of(0.0); h];
    for t in 0..t_len {
        let mut z = Vec::with_capacity(4 * h);
        for r in 0..4 * h {
            let mut s = p[o.bias + r];
            for j in 0..f2 {
                s = s + p[o.wih + r * f2 + j] * a2[j * t_len + t];
            }
            for j in 0..h {
                s = s + p[o.whh + r * h + j] * hs[j];
            }
            z.push(s);
        }
        for j in 0..h {
            let i = z[j].sigmoid();
            let f = z[h + j].sigmoid();
            let g = z[2 * h + j].tanh();
            let og = z[3 * h + j].sigmoid();
            cs[j] = f * cs[j] + i * g;
            hs[j] = og * cs[j].tanh();
        }
    }
    let mut y = p[o.hb];
    for j in 0..h {
        y = y + p[o.hw + j] * hs[j];
    }
    y
}
