//! Three-layer feedforward classifier with prunable connections.
//!
//! Hidden units use the hyperbolic tangent, output units the logistic
//! sigmoid. The training objective is cross-entropy plus a two-part decay
//! penalty over the connection weights; biases are excluded from the
//! penalty. Connections carry a 0/1 mask: a masked connection holds weight
//! exactly 0 and contributes nothing to the forward pass, the penalty, or
//! the gradient.

use crate::dataset::Example;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use rand::distr::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Clamp applied to sigmoid outputs inside the cross-entropy logs.
const LOG_CLAMP: f64 = 1e-12;

/// Hyperbolic tangent `(e^x - e^-x) / (e^x + e^-x)`, range (-1, 1).
pub fn tanh_act<F: Scalar>(x: F) -> F {
    x.tanh()
}

/// Logistic sigmoid `1 / (1 + e^-x)`, range (0, 1).
pub fn sigmoid_act<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Decay-penalty coefficients.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PenaltyConfig<F: Scalar> {
    /// Weight of the saturating term `beta z^2 / (1 + beta z^2)`.
    pub eps1: F,
    /// Weight of the quadratic term `z^2`.
    pub eps2: F,
    pub beta: F,
}

impl<F: Scalar> PenaltyConfig<F> {
    pub fn zero() -> Self {
        PenaltyConfig {
            eps1: F::zero(),
            eps2: F::zero(),
            beta: lit(10.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps1 < F::zero() || self.eps2 < F::zero() {
            return Err(Error::Config(
                "penalty eps1/eps2 must be nonnegative".into(),
            ));
        }
        if self.beta <= F::zero() {
            return Err(Error::Config("penalty beta must be positive".into()));
        }
        Ok(())
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace<F: Scalar> {
    /// Pre-activation sums of the hidden layer.
    pub hidden_pre: Vec<F>,
    /// Hidden activations, each in (-1, 1).
    pub hidden_act: Vec<F>,
    /// Output activations, each in (0, 1).
    pub output: Vec<F>,
}

/// Per-weight partial derivatives of the objective.
#[derive(Debug, Clone)]
pub struct Gradients<F: Scalar> {
    pub w: Vec<F>,
    pub v: Vec<F>,
    pub hidden_bias: Vec<F>,
    pub output_bias: Vec<F>,
}

impl<F: Scalar> Gradients<F> {
    fn zeros(n: usize, h: usize, o: usize) -> Self {
        Gradients {
            w: vec![F::zero(); h * n],
            v: vec![F::zero(); o * h],
            hidden_bias: vec![F::zero(); h],
            output_bias: vec![F::zero(); o],
        }
    }

    pub fn scale(&mut self, s: F) {
        for g in self
            .w
            .iter_mut()
            .chain(self.v.iter_mut())
            .chain(self.hidden_bias.iter_mut())
            .chain(self.output_bias.iter_mut())
        {
            *g = *g * s;
        }
    }

    pub fn add(&mut self, other: &Gradients<F>) {
        for (a, b) in self.w.iter_mut().zip(&other.w) {
            *a = *a + *b;
        }
        for (a, b) in self.v.iter_mut().zip(&other.v) {
            *a = *a + *b;
        }
        for (a, b) in self.hidden_bias.iter_mut().zip(&other.hidden_bias) {
            *a = *a + *b;
        }
        for (a, b) in self.output_bias.iter_mut().zip(&other.output_bias) {
            *a = *a + *b;
        }
    }
}

/// The classifier: `n` inputs, `h` hidden units, `o` outputs.
///
/// `w` is h×n row-major (input→hidden), `v` is o×h row-major
/// (hidden→output). Masks parallel the weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<F: Scalar> {
    pub n: usize,
    pub h: usize,
    pub o: usize,
    pub w: Vec<F>,
    pub v: Vec<F>,
    pub hidden_bias: Vec<F>,
    pub output_bias: Vec<F>,
    pub mask_w: Vec<u8>,
    pub mask_v: Vec<u8>,
}

impl<F: Scalar> Network<F> {
    pub fn zeros(n: usize, h: usize, o: usize) -> Self {
        assert!(
            n >= 1 && h >= 1 && o >= 1,
            "network dimensions must be positive"
        );
        Network {
            n,
            h,
            o,
            w: vec![F::zero(); h * n],
            v: vec![F::zero(); o * h],
            hidden_bias: vec![F::zero(); h],
            output_bias: vec![F::zero(); o],
            mask_w: vec![1; h * n],
            mask_v: vec![1; o * h],
        }
    }

    /// Fresh network with weights and biases uniform in `[-range, range]`.
    pub fn random<R: Rng>(n: usize, h: usize, o: usize, range: F, rng: &mut R) -> Self {
        let mut net = Network::zeros(n, h, o);
        let dist = Uniform::new_inclusive(-range, range).expect("valid init range");
        for x in net.w.iter_mut() {
            *x = dist.sample(rng);
        }
        for x in net.hidden_bias.iter_mut() {
            *x = dist.sample(rng);
        }
        for x in net.v.iter_mut() {
            *x = dist.sample(rng);
        }
        for x in net.output_bias.iter_mut() {
            *x = dist.sample(rng);
        }
        net
    }

    /// Appends one hidden unit with fresh random weights; existing weights
    /// are retained exactly.
    pub fn grow<R: Rng>(&mut self, range: F, rng: &mut R) {
        let dist = Uniform::new_inclusive(-range, range).expect("valid init range");
        for _ in 0..self.n {
            self.w.push(dist.sample(rng));
            self.mask_w.push(1);
        }
        self.hidden_bias.push(dist.sample(rng));
        let h_new = self.h + 1;
        let mut v = Vec::with_capacity(self.o * h_new);
        let mut mask_v = Vec::with_capacity(self.o * h_new);
        for p in 0..self.o {
            for m in 0..self.h {
                v.push(self.v[p * self.h + m]);
                mask_v.push(self.mask_v[p * self.h + m]);
            }
            v.push(dist.sample(rng));
            mask_v.push(1);
        }
        self.v = v;
        self.mask_v = mask_v;
        self.h = h_new;
    }

    #[inline]
    pub fn w_at(&self, m: usize, l: usize) -> F {
        self.w[m * self.n + l]
    }

    #[inline]
    pub fn v_at(&self, p: usize, m: usize) -> F {
        self.v[p * self.h + m]
    }

    #[inline]
    pub fn w_live(&self, m: usize, l: usize) -> bool {
        self.mask_w[m * self.n + l] != 0
    }

    #[inline]
    pub fn v_live(&self, p: usize, m: usize) -> bool {
        self.mask_v[p * self.h + m] != 0
    }

    /// Masks one input→hidden connection, zeroing its weight.
    pub fn mask_w_at(&mut self, m: usize, l: usize) {
        self.mask_w[m * self.n + l] = 0;
        self.w[m * self.n + l] = F::zero();
    }

    /// Masks one hidden→output connection, zeroing its weight.
    pub fn mask_v_at(&mut self, p: usize, m: usize) {
        self.mask_v[p * self.h + m] = 0;
        self.v[p * self.h + m] = F::zero();
    }

    /// Count of unmasked connections in `w` and `v` (biases excluded).
    pub fn live_connections(&self) -> usize {
        self.mask_w.iter().filter(|&&m| m != 0).count()
            + self.mask_v.iter().filter(|&&m| m != 0).count()
    }
}

/// Forward pass. Panics on an input length mismatch.
pub fn forward<F: Scalar>(net: &Network<F>, inputs: &[F]) -> ForwardTrace<F> {
    assert_eq!(
        inputs.len(),
        net.n,
        "input length {} does not match network inputs {}",
        inputs.len(),
        net.n
    );
    let mut hidden_pre = Vec::with_capacity(net.h);
    let mut hidden_act = Vec::with_capacity(net.h);
    for m in 0..net.h {
        let mut sum = net.hidden_bias[m];
        for l in 0..net.n {
            if net.w_live(m, l) {
                sum = sum + inputs[l] * net.w_at(m, l);
            }
        }
        hidden_pre.push(sum);
        hidden_act.push(tanh_act(sum));
    }
    let mut output = Vec::with_capacity(net.o);
    for p in 0..net.o {
        let mut sum = net.output_bias[p];
        for m in 0..net.h {
            if net.v_live(p, m) {
                sum = sum + hidden_act[m] * net.v_at(p, m);
            }
        }
        output.push(sigmoid_act(sum));
    }
    ForwardTrace {
        hidden_pre,
        hidden_act,
        output,
    }
}

/// Output layer recomputed from given hidden activations.
pub fn forward_from_hidden<F: Scalar>(net: &Network<F>, hidden_act: &[F]) -> Vec<F> {
    assert_eq!(hidden_act.len(), net.h);
    (0..net.o)
        .map(|p| {
            let mut sum = net.output_bias[p];
            for m in 0..net.h {
                if net.v_live(p, m) {
                    sum = sum + hidden_act[m] * net.v_at(p, m);
                }
            }
            sigmoid_act(sum)
        })
        .collect()
}

/// Class index of the largest output; ties go to the lowest index.
pub fn predict<F: Scalar>(net: &Network<F>, inputs: &[F]) -> usize {
    argmax(&forward(net, inputs).output)
}

pub fn argmax<F: Scalar>(values: &[F]) -> usize {
    let mut best = 0usize;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Fraction of examples whose predicted class matches the target.
pub fn accuracy<F: Scalar>(net: &Network<F>, data: &[Example<F>]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let correct = data
        .iter()
        .filter(|ex| predict(net, &ex.inputs) == ex.target)
        .count();
    correct as f64 / data.len() as f64
}

fn clamp_output<F: Scalar>(s: F) -> F {
    let lo = lit::<F>(LOG_CLAMP);
    let hi = F::one() - lo;
    s.max(lo).min(hi)
}

/// Summed cross-entropy over the examples.
///
/// Outputs are clamped away from {0, 1} before the logs so saturated
/// sigmoids stay finite.
pub fn cross_entropy<F: Scalar>(net: &Network<F>, data: &[Example<F>]) -> F {
    let mut total = F::zero();
    for ex in data {
        let trace = forward(net, &ex.inputs);
        for p in 0..net.o {
            let s = clamp_output(trace.output[p]);
            let term = if p == ex.target {
                s.ln()
            } else {
                (F::one() - s).ln()
            };
            total = total - term;
        }
    }
    total
}

/// Decay penalty over the unmasked connection weights; biases excluded.
pub fn penalty<F: Scalar>(net: &Network<F>, cfg: &PenaltyConfig<F>) -> F {
    let mut saturating = F::zero();
    let mut quadratic = F::zero();
    for (i, &z) in net.w.iter().enumerate() {
        if net.mask_w[i] != 0 {
            let z2 = z * z;
            saturating = saturating + cfg.beta * z2 / (F::one() + cfg.beta * z2);
            quadratic = quadratic + z2;
        }
    }
    for (i, &z) in net.v.iter().enumerate() {
        if net.mask_v[i] != 0 {
            let z2 = z * z;
            saturating = saturating + cfg.beta * z2 / (F::one() + cfg.beta * z2);
            quadratic = quadratic + z2;
        }
    }
    cfg.eps1 * saturating + cfg.eps2 * quadratic
}

/// Training objective: cross-entropy plus penalty.
pub fn objective<F: Scalar>(net: &Network<F>, data: &[Example<F>], cfg: &PenaltyConfig<F>) -> F {
    cross_entropy(net, data) + penalty(net, cfg)
}

/// Gradient of the summed cross-entropy; also returns its value.
///
/// Output deltas use the `S - t` form; the log clamp affects the objective
/// value only, which matters solely in fully saturated regimes.
pub fn data_gradient<F: Scalar>(net: &Network<F>, data: &[Example<F>]) -> (Gradients<F>, F) {
    let mut g = Gradients::zeros(net.n, net.h, net.o);
    let mut ce = F::zero();
    for ex in data {
        let trace = forward(net, &ex.inputs);
        // delta_out[p] = S_p - t_p
        let mut delta_out = Vec::with_capacity(net.o);
        for p in 0..net.o {
            let s = trace.output[p];
            let sc = clamp_output(s);
            let term = if p == ex.target {
                sc.ln()
            } else {
                (F::one() - sc).ln()
            };
            ce = ce - term;
            let t = if p == ex.target { F::one() } else { F::zero() };
            delta_out.push(s - t);
        }
        for p in 0..net.o {
            g.output_bias[p] = g.output_bias[p] + delta_out[p];
            for m in 0..net.h {
                if net.v_live(p, m) {
                    g.v[p * net.h + m] = g.v[p * net.h + m] + delta_out[p] * trace.hidden_act[m];
                }
            }
        }
        for m in 0..net.h {
            let mut back = F::zero();
            for p in 0..net.o {
                if net.v_live(p, m) {
                    back = back + delta_out[p] * net.v_at(p, m);
                }
            }
            let dtanh = F::one() - trace.hidden_act[m] * trace.hidden_act[m];
            let delta_hidden = back * dtanh;
            g.hidden_bias[m] = g.hidden_bias[m] + delta_hidden;
            for l in 0..net.n {
                if net.w_live(m, l) {
                    g.w[m * net.n + l] = g.w[m * net.n + l] + delta_hidden * ex.inputs[l];
                }
            }
        }
    }
    (g, ce)
}

/// Gradient of the penalty term; zero for biases and masked connections.
pub fn penalty_gradient<F: Scalar>(net: &Network<F>, cfg: &PenaltyConfig<F>) -> Gradients<F> {
    let mut g = Gradients::zeros(net.n, net.h, net.o);
    let two = lit::<F>(2.0);
    let dpen = |z: F| {
        let denom = F::one() + cfg.beta * z * z;
        cfg.eps1 * two * cfg.beta * z / (denom * denom) + cfg.eps2 * two * z
    };
    for (i, &z) in net.w.iter().enumerate() {
        if net.mask_w[i] != 0 {
            g.w[i] = dpen(z);
        }
    }
    for (i, &z) in net.v.iter().enumerate() {
        if net.mask_v[i] != 0 {
            g.v[i] = dpen(z);
        }
    }
    g
}

/// Gradient of the full objective for every unmasked weight and bias.
pub fn gradient<F: Scalar>(
    net: &Network<F>,
    data: &[Example<F>],
    cfg: &PenaltyConfig<F>,
) -> Gradients<F> {
    let (mut g, _) = data_gradient(net, data);
    g.add(&penalty_gradient(net, cfg));
    g
}

/// Flat JSON form of a network, round-trip exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NetworkFile<F: Scalar> {
    pub n: usize,
    pub h: usize,
    pub o: usize,
    pub w: Vec<Vec<F>>,
    pub v: Vec<Vec<F>>,
    pub hidden_bias: Vec<F>,
    pub output_bias: Vec<F>,
    pub mask_w: Vec<Vec<u8>>,
    pub mask_v: Vec<Vec<u8>>,
    /// Which encoded dataset inputs each network input corresponds to.
    pub input_indices: Vec<usize>,
}

impl<F: Scalar> NetworkFile<F> {
    pub fn from_network(net: &Network<F>, input_indices: Vec<usize>) -> Self {
        assert_eq!(input_indices.len(), net.n);
        NetworkFile {
            n: net.n,
            h: net.h,
            o: net.o,
            w: (0..net.h)
                .map(|m| (0..net.n).map(|l| net.w_at(m, l)).collect())
                .collect(),
            v: (0..net.o)
                .map(|p| (0..net.h).map(|m| net.v_at(p, m)).collect())
                .collect(),
            hidden_bias: net.hidden_bias.clone(),
            output_bias: net.output_bias.clone(),
            mask_w: (0..net.h)
                .map(|m| (0..net.n).map(|l| net.mask_w[m * net.n + l]).collect())
                .collect(),
            mask_v: (0..net.o)
                .map(|p| (0..net.h).map(|m| net.mask_v[p * net.h + m]).collect())
                .collect(),
            input_indices,
        }
    }

    pub fn into_network(self) -> Result<(Network<F>, Vec<usize>)> {
        let (n, h, o) = (self.n, self.h, self.o);
        if self.w.len() != h || self.v.len() != o || self.input_indices.len() != n {
            return Err(Error::InvalidState(
                "network file dimensions are inconsistent".into(),
            ));
        }
        let flat = |rows: Vec<Vec<F>>, width: usize| -> Result<Vec<F>> {
            let mut out = Vec::with_capacity(rows.len() * width);
            for row in rows {
                if row.len() != width {
                    return Err(Error::InvalidState(
                        "network file row width is inconsistent".into(),
                    ));
                }
                out.extend(row);
            }
            Ok(out)
        };
        let flat_mask = |rows: Vec<Vec<u8>>, width: usize| -> Result<Vec<u8>> {
            let mut out = Vec::with_capacity(rows.len() * width);
            for row in rows {
                if row.len() != width {
                    return Err(Error::InvalidState(
                        "network file mask width is inconsistent".into(),
                    ));
                }
                out.extend(row);
            }
            Ok(out)
        };
        let net = Network {
            n,
            h,
            o,
            w: flat(self.w, n)?,
            v: flat(self.v, h)?,
            hidden_bias: self.hidden_bias,
            output_bias: self.output_bias,
            mask_w: flat_mask(self.mask_w, n)?,
            mask_v: flat_mask(self.mask_v, h)?,
        };
        Ok((net, self.input_indices))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
