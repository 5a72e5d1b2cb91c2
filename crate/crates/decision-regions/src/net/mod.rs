//! Feedforward network representation: affine layers `h_k(x) = W_k^T x + b_k`
//! with coordinate-wise activations between them and a bare affine output
//! layer. Weights follow the `(fan_in, fan_out)` convention, so `W_k` has
//! shape `(n_{k-1}, n_k)`.

mod activation;
mod builtins;

pub use activation::ActivationKind;
pub use builtins::builtin;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed network json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad network shape: {0}")]
    Shape(String),
    #[error("layer {layer}: {msg}")]
    BadActivation { layer: usize, msg: String },
    #[error("unknown builtin network `{0}`")]
    UnknownBuiltin(String),
    #[error("builtin `{name}`: {msg}")]
    BadBuiltinParam { name: String, msg: String },
}

#[derive(Debug, Clone)]
pub struct Layer {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub activation: ActivationKind,
}

#[derive(Debug, Clone)]
pub struct OutputLayer {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Network {
    input_dim: usize,
    pub(crate) hidden: Vec<Layer>,
    pub(crate) output: OutputLayer,
}

/// Per-layer record of one forward pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalTrace {
    pub preactivations: Vec<Vec<f64>>,
    pub activations: Vec<Vec<f64>>,
    pub logits: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    /// 0-based class index.
    Class(usize),
    /// No logit beats all others by more than the tolerance.
    Tie,
}

#[derive(Debug, Clone, Copy)]
pub struct Decision {
    pub label: Label,
    /// Gap between the best and second-best logit (infinite for one class).
    pub margin: f64,
}

impl Network {
    pub fn new(
        input_dim: usize,
        hidden: Vec<Layer>,
        output: OutputLayer,
    ) -> Result<Self, NetError> {
        if input_dim == 0 {
            return Err(NetError::Shape("input dimension must be positive".into()));
        }
        let mut prev = input_dim;
        for (k, layer) in hidden.iter().enumerate() {
            if layer.weights.nrows() != prev {
                return Err(NetError::Shape(format!(
                    "layer {}: weights have {} rows but fan-in is {}",
                    k + 1,
                    layer.weights.nrows(),
                    prev
                )));
            }
            if layer.weights.ncols() == 0 {
                return Err(NetError::Shape(format!("layer {}: zero width", k + 1)));
            }
            if layer.bias.len() != layer.weights.ncols() {
                return Err(NetError::Shape(format!(
                    "layer {}: bias length {} != width {}",
                    k + 1,
                    layer.bias.len(),
                    layer.weights.ncols()
                )));
            }
            if layer.weights.iter().any(|v| !v.is_finite())
                || layer.bias.iter().any(|v| !v.is_finite())
            {
                return Err(NetError::Shape(format!(
                    "layer {}: non-finite parameter",
                    k + 1
                )));
            }
            layer
                .activation
                .validate()
                .map_err(|msg| NetError::BadActivation { layer: k + 1, msg })?;
            prev = layer.weights.ncols();
        }
        if output.weights.nrows() != prev {
            return Err(NetError::Shape(format!(
                "output: weights have {} rows but fan-in is {}",
                output.weights.nrows(),
                prev
            )));
        }
        if output.weights.ncols() == 0 {
            return Err(NetError::Shape("output: zero classes".into()));
        }
        if output.bias.len() != output.weights.ncols() {
            return Err(NetError::Shape(format!(
                "output: bias length {} != class count {}",
                output.bias.len(),
                output.weights.ncols()
            )));
        }
        if output.weights.iter().any(|v| !v.is_finite())
            || output.bias.iter().any(|v| !v.is_finite())
        {
            return Err(NetError::Shape("output: non-finite parameter".into()));
        }
        Ok(Network {
            input_dim,
            hidden,
            output,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_classes(&self) -> usize {
        self.output.weights.ncols()
    }

    pub fn hidden_layers(&self) -> &[Layer] {
        &self.hidden
    }

    pub fn output_layer(&self) -> &OutputLayer {
        &self.output
    }

    /// Affine-layer count (hidden layers plus the output layer).
    pub fn depth(&self) -> usize {
        self.hidden.len() + 1
    }

    /// Widths `[n_0, n_1, ..., n_{L-1}, m]`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_dim];
        w.extend(self.hidden.iter().map(|l| l.weights.ncols()));
        w.push(self.n_classes());
        w
    }

    /// Forward pass recording every intermediate vector.
    pub fn forward(&self, x: &[f64]) -> EvalTrace {
        assert_eq!(x.len(), self.input_dim, "input dimension mismatch");
        let mut cur = DVector::from_column_slice(x);
        let mut preactivations = Vec::with_capacity(self.hidden.len());
        let mut activations = Vec::with_capacity(self.hidden.len());
        for layer in &self.hidden {
            let pre = layer.weights.transpose() * &cur + &layer.bias;
            let post = pre.map(|t| layer.activation.value(t));
            preactivations.push(pre.iter().copied().collect());
            activations.push(post.iter().copied().collect());
            cur = post;
        }
        let logits = self.output.weights.transpose() * &cur + &self.output.bias;
        EvalTrace {
            preactivations,
            activations,
            logits: logits.iter().copied().collect(),
        }
    }

    /// Logits by plain nested loops; deliberately shares no code with
    /// [`Network::forward`] so the two can cross-check each other.
    pub fn eval_logits(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_dim);
        let mut cur: Vec<f64> = x.to_vec();
        for layer in &self.hidden {
            let width = layer.weights.ncols();
            let mut next = vec![0.0; width];
            for (j, slot) in next.iter_mut().enumerate() {
                let mut acc = layer.bias[j];
                for (i, v) in cur.iter().enumerate() {
                    acc += layer.weights[(i, j)] * v;
                }
                *slot = layer.activation.value(acc);
            }
            cur = next;
        }
        let m = self.output.weights.ncols();
        let mut logits = vec![0.0; m];
        for (j, slot) in logits.iter_mut().enumerate() {
            let mut acc = self.output.bias[j];
            for (i, v) in cur.iter().enumerate() {
                acc += self.output.weights[(i, j)] * v;
            }
            *slot = acc;
        }
        logits
    }

    /// Argmax with a strictness margin: a class wins only when its logit
    /// exceeds every other by more than `eps`.
    pub fn classify(&self, x: &[f64], eps: f64) -> Decision {
        let logits = self.forward(x).logits;
        decide(&logits, eps)
    }

    pub fn to_json_string(&self) -> String {
        let j: NetworkJson = self.into();
        let mut s = serde_json::to_string_pretty(&j).expect("network serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self, NetError> {
        let j: NetworkJson = serde_json::from_str(s)?;
        j.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

/// Decision rule shared by everything that looks at logits.
pub fn decide(logits: &[f64], eps: f64) -> Decision {
    assert!(!logits.is_empty());
    if logits.len() == 1 {
        return Decision {
            label: Label::Class(0),
            margin: f64::INFINITY,
        };
    }
    let mut best = 0;
    for (i, &v) in logits.iter().enumerate() {
        if v > logits[best] {
            best = i;
        }
    }
    let second = logits
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = logits[best] - second;
    Decision {
        label: if margin > eps {
            Label::Class(best)
        } else {
            Label::Tie
        },
        margin,
    }
}

pub fn load_network(path: &Path) -> Result<Network, NetError> {
    let text = std::fs::read_to_string(path)?;
    Network::from_json_str(&text)
}

// --- JSON schema -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LayerJson {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: ActivationKind,
}

#[derive(Serialize, Deserialize)]
struct AffineJson {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    input_dim: usize,
    layers: Vec<LayerJson>,
    output: AffineJson,
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, NetError> {
    if rows.is_empty() {
        return Err(NetError::Shape(format!("{what}: empty weight matrix")));
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(NetError::Shape(format!("{what}: ragged weight matrix")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl TryFrom<NetworkJson> for Network {
    type Error = NetError;

    fn try_from(j: NetworkJson) -> Result<Self, NetError> {
        let mut hidden = Vec::with_capacity(j.layers.len());
        for (k, l) in j.layers.into_iter().enumerate() {
            hidden.push(Layer {
                weights: matrix_from_rows(&l.weights, &format!("layer {}", k + 1))?,
                bias: DVector::from_vec(l.bias),
                activation: l.activation,
            });
        }
        let output = OutputLayer {
            weights: matrix_from_rows(&j.output.weights, "output")?,
            bias: DVector::from_vec(j.output.bias),
        };
        Network::new(j.input_dim, hidden, output)
    }
}

impl From<&Network> for NetworkJson {
    fn from(n: &Network) -> NetworkJson {
        NetworkJson {
            input_dim: n.input_dim,
            layers: n
                .hidden
                .iter()
                .map(|l| LayerJson {
                    weights: matrix_to_rows(&l.weights),
                    bias: l.bias.iter().copied().collect(),
                    activation: l.activation,
                })
                .collect(),
            output: AffineJson {
                weights: matrix_to_rows(&n.output.weights),
                bias: n.output.bias.iter().copied().collect(),
            },
        }
    }
}
