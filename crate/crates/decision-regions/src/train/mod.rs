//! Small deterministic trainer: minibatch SGD with momentum on the softmax
//! cross-entropy, plus a finite-difference gradient check. Exists so the
//! width experiments are reproducible end to end; it is not a general
//! training framework.

pub mod data;

pub use data::{gen_strips, gen_two_islands, DataError, Dataset};

use crate::net::{ActivationKind, Layer, NetError, Network, OutputLayer};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset labels reach {max_label} but n_classes is {n_classes}")]
    LabelRange { max_label: usize, n_classes: usize },
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Hidden layer widths; empty trains an affine model.
    pub widths: Vec<usize>,
    pub activation: ActivationKind,
    pub epochs: usize,
    pub lr: f64,
    /// Learning rate halves every this many epochs (integer division).
    pub halve_every: usize,
    pub momentum: f64,
    pub batch: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            widths: vec![8],
            activation: ActivationKind::LeakyRelu { alpha: 0.1 },
            epochs: 1000,
            lr: 0.1,
            halve_every: 50,
            momentum: 0.9,
            batch: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean cross-entropy over the full training set at epoch end.
    pub loss: f64,
    /// Misclassified training points at epoch end.
    pub errors: usize,
}

#[derive(Debug)]
pub struct TrainResult {
    pub network: Network,
    pub history: Vec<EpochStats>,
}

struct Grads {
    hidden_w: Vec<DMatrix<f64>>,
    hidden_b: Vec<DVector<f64>>,
    out_w: DMatrix<f64>,
    out_b: DVector<f64>,
}

impl Grads {
    fn zeros_like(net: &Network) -> Self {
        Grads {
            hidden_w: net
                .hidden_layers()
                .iter()
                .map(|l| DMatrix::zeros(l.weights.nrows(), l.weights.ncols()))
                .collect(),
            hidden_b: net
                .hidden_layers()
                .iter()
                .map(|l| DVector::zeros(l.bias.len()))
                .collect(),
            out_w: DMatrix::zeros(
                net.output_layer().weights.nrows(),
                net.output_layer().weights.ncols(),
            ),
            out_b: DVector::zeros(net.output_layer().bias.len()),
        }
    }

    fn scale(&mut self, s: f64) {
        for w in &mut self.hidden_w {
            *w *= s;
        }
        for b in &mut self.hidden_b {
            *b *= s;
        }
        self.out_w *= s;
        self.out_b *= s;
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - m).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.iter().map(|e| e / z).collect()
}

/// Numerically shifted `log(sum(exp(logits)))`.
fn logsumexp(logits: &[f64]) -> f64 {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + logits.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

/// Mean cross-entropy loss of `net` on the dataset.
pub fn mean_loss(net: &Network, data: &Dataset) -> f64 {
    let mut total = 0.0;
    for (p, &l) in data.points.iter().zip(&data.labels) {
        let logits = net.forward(p).logits;
        total += logsumexp(&logits) - logits[l];
    }
    total / data.len() as f64
}

/// Number of points whose argmax logit is not the label (ties count as
/// errors).
pub fn count_errors(net: &Network, data: &Dataset) -> usize {
    let mut errors = 0;
    for (p, &l) in data.points.iter().zip(&data.labels) {
        let logits = net.forward(p).logits;
        let best = logits[l];
        let beaten = logits
            .iter()
            .enumerate()
            .any(|(k, &v)| k != l && v >= best);
        if beaten {
            errors += 1;
        }
    }
    errors
}

/// Accumulate the gradient of the summed cross-entropy over `idx` into
/// `grads`. Returns the summed loss.
fn accumulate_gradient(
    net: &Network,
    data: &Dataset,
    idx: &[usize],
    grads: &mut Grads,
) -> f64 {
    let mut loss = 0.0;
    for &i in idx {
        let x = &data.points[i];
        let label = data.labels[i];
        let trace = net.forward(x);
        let logits = &trace.logits;
        loss += logsumexp(logits) - logits[label];

        // delta at the output: softmax - onehot
        let probs = softmax(logits);
        let mut delta = DVector::from_vec(probs);
        delta[label] -= 1.0;

        // previous activation seen by the output layer
        let prev: DVector<f64> = match trace.activations.last() {
            Some(a) => DVector::from_column_slice(a),
            None => DVector::from_column_slice(x),
        };
        grads.out_w += &prev * delta.transpose();
        grads.out_b += &delta;

        // push delta back through the output weights, then the hidden stack
        let mut back: DVector<f64> = &net.output_layer().weights * &delta;
        for (k, layer) in net.hidden_layers().iter().enumerate().rev() {
            let pre = &trace.preactivations[k];
            let dact = DVector::from_iterator(
                pre.len(),
                pre.iter().map(|&v| layer.activation.derivative(v)),
            );
            let local = back.component_mul(&dact);
            let below: DVector<f64> = if k == 0 {
                DVector::from_column_slice(x)
            } else {
                DVector::from_column_slice(&trace.activations[k - 1])
            };
            grads.hidden_w[k] += &below * local.transpose();
            grads.hidden_b[k] += &local;
            if k > 0 {
                back = &layer.weights * &local;
            }
        }
    }
    loss
}

fn init_network(
    dim: usize,
    n_classes: usize,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Network, TrainError> {
    let mut hidden = Vec::with_capacity(cfg.widths.len());
    let mut fan_in = dim;
    for &w in &cfg.widths {
        if w == 0 {
            return Err(TrainError::BadConfig("zero-width hidden layer".into()));
        }
        let bound = 1.0 / (fan_in as f64).sqrt();
        hidden.push(Layer {
            weights: DMatrix::from_fn(fan_in, w, |_, _| rng.gen_range(-bound..bound)),
            bias: DVector::from_fn(w, |_, _| rng.gen_range(-bound..bound)),
            activation: cfg.activation,
        });
        fan_in = w;
    }
    let bound = 1.0 / (fan_in as f64).sqrt();
    let output = OutputLayer {
        weights: DMatrix::from_fn(fan_in, n_classes, |_, _| rng.gen_range(-bound..bound)),
        bias: DVector::from_fn(n_classes, |_, _| rng.gen_range(-bound..bound)),
    };
    Ok(Network::new(dim, hidden, output)?)
}

/// Deterministic minibatch SGD with momentum. The same dataset, config, and
/// seed always produce the same network.
pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<TrainResult, TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let max_label = *data.labels.iter().max().unwrap();
    if max_label >= data.n_classes {
        return Err(TrainError::LabelRange {
            max_label,
            n_classes: data.n_classes,
        });
    }
    if cfg.batch == 0 || cfg.epochs == 0 || cfg.lr <= 0.0 || cfg.halve_every == 0 {
        return Err(TrainError::BadConfig(
            "batch, epochs, lr, halve_every must be positive".into(),
        ));
    }
    if !(0.0..1.0).contains(&cfg.momentum) {
        return Err(TrainError::BadConfig("momentum must be in [0, 1)".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = init_network(data.dim(), data.n_classes, cfg, &mut rng)?;
    let mut velocity = Grads::zeros_like(&net);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let lr = cfg.lr * 0.5_f64.powi((epoch / cfg.halve_every) as i32);
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch) {
            let mut grads = Grads::zeros_like(&net);
            accumulate_gradient(&net, data, chunk, &mut grads);
            grads.scale(1.0 / chunk.len() as f64);

            for (k, layer) in net.hidden.iter_mut().enumerate() {
                velocity.hidden_w[k] =
                    &velocity.hidden_w[k] * cfg.momentum + &grads.hidden_w[k];
                velocity.hidden_b[k] =
                    &velocity.hidden_b[k] * cfg.momentum + &grads.hidden_b[k];
                layer.weights -= &velocity.hidden_w[k] * lr;
                layer.bias -= &velocity.hidden_b[k] * lr;
            }
            velocity.out_w = &velocity.out_w * cfg.momentum + &grads.out_w;
            velocity.out_b = &velocity.out_b * cfg.momentum + &grads.out_b;
            net.output.weights -= &velocity.out_w * lr;
            net.output.bias -= &velocity.out_b * lr;
        }
        history.push(EpochStats {
            epoch,
            loss: mean_loss(&net, data),
            errors: count_errors(&net, data),
        });
    }
    Ok(TrainResult {
        network: net,
        history,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    /// Largest relative error over the sampled parameters.
    pub max_rel_err: f64,
    /// Parameter coordinates compared.
    pub checked: usize,
    /// Points skipped for sitting on an activation breakpoint.
    pub excluded_points: usize,
}

/// Compare backprop against central finite differences on `n_params`
/// randomly chosen parameter coordinates. Points with any preactivation
/// within `breakpoint_tol` of a kink are excluded: the loss is not
/// differentiable there and finite differences straddle the kink.
pub fn gradient_check(
    net: &Network,
    data: &Dataset,
    eps_fd: f64,
    breakpoint_tol: f64,
    n_params: usize,
    seed: u64,
) -> Result<GradCheckReport, TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut keep = Vec::new();
    let mut excluded = 0;
    for i in 0..data.len() {
        let trace = net.forward(&data.points[i]);
        let near_kink = net
            .hidden_layers()
            .iter()
            .zip(&trace.preactivations)
            .any(|(layer, pre)| {
                pre.iter()
                    .any(|&v| layer.activation.breakpoint_distance(v) < breakpoint_tol)
            });
        if near_kink {
            excluded += 1;
        } else {
            keep.push(i);
        }
    }
    if keep.is_empty() {
        return Err(TrainError::BadConfig(
            "every point sits on an activation breakpoint".into(),
        ));
    }

    let mut grads = Grads::zeros_like(net);
    accumulate_gradient(net, data, &keep, &mut grads);
    grads.scale(1.0 / keep.len() as f64);

    // flat view: (layer index or output, is_bias, row, col)
    let mut coords: Vec<(usize, bool, usize, usize)> = Vec::new();
    for (k, l) in net.hidden_layers().iter().enumerate() {
        for r in 0..l.weights.nrows() {
            for c in 0..l.weights.ncols() {
                coords.push((k, false, r, c));
            }
        }
        for r in 0..l.bias.len() {
            coords.push((k, true, r, 0));
        }
    }
    let out = net.output_layer();
    let ol = net.hidden_layers().len();
    for r in 0..out.weights.nrows() {
        for c in 0..out.weights.ncols() {
            coords.push((ol, false, r, c));
        }
    }
    for r in 0..out.bias.len() {
        coords.push((ol, true, r, 0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    coords.shuffle(&mut rng);
    coords.truncate(n_params);

    let sub = Dataset {
        points: keep.iter().map(|&i| data.points[i].clone()).collect(),
        labels: keep.iter().map(|&i| data.labels[i]).collect(),
        n_classes: data.n_classes,
    };

    let mut max_rel = 0.0_f64;
    for &(k, is_bias, r, c) in &coords {
        let analytic = if k == ol {
            if is_bias {
                grads.out_b[r]
            } else {
                grads.out_w[(r, c)]
            }
        } else if is_bias {
            grads.hidden_b[k][r]
        } else {
            grads.hidden_w[k][(r, c)]
        };

        let mut probe = net.clone();
        let bump = |n: &mut Network, v: f64| {
            if k == ol {
                if is_bias {
                    n.output.bias[r] += v;
                } else {
                    n.output.weights[(r, c)] += v;
                }
            } else if is_bias {
                n.hidden[k].bias[r] += v;
            } else {
                n.hidden[k].weights[(r, c)] += v;
            }
        };
        bump(&mut probe, eps_fd);
        let plus = mean_loss(&probe, &sub);
        bump(&mut probe, -2.0 * eps_fd);
        let minus = mean_loss(&probe, &sub);
        let fd = (plus - minus) / (2.0 * eps_fd);

        let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1.0);
        max_rel = max_rel.max(rel);
    }
    Ok(GradCheckReport {
        max_rel_err: max_rel,
        checked: coords.len(),
        excluded_points: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Label;

    #[test]
    fn training_is_deterministic() {
        let data = gen_strips(30, 5);
        let cfg = TrainConfig {
            widths: vec![4],
            epochs: 30,
            seed: 11,
            ..TrainConfig::default()
        };
        let a = train(&data, &cfg).unwrap();
        let b = train(&data, &cfg).unwrap();
        assert_eq!(a.network.to_json_string(), b.network.to_json_string());
        assert_eq!(a.history.len(), 30);
        let la = a.history.last().unwrap();
        let lb = b.history.last().unwrap();
        assert_eq!(la.loss.to_bits(), lb.loss.to_bits());
        assert_eq!(la.errors, lb.errors);
    }

    #[test]
    fn loss_decreases_on_an_easy_problem() {
        let data = gen_strips(40, 2);
        let cfg = TrainConfig {
            widths: vec![8],
            epochs: 120,
            seed: 3,
            ..TrainConfig::default()
        };
        let r = train(&data, &cfg).unwrap();
        let first = r.history.first().unwrap().loss;
        let last = r.history.last().unwrap().loss;
        assert!(last < first * 0.5, "loss {first} -> {last}");
        assert!(r.history.last().unwrap().errors <= 2);
    }

    #[test]
    fn corner_islands_are_not_linearly_separable_but_a_wide_net_fits_them() {
        let data = gen_two_islands(60, 7);
        // affine model: no hidden layers
        let lin = train(
            &data,
            &TrainConfig {
                widths: vec![],
                epochs: 200,
                seed: 1,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let lin_errors = lin.history.last().unwrap().errors;
        assert!(
            lin_errors > data.len() / 10,
            "linear fit should fail: {lin_errors} errors on {}",
            data.len()
        );

        let wide = train(
            &data,
            &TrainConfig {
                widths: vec![16],
                epochs: 250,
                seed: 1,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        assert!(
            wide.history.last().unwrap().errors <= 2,
            "wide net should fit: {} errors",
            wide.history.last().unwrap().errors
        );
    }

    #[test]
    fn backprop_matches_finite_differences_away_from_kinks() {
        let data = gen_two_islands(25, 13);
        let cfg = TrainConfig {
            widths: vec![6, 4],
            epochs: 5,
            seed: 17,
            ..TrainConfig::default()
        };
        let r = train(&data, &cfg).unwrap();
        let report =
            gradient_check(&r.network, &data, 1e-7, 1e-6, 20, 99).unwrap();
        assert_eq!(report.checked, 20);
        assert!(
            report.max_rel_err <= 1e-5,
            "max rel err {}",
            report.max_rel_err
        );
    }

    /// For an affine model the backprop gradient has a closed form:
    /// grad_W = x (softmax - onehot)^T averaged over points.
    #[test]
    fn affine_gradient_matches_the_closed_form_exactly() {
        let data = gen_two_islands(20, 21);
        let cfg = TrainConfig {
            widths: vec![],
            epochs: 1,
            seed: 5,
            ..TrainConfig::default()
        };
        let r = train(&data, &cfg).unwrap();
        let net = &r.network;

        let idx: Vec<usize> = (0..data.len()).collect();
        let mut grads = Grads::zeros_like(net);
        accumulate_gradient(net, &data, &idx, &mut grads);
        grads.scale(1.0 / data.len() as f64);

        let mut want_w = DMatrix::zeros(2, data.n_classes);
        let mut want_b = DVector::zeros(data.n_classes);
        for (p, &l) in data.points.iter().zip(&data.labels) {
            let logits = net.forward(p).logits;
            let mut probs = softmax(&logits);
            probs[l] -= 1.0;
            for r in 0..2 {
                for c in 0..data.n_classes {
                    want_w[(r, c)] += p[r] * probs[c];
                }
            }
            for c in 0..data.n_classes {
                want_b[c] += probs[c];
            }
        }
        want_w /= data.len() as f64;
        want_b /= data.len() as f64;

        for r in 0..2 {
            for c in 0..data.n_classes {
                assert!((grads.out_w[(r, c)] - want_w[(r, c)]).abs() <= 1e-12);
            }
        }
        for c in 0..data.n_classes {
            assert!((grads.out_b[c] - want_b[c]).abs() <= 1e-12);
        }
    }

    #[test]
    fn trained_strips_net_classifies_the_strip_centers() {
        let data = gen_strips(50, 19);
        let cfg = TrainConfig {
            widths: vec![10],
            epochs: 150,
            seed: 23,
            ..TrainConfig::default()
        };
        let net = train(&data, &cfg).unwrap().network;
        assert_eq!(net.classify(&[-1.5, 0.0], 1e-9).label, Label::Class(0));
        assert_eq!(net.classify(&[1.5, 0.0], 1e-9).label, Label::Class(0));
        assert_eq!(net.classify(&[0.0, 0.0], 1e-9).label, Label::Class(1));
    }

    #[test]
    fn config_validation() {
        let data = gen_strips(5, 1);
        let bad = TrainConfig {
            momentum: 1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&data, &bad), Err(TrainError::BadConfig(_))));
        let empty = Dataset {
            points: vec![],
            labels: vec![],
            n_classes: 2,
        };
        assert!(matches!(
            train(&empty, &TrainConfig::default()),
            Err(TrainError::EmptyDataset)
        ));
    }
}
