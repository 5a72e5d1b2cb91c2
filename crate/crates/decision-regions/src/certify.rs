//! Shape-based connectedness certificates. Two structural conditions force
//! every decision region of a network to be connected, no matter what the
//! biases or the data looked like:
//!
//! - every hidden activation is strictly increasing and onto the reals, the
//!   widths never grow (input >= each hidden width, layer by layer), and
//!   every hidden weight matrix has full column rank; or
//! - there is exactly one hidden layer, its activation is strictly
//!   increasing (onto or not), its width does not exceed the input
//!   dimension, and its weight matrix has full column rank.
//!
//! When neither applies the verdict lists the concrete obstructions, which
//! is exactly the checklist for hunting disconnected regions.

use crate::geometry::{numerical_rank, RankReport};
use crate::net::{ActivationKind, Network};
use serde::Serialize;

/// Monotonicity/image class of an activation, the properties the
/// connectedness arguments consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationClass {
    /// Strictly increasing bijection of the reals (leaky relu, identity).
    IncreasingOnto,
    /// Strictly increasing but the image is a proper interval (elu, sigmoid).
    IncreasingNotOnto,
    /// Only weakly increasing: collapses an entire ray (hard relu).
    NonDecreasing,
}

impl ActivationClass {
    pub fn of(kind: &ActivationKind) -> Self {
        if !kind.strictly_increasing() {
            ActivationClass::NonDecreasing
        } else if kind.surjective_onto_reals() {
            ActivationClass::IncreasingOnto
        } else {
            ActivationClass::IncreasingNotOnto
        }
    }
}

/// Which structural argument backs a `GuaranteedConnected` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectednessBasis {
    /// Non-increasing widths, full-rank weights, increasing-onto activations.
    PyramidalFullRank,
    /// One hidden layer, strictly increasing activation, width <= input
    /// dimension, full-rank weights.
    SingleHiddenLayerFullRank,
}

/// A concrete reason the structural guarantees do not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Obstruction {
    /// A hidden layer is wider than what feeds it.
    NonPyramidal {
        layer: usize,
        width_in: usize,
        width_out: usize,
    },
    /// A hidden weight matrix drops rank at the reported tolerance.
    RankDeficient {
        layer: usize,
        rank: usize,
        required: usize,
    },
    /// The activation is not strictly increasing, so level sets can merge.
    NotStrictlyIncreasing {
        layer: usize,
        activation: ActivationKind,
    },
    /// No connectedness guarantee is known for networks with
    /// bounded-image activations and more than one hidden layer.
    BoundedImageDepth { hidden_layers: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Every decision region of every class is connected.
    GuaranteedConnected { basis: ConnectednessBasis },
    /// The structural conditions fail as listed; regions may or may not be
    /// connected.
    NoGuarantee { obstructions: Vec<Obstruction> },
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerCheck {
    /// 1-based hidden layer index.
    pub layer: usize,
    pub width_in: usize,
    pub width_out: usize,
    pub activation: ActivationKind,
    pub class: ActivationClass,
    pub rank: RankReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    /// input dim, hidden widths, class count.
    pub widths: Vec<usize>,
    pub rank_rel_tol: f64,
    pub layers: Vec<LayerCheck>,
    pub verdict: Verdict,
}

impl CertReport {
    pub fn guaranteed(&self) -> bool {
        matches!(self.verdict, Verdict::GuaranteedConnected { .. })
    }
}

/// Run the structural checks at the given relative rank tolerance.
pub fn certify(net: &Network, rank_rel_tol: f64) -> CertReport {
    let widths = net.widths();
    let hidden = net.hidden_layers();
    let mut layers = Vec::with_capacity(hidden.len());
    for (i, layer) in hidden.iter().enumerate() {
        let width_in = layer.weights.nrows();
        let width_out = layer.weights.ncols();
        layers.push(LayerCheck {
            layer: i + 1,
            width_in,
            width_out,
            activation: layer.activation,
            class: ActivationClass::of(&layer.activation),
            rank: numerical_rank(&layer.weights, rank_rel_tol),
        });
    }

    let pyramidal = layers.iter().all(|l| l.width_out <= l.width_in);
    let all_full_rank = layers.iter().all(|l| l.rank.is_full());
    let all_onto = layers
        .iter()
        .all(|l| l.class == ActivationClass::IncreasingOnto);
    let all_strict = layers
        .iter()
        .all(|l| l.class != ActivationClass::NonDecreasing);

    let verdict = if pyramidal && all_full_rank && all_onto {
        Verdict::GuaranteedConnected {
            basis: ConnectednessBasis::PyramidalFullRank,
        }
    } else if layers.len() == 1 && all_strict && pyramidal && all_full_rank {
        Verdict::GuaranteedConnected {
            basis: ConnectednessBasis::SingleHiddenLayerFullRank,
        }
    } else {
        let mut obstructions = Vec::new();
        for l in &layers {
            if l.width_out > l.width_in {
                obstructions.push(Obstruction::NonPyramidal {
                    layer: l.layer,
                    width_in: l.width_in,
                    width_out: l.width_out,
                });
            }
            if !l.rank.is_full() {
                obstructions.push(Obstruction::RankDeficient {
                    layer: l.layer,
                    rank: l.rank.rank,
                    required: l.width_in.min(l.width_out),
                });
            }
            if l.class == ActivationClass::NonDecreasing {
                obstructions.push(Obstruction::NotStrictlyIncreasing {
                    layer: l.layer,
                    activation: l.activation,
                });
            }
        }
        if layers.len() > 1
            && layers
                .iter()
                .any(|l| l.class == ActivationClass::IncreasingNotOnto)
        {
            obstructions.push(Obstruction::BoundedImageDepth {
                hidden_layers: layers.len(),
            });
        }
        Verdict::NoGuarantee { obstructions }
    };

    CertReport {
        widths,
        rank_rel_tol,
        layers,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;
    use crate::net::{builtin, Label, Layer, Network, OutputLayer};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_verdicts() {
        let r = certify(&builtin("eq4-nonpyramidal").unwrap(), defaults::RANK_REL_TOL);
        match &r.verdict {
            Verdict::NoGuarantee { obstructions } => {
                assert_eq!(
                    obstructions.as_slice(),
                    &[Obstruction::NonPyramidal {
                        layer: 2,
                        width_in: 1,
                        width_out: 2
                    }]
                );
            }
            v => panic!("{v:?}"),
        }

        let r = certify(&builtin("eq5-relu").unwrap(), defaults::RANK_REL_TOL);
        match &r.verdict {
            Verdict::NoGuarantee { obstructions } => {
                assert_eq!(obstructions.len(), 2);
                assert!(obstructions.iter().all(|o| matches!(
                    o,
                    Obstruction::NotStrictlyIncreasing { .. }
                )));
            }
            v => panic!("{v:?}"),
        }

        let r = certify(&builtin("lowrank-strips(0.1)").unwrap(), defaults::RANK_REL_TOL);
        match &r.verdict {
            Verdict::NoGuarantee { obstructions } => {
                assert_eq!(
                    obstructions.as_slice(),
                    &[Obstruction::RankDeficient {
                        layer: 1,
                        rank: 1,
                        required: 2
                    }]
                );
            }
            v => panic!("{v:?}"),
        }

        let r = certify(&builtin("tight-2-3-2(0.1)").unwrap(), defaults::RANK_REL_TOL);
        match &r.verdict {
            Verdict::NoGuarantee { obstructions } => {
                assert_eq!(
                    obstructions.as_slice(),
                    &[Obstruction::NonPyramidal {
                        layer: 1,
                        width_in: 2,
                        width_out: 3
                    }]
                );
            }
            v => panic!("{v:?}"),
        }
    }

    fn random_pyramidal(rng: &mut ChaCha8Rng, d: usize, widths: &[usize]) -> Network {
        let mut hidden = Vec::new();
        let mut fan_in = d;
        for &w in widths {
            let weights = DMatrix::from_fn(fan_in, w, |_, _| rng.gen_range(-1.0..1.0));
            let bias = DVector::from_fn(w, |_, _| rng.gen_range(-0.5..0.5));
            hidden.push(Layer {
                weights,
                bias,
                activation: ActivationKind::LeakyRelu {
                    alpha: rng.gen_range(0.05..0.5),
                },
            });
            fan_in = w;
        }
        let out_w = DMatrix::from_fn(fan_in, 3, |_, _| rng.gen_range(-1.0..1.0));
        let out_b = DVector::from_fn(3, |_, _| rng.gen_range(-0.5..0.5));
        Network::new(d, hidden, OutputLayer { weights: out_w, bias: out_b }).unwrap()
    }

    #[test]
    fn random_pyramidal_nets_are_certified_and_have_connected_regions() {
        use crate::connectivity::{components_report, Engine};
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let net = random_pyramidal(&mut rng, 2, &[2, 2]);
            let report = certify(&net, defaults::RANK_REL_TOL);
            // random continuous entries: rank deficiency has probability 0
            assert!(
                matches!(
                    report.verdict,
                    Verdict::GuaranteedConnected {
                        basis: ConnectednessBasis::PyramidalFullRank
                    }
                ),
                "{:?}",
                report.verdict
            );
            for class in 0..net.n_classes() {
                let (_, _, r) =
                    components_report(&net, class, 8.0, 1e-9, Engine::Forward).unwrap();
                assert!(
                    r.components.len() <= 1,
                    "class {class} split into {} components",
                    r.components.len()
                );
            }
        }
    }

    #[test]
    fn one_bounded_hidden_layer_gets_the_single_layer_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let weights = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
        let net = Network::new(
            2,
            vec![Layer {
                weights,
                bias: DVector::zeros(2),
                activation: ActivationKind::Sigmoid,
            }],
            OutputLayer {
                weights: DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0)),
                bias: DVector::zeros(2),
            },
        )
        .unwrap();
        let report = certify(&net, defaults::RANK_REL_TOL);
        assert_eq!(
            report.verdict,
            Verdict::GuaranteedConnected {
                basis: ConnectednessBasis::SingleHiddenLayerFullRank
            }
        );

        // grid check: the sigmoid net's regions really are connected
        let n = 101;
        let mut label = vec![-1i32; n * n];
        for i in 0..n {
            for j in 0..n {
                let x = [
                    -8.0 + 16.0 * i as f64 / (n - 1) as f64,
                    -8.0 + 16.0 * j as f64 / (n - 1) as f64,
                ];
                let d = net.classify(&x, 1e-9);
                if let Label::Class(c) = d.label {
                    label[i * n + j] = c as i32;
                }
            }
        }
        for class in 0..2i32 {
            let mut seen = vec![false; n * n];
            let mut comps = 0;
            for start in 0..n * n {
                if label[start] != class || seen[start] {
                    continue;
                }
                comps += 1;
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(c) = stack.pop() {
                    let (i, j) = (c / n, c % n);
                    for (ni, nj) in [
                        (i.wrapping_sub(1), j),
                        (i + 1, j),
                        (i, j.wrapping_sub(1)),
                        (i, j + 1),
                    ] {
                        if ni < n && nj < n {
                            let k = ni * n + nj;
                            if label[k] == class && !seen[k] {
                                seen[k] = true;
                                stack.push(k);
                            }
                        }
                    }
                }
            }
            assert!(comps <= 1, "class {class}: {comps} grid components");
        }
    }

    #[test]
    fn deep_bounded_activations_report_the_depth_obstruction() {
        let net = Network::new(
            2,
            vec![
                Layer {
                    weights: DMatrix::identity(2, 2),
                    bias: DVector::zeros(2),
                    activation: ActivationKind::Elu,
                },
                Layer {
                    weights: DMatrix::identity(2, 2),
                    bias: DVector::zeros(2),
                    activation: ActivationKind::Elu,
                },
            ],
            OutputLayer {
                weights: DMatrix::identity(2, 2),
                bias: DVector::zeros(2),
            },
        )
        .unwrap();
        let report = certify(&net, defaults::RANK_REL_TOL);
        match &report.verdict {
            Verdict::NoGuarantee { obstructions } => {
                assert_eq!(
                    obstructions.as_slice(),
                    &[Obstruction::BoundedImageDepth { hidden_layers: 2 }]
                );
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn rank_tolerance_is_respected() {
        // singular values 1 and 1e-6: full rank at tol 1e-8, deficient at 1e-3
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-6]);
        let net = Network::new(
            2,
            vec![Layer {
                weights: w,
                bias: DVector::zeros(2),
                activation: ActivationKind::LeakyRelu { alpha: 0.2 },
            }],
            OutputLayer {
                weights: DMatrix::identity(2, 2),
                bias: DVector::zeros(2),
            },
        )
        .unwrap();
        assert!(certify(&net, 1e-8).guaranteed());
        let report = certify(&net, 1e-3);
        assert!(!report.guaranteed());
        match &report.verdict {
            Verdict::NoGuarantee { obstructions } => {
                assert!(matches!(
                    obstructions[0],
                    Obstruction::RankDeficient { layer: 1, rank: 1, required: 2 }
                ));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn affine_networks_are_trivially_certified() {
        let net = Network::new(
            3,
            Vec::new(),
            OutputLayer {
                weights: DMatrix::from_fn(3, 4, |i, j| (i + j) as f64),
                bias: DVector::zeros(4),
            },
        )
        .unwrap();
        let report = certify(&net, defaults::RANK_REL_TOL);
        assert!(report.guaranteed());
    }
}
