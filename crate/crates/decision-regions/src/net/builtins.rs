//! Hand-specified reference networks with fully known decision geometry.
//! They are small enough to verify by hand and exercise every failure mode
//! of the connectedness certificate: a width bottleneck, a non-monotone
//! activation, a rank-deficient first layer, and a first layer one unit
//! wider than the input.

use super::{ActivationKind, Layer, NetError, Network, OutputLayer};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::FRAC_1_SQRT_2;

/// Construct a builtin by name. Parameterized families take the leak slope
/// in parentheses: `lowrank-strips(0.1)`, `tight-2-3-2(0.25)`.
///
/// - `eq4-nonpyramidal`: widths 2-1-2-2, leak 0.5. Class 1 is the union of
///   the two strips `x1 + x2 > 2` and `x1 + x2 < -4` (the middle band goes
///   to class 2), so a 1-wide bottleneck already splits a decision region.
/// - `eq5-relu`: widths 2-2-2-2, relu. Class 1 is the corner triangle
///   `{x1 < 1, x2 < 1, x1 + x2 < 1}` together with the wedge
///   `{x2 > 4, 2 x1 - x2 + 4 < 0}`.
/// - `lowrank-strips(a)`: one hidden layer of width 2 whose weight matrix
///   has rank 1; class 1 is `|x1| > 1`, two parallel strips.
/// - `tight-2-3-2(a)`: one hidden layer of width 3 over a 2d input (one
///   wider than the input), full rank; class 1 is `|x1| > (2-a)/(1-a)`.
pub fn builtin(name: &str) -> Result<Network, NetError> {
    let (base, param) = split_param(name)?;
    match (base, param) {
        ("eq4-nonpyramidal", None) => eq4_nonpyramidal(),
        ("eq5-relu", None) => eq5_relu(),
        ("lowrank-strips", Some(alpha)) => lowrank_strips(name, alpha),
        ("tight-2-3-2", Some(alpha)) => tight_2_3_2(name, alpha),
        ("lowrank-strips", None) | ("tight-2-3-2", None) => Err(NetError::BadBuiltinParam {
            name: name.to_string(),
            msg: "missing leak slope, e.g. lowrank-strips(0.1)".to_string(),
        }),
        ("eq4-nonpyramidal", Some(_)) | ("eq5-relu", Some(_)) => {
            Err(NetError::BadBuiltinParam {
                name: name.to_string(),
                msg: "this builtin takes no parameter".to_string(),
            })
        }
        _ => Err(NetError::UnknownBuiltin(name.to_string())),
    }
}

fn split_param(name: &str) -> Result<(&str, Option<f64>), NetError> {
    match name.find('(') {
        None => Ok((name, None)),
        Some(i) => {
            let rest = &name[i + 1..];
            let Some(inner) = rest.strip_suffix(')') else {
                return Err(NetError::UnknownBuiltin(name.to_string()));
            };
            let v: f64 = inner.trim().parse().map_err(|_| NetError::BadBuiltinParam {
                name: name.to_string(),
                msg: format!("cannot parse `{inner}` as a slope"),
            })?;
            Ok((&name[..i], Some(v)))
        }
    }
}

fn check_alpha(name: &str, alpha: f64) -> Result<(), NetError> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(NetError::BadBuiltinParam {
            name: name.to_string(),
            msg: format!("leak slope must lie strictly between 0 and 1, got {alpha}"),
        });
    }
    Ok(())
}

fn eq4_nonpyramidal() -> Result<Network, NetError> {
    let leak = ActivationKind::LeakyRelu { alpha: 0.5 };
    Network::new(
        2,
        vec![
            Layer {
                weights: DMatrix::from_row_slice(2, 1, &[1.0, 1.0]),
                bias: DVector::from_column_slice(&[0.0]),
                activation: leak,
            },
            Layer {
                weights: DMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
                bias: DVector::from_column_slice(&[0.0, 0.0]),
                activation: leak,
            },
        ],
        OutputLayer {
            weights: DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 3.0, 2.0]),
            bias: DVector::from_column_slice(&[0.0, 1.0]),
        },
    )
}

fn eq5_relu() -> Result<Network, NetError> {
    let s = FRAC_1_SQRT_2;
    Network::new(
        2,
        vec![
            Layer {
                weights: DMatrix::identity(2, 2),
                bias: DVector::from_column_slice(&[0.0, 0.0]),
                activation: ActivationKind::Relu,
            },
            Layer {
                // transpose of [[s, s], [-s, s]]
                weights: DMatrix::from_row_slice(2, 2, &[s, -s, s, s]),
                bias: DVector::from_column_slice(&[1.0 - s, -3.0 * s]),
                activation: ActivationKind::Relu,
            },
        ],
        OutputLayer {
            weights: DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -3.0]),
            bias: DVector::from_column_slice(&[1.0, 0.0]),
        },
    )
}

fn lowrank_strips(name: &str, alpha: f64) -> Result<Network, NetError> {
    check_alpha(name, alpha)?;
    Network::new(
        2,
        vec![Layer {
            // transpose of [[1, 0], [-1, 0]]: both units read x1 only
            weights: DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 0.0]),
            bias: DVector::from_column_slice(&[-1.0, -1.0]),
            activation: ActivationKind::LeakyRelu { alpha },
        }],
        OutputLayer {
            weights: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
            bias: DVector::from_column_slice(&[0.0, -2.0 * alpha]),
        },
    )
}

fn tight_2_3_2(name: &str, alpha: f64) -> Result<Network, NetError> {
    check_alpha(name, alpha)?;
    Network::new(
        2,
        vec![Layer {
            // transpose of [[1, 0], [-1, 0], [0, 1]]: full rank, width 3
            weights: DMatrix::from_row_slice(2, 3, &[1.0, -1.0, 0.0, 0.0, 0.0, 1.0]),
            bias: DVector::from_column_slice(&[-2.0, -2.0, 0.0]),
            activation: ActivationKind::LeakyRelu { alpha },
        }],
        OutputLayer {
            weights: DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
            bias: DVector::from_column_slice(&[0.0, -3.0 * alpha]),
        },
    )
}
