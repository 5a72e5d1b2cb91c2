use serde::{Deserialize, Serialize};

/// Scalar activation applied coordinate-wise after each hidden layer.
///
/// The analysis cares about three properties, exposed as predicates below:
/// piecewise linearity (exact geometry), strict monotonicity (injective
/// pre-images), and surjectivity onto the reals (pre-images without range
/// clipping).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationKind {
    LeakyRelu { alpha: f64 },
    Relu,
    Elu,
    Sigmoid,
    Identity,
}

impl ActivationKind {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            ActivationKind::LeakyRelu { alpha } => {
                if t >= 0.0 {
                    t
                } else {
                    alpha * t
                }
            }
            ActivationKind::Relu => t.max(0.0),
            ActivationKind::Elu => {
                if t >= 0.0 {
                    t
                } else {
                    t.exp_m1()
                }
            }
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-t).exp()),
            ActivationKind::Identity => t,
        }
    }

    /// Inverse where one exists: strictly increasing kinds invert on their
    /// range; the non-injective kind returns `None` everywhere.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        match self {
            ActivationKind::LeakyRelu { alpha } => {
                Some(if y >= 0.0 { y } else { y / alpha })
            }
            ActivationKind::Relu => None,
            ActivationKind::Elu => {
                if y >= 0.0 {
                    Some(y)
                } else if y > -1.0 {
                    Some(y.ln_1p())
                } else {
                    None
                }
            }
            ActivationKind::Sigmoid => {
                if y > 0.0 && y < 1.0 {
                    Some((y / (1.0 - y)).ln())
                } else {
                    None
                }
            }
            ActivationKind::Identity => Some(y),
        }
    }

    /// Derivative away from breakpoints (used by the trainer).
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            ActivationKind::LeakyRelu { alpha } => {
                if t > 0.0 {
                    1.0
                } else {
                    *alpha
                }
            }
            ActivationKind::Relu => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Elu => {
                if t > 0.0 {
                    1.0
                } else {
                    t.exp()
                }
            }
            ActivationKind::Sigmoid => {
                let s = self.value(t);
                s * (1.0 - s)
            }
            ActivationKind::Identity => 1.0,
        }
    }

    pub fn piecewise_linear(&self) -> bool {
        matches!(
            self,
            ActivationKind::LeakyRelu { .. } | ActivationKind::Relu | ActivationKind::Identity
        )
    }

    pub fn strictly_increasing(&self) -> bool {
        !matches!(self, ActivationKind::Relu)
    }

    pub fn surjective_onto_reals(&self) -> bool {
        matches!(
            self,
            ActivationKind::LeakyRelu { .. } | ActivationKind::Identity
        )
    }

    /// Distance from `t` to the nearest derivative breakpoint, infinite for
    /// smooth kinds.
    pub fn breakpoint_distance(&self, t: f64) -> f64 {
        if self.piecewise_linear() && !matches!(self, ActivationKind::Identity) {
            t.abs()
        } else {
            f64::INFINITY
        }
    }

    /// Validate parameters (leak slope must sit strictly inside (0, 1)).
    pub fn validate(&self) -> Result<(), String> {
        if let ActivationKind::LeakyRelu { alpha } = self {
            if !alpha.is_finite() || *alpha <= 0.0 || *alpha >= 1.0 {
                return Err(format!(
                    "leaky_relu slope must lie strictly between 0 and 1, got {alpha}"
                ));
            }
        }
        Ok(())
    }
}
