//! Closed convex polyhedra `{ x : A x <= c }` with unit-norm rows, plus the
//! LP-backed predicates the region machinery is built on.
//!
//! Open decision regions are represented by the closure; strictness is
//! recovered downstream by checking witnesses against the network itself.

pub mod lp;
mod rank;

pub use rank::{numerical_rank, RankReport};

use lp::{LpError, LpOutcome};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Norm below which a row is considered identically zero.
const ZERO_ROW_TOL: f64 = 1e-12;
/// Offset tolerance when classifying a zero row as trivially true/false.
const ZERO_RHS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("non-finite entry in row {0}")]
    NonFinite(usize),
    #[error("row {0} is identically zero with negative offset (trivially infeasible)")]
    TriviallyInfeasible(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// A strictly interior point together with its distance to the nearest face.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteriorWitness {
    pub point: Vec<f64>,
    pub slack: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    c: Vec<f64>,
}

/// Intersection of closed halfspaces. Rows are unit-normalized at
/// construction; zero rows with a nonnegative offset are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    dim: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl Serialize for Polyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            a: self.rows.clone(),
            c: self.rhs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let dim = raw.a.first().map(|r| r.len()).unwrap_or(0);
        Polyhedron::from_rows(dim, raw.a, raw.c).map_err(serde::de::Error::custom)
    }
}

impl Polyhedron {
    /// Build from raw halfspaces `rows[i] . x <= rhs[i]`, normalizing each
    /// row to unit length. Zero rows that are trivially satisfied are
    /// dropped; a zero row with negative offset is rejected.
    pub fn from_rows(
        dim: usize,
        rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        if rows.len() != rhs.len() {
            return Err(GeometryError::DimMismatch(format!(
                "{} rows but {} offsets",
                rows.len(),
                rhs.len()
            )));
        }
        let mut out = Polyhedron {
            dim,
            rows: Vec::with_capacity(rows.len()),
            rhs: Vec::with_capacity(rhs.len()),
        };
        for (i, (a, c)) in rows.into_iter().zip(rhs).enumerate() {
            if a.len() != dim {
                return Err(GeometryError::DimMismatch(format!(
                    "row {i} has length {} in dimension {dim}",
                    a.len()
                )));
            }
            if !c.is_finite() || a.iter().any(|v| !v.is_finite()) {
                return Err(GeometryError::NonFinite(i));
            }
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= ZERO_ROW_TOL {
                if c < -ZERO_RHS_TOL {
                    return Err(GeometryError::TriviallyInfeasible(i));
                }
                continue;
            }
            if (norm - 1.0).abs() <= 1e-12 {
                // already unit: skip the division so normalization is
                // idempotent at the last bit (JSON round trips byte-exactly)
                out.rows.push(a);
                out.rhs.push(c);
                continue;
            }
            out.rows.push(a.iter().map(|v| v / norm).collect());
            out.rhs.push(c / norm);
        }
        Ok(out)
    }

    /// The whole space: no constraints.
    pub fn full_space(dim: usize) -> Self {
        Polyhedron {
            dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Canonical empty set (used when an exact operation collapses a piece).
    pub(crate) fn empty(dim: usize) -> Self {
        assert!(dim >= 1, "empty marker needs at least one dimension");
        let mut e1 = vec![0.0; dim];
        e1[0] = 1.0;
        let mut m1 = vec![0.0; dim];
        m1[0] = -1.0;
        Polyhedron {
            dim,
            rows: vec![e1, m1],
            rhs: vec![-1.0, -1.0],
        }
    }

    /// Axis-aligned cube `|x_i| <= half`.
    pub fn cube(dim: usize, half: f64) -> Self {
        let mut rows = Vec::with_capacity(2 * dim);
        let mut rhs = Vec::with_capacity(2 * dim);
        for d in 0..dim {
            let mut plus = vec![0.0; dim];
            plus[d] = 1.0;
            let mut minus = vec![0.0; dim];
            minus[d] = -1.0;
            rows.push(plus);
            rows.push(minus);
            rhs.push(half);
            rhs.push(half);
        }
        Polyhedron { dim, rows, rhs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn row(&self, i: usize) -> (&[f64], f64) {
        (&self.rows[i], self.rhs[i])
    }

    /// Append one normalized halfspace `a . x <= c`.
    pub fn with_halfspace(&self, a: Vec<f64>, c: f64) -> Result<Self, GeometryError> {
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone();
        rows.push(a);
        rhs.push(c);
        Polyhedron::from_rows(self.dim, rows, rhs)
    }

    /// Conjunction of two systems over the same space.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Self, GeometryError> {
        if self.dim != other.dim {
            return Err(GeometryError::DimMismatch(format!(
                "intersect {} with {}",
                self.dim, other.dim
            )));
        }
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone();
        rows.extend(other.rows.iter().cloned());
        rhs.extend(other.rhs.iter().cloned());
        Ok(Polyhedron {
            dim: self.dim,
            rows,
            rhs,
        })
    }

    /// Closed membership test with additive tolerance.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        self.rows.iter().zip(&self.rhs).all(|(a, c)| {
            a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= c + tol
        })
    }

    /// Exact pre-image under the affine map `h(x) = W^T x + b`, where `W`
    /// has shape `(in_dim, out_dim)` and `self` lives in the output space.
    /// Row `a . y <= c` becomes `(W a) . x <= c - a . b`.
    pub fn affine_preimage(
        &self,
        w: &DMatrix<f64>,
        b: &DVector<f64>,
    ) -> Result<Self, GeometryError> {
        if w.ncols() != self.dim || b.len() != self.dim {
            return Err(GeometryError::DimMismatch(format!(
                "map into R^{}x{} applied to polyhedron in R^{}",
                w.nrows(),
                w.ncols(),
                self.dim
            )));
        }
        let in_dim = w.nrows();
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut rhs = Vec::with_capacity(self.rows.len());
        for (a, &c) in self.rows.iter().zip(&self.rhs) {
            let av = DVector::from_column_slice(a);
            let new_a = w * &av;
            let new_c = c - av.dot(b);
            let norm = new_a.norm();
            if norm <= ZERO_ROW_TOL {
                if new_c < -ZERO_RHS_TOL {
                    // the map's range misses this halfspace entirely
                    return Ok(Polyhedron::empty(in_dim));
                }
                continue;
            }
            rows.push(new_a.iter().map(|v| v / norm).collect());
            rhs.push(new_c / norm);
        }
        Ok(Polyhedron {
            dim: in_dim,
            rows,
            rhs,
        })
    }

    /// Rescale coordinate `j` by `scales[j] > 0`: the result is the
    /// pre-image of `self` under `x -> diag(scales) x`.
    pub(crate) fn scale_columns(&self, scales: &[f64]) -> Self {
        debug_assert_eq!(scales.len(), self.dim);
        debug_assert!(scales.iter().all(|&s| s > 0.0));
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut rhs = Vec::with_capacity(self.rows.len());
        for (a, &c) in self.rows.iter().zip(&self.rhs) {
            let scaled: Vec<f64> = a.iter().zip(scales).map(|(ai, s)| ai * s).collect();
            let norm = scaled.iter().map(|v| v * v).sum::<f64>().sqrt();
            rows.push(scaled.iter().map(|v| v / norm).collect());
            rhs.push(c / norm);
        }
        Polyhedron {
            dim: self.dim,
            rows,
            rhs,
        }
    }

    /// Substitute 0 for every coordinate in `pinned`; returns `None` when a
    /// row degenerates to an unsatisfiable constant.
    pub(crate) fn zero_columns(&self, pinned: &[bool]) -> Option<Self> {
        debug_assert_eq!(pinned.len(), self.dim);
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut rhs = Vec::with_capacity(self.rows.len());
        for (a, &c) in self.rows.iter().zip(&self.rhs) {
            let masked: Vec<f64> = a
                .iter()
                .zip(pinned)
                .map(|(ai, &p)| if p { 0.0 } else { *ai })
                .collect();
            let norm = masked.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= ZERO_ROW_TOL {
                if c < -ZERO_RHS_TOL {
                    return None;
                }
                continue;
            }
            rows.push(masked.iter().map(|v| v / norm).collect());
            rhs.push(c / norm);
        }
        Some(Polyhedron {
            dim: self.dim,
            rows,
            rhs,
        })
    }

    fn slack_bound(&self, box_bound: f64) -> f64 {
        let max_c = self.rhs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        2.0 * box_bound * (self.dim.max(1) as f64).sqrt() + max_c + 1.0
    }

    /// Largest-slack (Chebyshev) point within `|x|_inf <= box_bound`.
    /// Returns the point and the signed slack; a negative slack means the
    /// system is infeasible inside the box.
    pub fn max_slack_point(&self, box_bound: f64) -> Result<(Vec<f64>, f64), GeometryError> {
        let n = self.dim;
        let s_bound = self.slack_bound(box_bound);
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut rows = Vec::with_capacity(self.rows.len());
        for a in &self.rows {
            let mut r = Vec::with_capacity(n + 1);
            r.extend_from_slice(a);
            r.push(1.0);
            rows.push(r);
        }
        let mut lower = vec![-box_bound; n + 1];
        let mut upper = vec![box_bound; n + 1];
        lower[n] = -s_bound;
        upper[n] = s_bound;
        match lp::maximize(&obj, &rows, &self.rhs, &lower, &upper)? {
            LpOutcome::Optimal(sol) => Ok((sol.x[..n].to_vec(), sol.x[n])),
            // cannot happen: the slack variable makes every system satisfiable
            LpOutcome::Infeasible => Ok((vec![0.0; n], -s_bound)),
        }
    }

    /// Interior witness if the polyhedron has slack greater than `eps`
    /// somewhere inside the box.
    pub fn feasible_interior(
        &self,
        box_bound: f64,
        eps: f64,
    ) -> Result<Option<InteriorWitness>, GeometryError> {
        let (point, slack) = self.max_slack_point(box_bound)?;
        if slack > eps {
            Ok(Some(InteriorWitness { point, slack }))
        } else {
            Ok(None)
        }
    }

    /// Point in the relative interior of the facet induced by `row`: the row
    /// is pinned to equality while every other row keeps slack > `eps`.
    /// Rows duplicating the pinned hyperplane (either orientation) are
    /// treated as part of the equality.
    pub fn facet_interior_point(
        &self,
        row: usize,
        box_bound: f64,
        eps: f64,
    ) -> Result<Option<InteriorWitness>, GeometryError> {
        let n = self.dim;
        let (fa, fc) = (self.rows[row].clone(), self.rhs[row]);
        let s_bound = self.slack_bound(box_bound);
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        // pinned equality as a row pair without slack
        let mut eq_plus = fa.clone();
        eq_plus.push(0.0);
        let mut eq_minus: Vec<f64> = fa.iter().map(|v| -v).collect();
        eq_minus.push(0.0);
        rows.push(eq_plus);
        rhs.push(fc);
        rows.push(eq_minus);
        rhs.push(-fc);
        for (i, (a, &c)) in self.rows.iter().zip(&self.rhs).enumerate() {
            if i == row || same_hyperplane(a, c, &fa, fc) {
                continue;
            }
            let mut r = Vec::with_capacity(n + 1);
            r.extend_from_slice(a);
            r.push(1.0);
            rows.push(r);
            rhs.push(c);
        }
        let mut lower = vec![-box_bound; n + 1];
        let mut upper = vec![box_bound; n + 1];
        lower[n] = -s_bound;
        upper[n] = s_bound;
        match lp::maximize(&obj, &rows, &rhs, &lower, &upper)? {
            LpOutcome::Optimal(sol) if sol.x[n] > eps => Ok(Some(InteriorWitness {
                point: sol.x[..n].to_vec(),
                slack: sol.x[n],
            })),
            _ => Ok(None),
        }
    }

    /// Drop every row whose removal leaves the feasible set unchanged inside
    /// the box. Infeasible systems are returned untouched.
    pub fn remove_redundant(&self, box_bound: f64, eps: f64) -> Result<Self, GeometryError> {
        let (_, slack) = self.max_slack_point(box_bound)?;
        if slack < -eps {
            return Ok(self.clone());
        }
        let lower = vec![-box_bound; self.dim];
        let upper = vec![box_bound; self.dim];
        let mut keep: Vec<bool> = vec![true; self.rows.len()];
        for i in 0..self.rows.len() {
            let rest_rows: Vec<Vec<f64>> = (0..self.rows.len())
                .filter(|&j| j != i && keep[j])
                .map(|j| self.rows[j].clone())
                .collect();
            let rest_rhs: Vec<f64> = (0..self.rows.len())
                .filter(|&j| j != i && keep[j])
                .map(|j| self.rhs[j])
                .collect();
            match lp::maximize(&self.rows[i], &rest_rows, &rest_rhs, &lower, &upper)? {
                LpOutcome::Optimal(sol) => {
                    if sol.value <= self.rhs[i] + eps {
                        keep[i] = false;
                    }
                }
                LpOutcome::Infeasible => {}
            }
        }
        let rows: Vec<Vec<f64>> = (0..self.rows.len())
            .filter(|&i| keep[i])
            .map(|i| self.rows[i].clone())
            .collect();
        let rhs: Vec<f64> = (0..self.rows.len())
            .filter(|&i| keep[i])
            .map(|i| self.rhs[i])
            .collect();
        Ok(Polyhedron {
            dim: self.dim,
            rows,
            rhs,
        })
    }

    /// Coordinate-wise min/max over the polyhedron clipped to the box.
    pub fn bounding_box(&self, box_bound: f64) -> Result<Vec<(f64, f64)>, GeometryError> {
        let lower = vec![-box_bound; self.dim];
        let upper = vec![box_bound; self.dim];
        let mut out = Vec::with_capacity(self.dim);
        for d in 0..self.dim {
            let mut obj = vec![0.0; self.dim];
            obj[d] = -1.0;
            let lo = match lp::maximize(&obj, &self.rows, &self.rhs, &lower, &upper)? {
                LpOutcome::Optimal(sol) => -sol.value,
                LpOutcome::Infeasible => return Ok(vec![(f64::NAN, f64::NAN); self.dim]),
            };
            obj[d] = 1.0;
            let hi = match lp::maximize(&obj, &self.rows, &self.rhs, &lower, &upper)? {
                LpOutcome::Optimal(sol) => sol.value,
                LpOutcome::Infeasible => return Ok(vec![(f64::NAN, f64::NAN); self.dim]),
            };
            out.push((lo, hi));
        }
        Ok(out)
    }

    /// Maximum of `a . x` over the polyhedron inside the box, or `None`
    /// when the system is infeasible.
    pub fn maximize_direction(
        &self,
        a: &[f64],
        box_bound: f64,
    ) -> Result<Option<f64>, GeometryError> {
        let lower = vec![-box_bound; self.dim];
        let upper = vec![box_bound; self.dim];
        match lp::maximize(a, &self.rows, &self.rhs, &lower, &upper)? {
            LpOutcome::Optimal(sol) => Ok(Some(sol.value)),
            LpOutcome::Infeasible => Ok(None),
        }
    }
}

/// Whether two unit rows describe the same oriented or opposite hyperplane.
pub(crate) fn same_hyperplane(a: &[f64], c: f64, b: &[f64], d: f64) -> bool {
    let same = a
        .iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= 1e-9)
        && (c - d).abs() <= 1e-9;
    let flipped = a
        .iter()
        .zip(b)
        .all(|(x, y)| (x + y).abs() <= 1e-9)
        && (c + d).abs() <= 1e-9;
    same || flipped
}
