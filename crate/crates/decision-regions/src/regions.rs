//! Forward construction: subdivide the analysis box into the polyhedral
//! cells on which every hidden unit keeps a fixed branch, tracking the
//! composed affine map per cell. Decision regions fall out by intersecting
//! each cell with the logit-dominance constraints of one class.

use crate::defaults;
use crate::geometry::{GeometryError, Polyhedron};
use crate::net::{ActivationKind, Network};
use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegionsError {
    #[error("layer {layer} uses {kind:?}, which is not piecewise linear; the exact engines only handle piecewise-linear activations")]
    NonPiecewiseLinear { layer: usize, kind: ActivationKind },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("class index {class} out of range for {n_classes} classes")]
    ClassOutOfRange { class: usize, n_classes: usize },
}

/// One linear piece of the network: the set of inputs sharing an activation
/// pattern, with the affine input-to-logit map valid on it.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Branch index per neuron per hidden layer: 1 = upper branch
    /// (preactivation >= 0), 0 = lower.
    pub pattern: Vec<Vec<u8>>,
    /// Input-space polyhedron, analysis box included.
    pub polyhedron: Polyhedron,
    /// Logits on this cell equal `logit_map * x + logit_offset`.
    pub logit_map: DMatrix<f64>,
    pub logit_offset: DVector<f64>,
    /// Strictly interior point.
    pub witness: Vec<f64>,
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Cell", 5)?;
        st.serialize_field("pattern", &self.pattern)?;
        st.serialize_field("polyhedron", &self.polyhedron)?;
        let m: Vec<Vec<f64>> = (0..self.logit_map.nrows())
            .map(|i| (0..self.logit_map.ncols()).map(|j| self.logit_map[(i, j)]).collect())
            .collect();
        st.serialize_field("M", &m)?;
        let v: Vec<f64> = self.logit_offset.iter().copied().collect();
        st.serialize_field("v", &v)?;
        st.serialize_field("witness", &self.witness)?;
        st.end()
    }
}

/// A cell intersected with one class's dominance constraints.
#[derive(Debug, Clone, Serialize)]
pub struct DecisionCell {
    /// 0-based class index.
    pub class_index: usize,
    pub pattern: Vec<Vec<u8>>,
    pub polyhedron: Polyhedron,
    pub witness: Vec<f64>,
}

struct Work {
    poly: Polyhedron,
    map: DMatrix<f64>,
    offset: DVector<f64>,
    pattern: Vec<Vec<u8>>,
    witness: Vec<f64>,
}

fn branch_slope(kind: &ActivationKind, branch: u8) -> f64 {
    match kind {
        ActivationKind::LeakyRelu { alpha } => {
            if branch == 1 {
                1.0
            } else {
                *alpha
            }
        }
        ActivationKind::Relu => {
            if branch == 1 {
                1.0
            } else {
                0.0
            }
        }
        ActivationKind::Identity => 1.0,
        _ => unreachable!("checked piecewise linear"),
    }
}

fn check_piecewise_linear(net: &Network) -> Result<(), RegionsError> {
    for (k, layer) in net.hidden_layers().iter().enumerate() {
        if !layer.activation.piecewise_linear() {
            return Err(RegionsError::NonPiecewiseLinear {
                layer: k + 1,
                kind: layer.activation,
            });
        }
    }
    Ok(())
}

/// Enumerate all activation cells of `net` inside the box `|x|_inf <= box_half`.
/// Cells come back sorted by pattern, each with an interior witness; their
/// closures cover the box and their interiors are pairwise disjoint.
pub fn enumerate_cells(
    net: &Network,
    box_half: f64,
    eps: f64,
) -> Result<Vec<Cell>, RegionsError> {
    check_piecewise_linear(net)?;
    let d = net.input_dim();
    let cube = Polyhedron::cube(d, box_half);
    let start_witness = cube
        .feasible_interior(defaults::LP_BOX_BOUND, eps)?
        .expect("analysis box has interior")
        .point;
    let mut frontier = vec![Work {
        poly: cube,
        map: DMatrix::identity(d, d),
        offset: DVector::zeros(d),
        pattern: Vec::new(),
        witness: start_witness,
    }];

    for layer in net.hidden_layers() {
        let width = layer.weights.ncols();
        let mut next_frontier = Vec::new();
        for work in frontier {
            let pre_map = layer.weights.transpose() * &work.map;
            let pre_offset = layer.weights.transpose() * &work.offset + &layer.bias;
            // split by one neuron at a time, pruning infeasible branches
            let mut parts = vec![(Vec::<u8>::new(), work.poly, work.witness)];
            for i in 0..width {
                let a: Vec<f64> = pre_map.row(i).iter().copied().collect();
                let u = pre_offset[i];
                let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                let mut split = Vec::with_capacity(parts.len() * 2);
                for (branches, poly, witness) in parts {
                    if norm <= 1e-12 {
                        // constant preactivation: the branch is decided
                        // globally on this cell, no hyperplane to add
                        let mut b = branches.clone();
                        b.push(if u > 0.0 { 1 } else { 0 });
                        split.push((b, poly, witness));
                        continue;
                    }
                    // upper branch: a . x + u >= 0
                    let neg_a: Vec<f64> = a.iter().map(|v| -v).collect();
                    let upper = poly.with_halfspace(neg_a, u).expect("nonzero row");
                    if let Some(w) = upper.feasible_interior(defaults::LP_BOX_BOUND, eps)? {
                        let mut b = branches.clone();
                        b.push(1);
                        split.push((b, upper, w.point));
                    }
                    // lower branch: a . x + u <= 0
                    let lower = poly.with_halfspace(a.clone(), -u).expect("nonzero row");
                    if let Some(w) = lower.feasible_interior(defaults::LP_BOX_BOUND, eps)? {
                        let mut b = branches.clone();
                        b.push(0);
                        split.push((b, lower, w.point));
                    }
                }
                parts = split;
            }
            for (branches, poly, witness) in parts {
                let slopes: Vec<f64> = branches
                    .iter()
                    .map(|&b| branch_slope(&layer.activation, b))
                    .collect();
                let dmat = DMatrix::from_diagonal(&DVector::from_vec(slopes));
                let mut pattern = work.pattern.clone();
                pattern.push(branches);
                next_frontier.push(Work {
                    poly,
                    map: &dmat * &pre_map,
                    offset: dmat * &pre_offset,
                    pattern,
                    witness,
                });
            }
        }
        frontier = next_frontier;
    }

    let out_w = net.output_layer().weights.transpose();
    let out_b = &net.output_layer().bias;
    let mut cells: Vec<Cell> = frontier
        .into_iter()
        .map(|w| Cell {
            pattern: w.pattern,
            polyhedron: w.poly,
            logit_map: &out_w * &w.map,
            logit_offset: &out_w * &w.offset + out_b,
            witness: w.witness,
        })
        .collect();
    cells.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    Ok(cells)
}

/// Number of linear pieces of the input-to-logit map inside the box.
pub fn count_regions(net: &Network, box_half: f64, eps: f64) -> Result<usize, RegionsError> {
    Ok(enumerate_cells(net, box_half, eps)?.len())
}

/// Intersect every cell with the dominance constraints of `class` (0-based):
/// keep the parts where that class's logit strictly beats all others.
pub fn decision_cells(
    net: &Network,
    class: usize,
    cells: &[Cell],
    eps: f64,
) -> Result<Vec<DecisionCell>, RegionsError> {
    let m = net.n_classes();
    if class >= m {
        return Err(RegionsError::ClassOutOfRange {
            class,
            n_classes: m,
        });
    }
    let mut out = Vec::new();
    'cells: for cell in cells {
        let d = cell.logit_map.ncols();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..m {
            if k == class {
                continue;
            }
            // require logit_class - logit_k > 0 on the cell
            let a: Vec<f64> = (0..d)
                .map(|j| cell.logit_map[(k, j)] - cell.logit_map[(class, j)])
                .collect();
            let c = cell.logit_offset[class] - cell.logit_offset[k];
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= 1e-12 {
                if c <= 1e-12 {
                    // this class can never strictly beat k on the cell
                    continue 'cells;
                }
                continue; // constant strict win, no constraint needed
            }
            rows.push(a);
            rhs.push(c);
        }
        let mut poly = cell.polyhedron.clone();
        for (a, c) in rows.into_iter().zip(rhs) {
            poly = poly.with_halfspace(a, c).expect("nonzero row");
        }
        if let Some(w) = poly.feasible_interior(defaults::LP_BOX_BOUND, eps)? {
            out.push(DecisionCell {
                class_index: class,
                pattern: cell.pattern.clone(),
                polyhedron: poly,
                witness: w.point,
            });
        }
    }
    Ok(out)
}
