//! Backward construction: start from the dominance cone of one class in
//! logit space and pull it back layer by layer. Affine stages use exact
//! halfspace pre-images; activation stages split by branch (orthants for
//! leaky units, zero-sets for hard ReLU). The result is the same region the
//! forward engine produces, built without enumerating cells the region never
//! touches.

use crate::defaults;
use crate::geometry::{GeometryError, Polyhedron};
use crate::net::{ActivationKind, Label, Network};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard-ReLU layers wider than this would branch into too many zero-sets.
pub const MAX_RELU_PREIMAGE_WIDTH: usize = 20;

#[derive(Debug, Error)]
pub enum PreimageError {
    #[error("layer {layer} uses {kind:?}; the backward engine needs piecewise-linear activations")]
    NonPiecewiseLinear { layer: usize, kind: ActivationKind },
    #[error("layer {layer} has width {width}; hard-ReLU pre-images branch per zero-set and are capped at width {MAX_RELU_PREIMAGE_WIDTH}")]
    WidthCap { layer: usize, width: usize },
    #[error("class index {class} out of range for {n_classes} classes")]
    ClassOutOfRange { class: usize, n_classes: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Finite union of closed polyhedra in a common dimension. Canonical form
/// keeps the pieces full-dimensional with pairwise disjoint interiors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyUnion {
    dim: usize,
    pieces: Vec<Polyhedron>,
}

impl PolyUnion {
    pub fn new(dim: usize) -> Self {
        PolyUnion {
            dim,
            pieces: Vec::new(),
        }
    }

    pub fn from_pieces(dim: usize, pieces: Vec<Polyhedron>) -> Self {
        debug_assert!(pieces.iter().all(|p| p.dim() == dim));
        PolyUnion { dim, pieces }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Polyhedron] {
        &self.pieces
    }

    pub fn n_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn push(&mut self, p: Polyhedron) {
        debug_assert_eq!(p.dim(), self.dim);
        self.pieces.push(p);
    }

    /// Membership in the closed union.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(x, tol))
    }

    /// Drop pieces that lie inside another piece. Cheaper than
    /// [`PolyUnion::canonicalize`] and enough to stop duplicate growth:
    /// overlap survives, but the union is unchanged and every kept piece
    /// contributes territory of its own.
    pub fn drop_contained(&self, box_bound: f64, tol: f64) -> Result<Self, GeometryError> {
        let mut witnesses = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            witnesses.push(p.max_slack_point(box_bound)?.0);
        }
        let contained = |inner: &Polyhedron, outer: &Polyhedron| -> Result<bool, GeometryError> {
            for i in 0..outer.n_rows() {
                let (a, c) = outer.row(i);
                match inner.maximize_direction(a, box_bound)? {
                    Some(v) if v <= c + tol => continue,
                    _ => return Ok(false),
                }
            }
            Ok(true)
        };
        let n = self.pieces.len();
        let mut dropped = vec![false; n];
        for i in 0..n {
            if dropped[i] {
                continue;
            }
            for j in 0..n {
                if i == j || dropped[j] || dropped[i] {
                    continue;
                }
                // a piece's deepest point must sit in any container
                if !self.pieces[j].contains(&witnesses[i], tol) {
                    continue;
                }
                if contained(&self.pieces[i], &self.pieces[j])? {
                    dropped[i] = true;
                }
            }
        }
        let kept = self
            .pieces
            .iter()
            .zip(&dropped)
            .filter(|(_, d)| !**d)
            .map(|(p, _)| p.clone())
            .collect();
        Ok(PolyUnion {
            dim: self.dim,
            pieces: kept,
        })
    }

    /// Drop pieces without interior, drop pieces covered by an earlier piece,
    /// and carve partial overlaps away so interiors are pairwise disjoint.
    /// The union of the result equals the closure of the interior of the
    /// original union. Worst case fragments multiply per kept piece; prefer
    /// [`PolyUnion::drop_contained`] when disjoint interiors are not needed.
    pub fn canonicalize(&self, box_bound: f64, eps: f64) -> Result<Self, GeometryError> {
        let mut kept: Vec<Polyhedron> = Vec::new();
        for piece in &self.pieces {
            if piece.feasible_interior(box_bound, eps)?.is_none() {
                continue;
            }
            let mut fragments = vec![piece.clone()];
            for base in &kept {
                let mut next = Vec::new();
                for frag in fragments {
                    if !overlaps_interior(&frag, base, box_bound, eps)? {
                        next.push(frag);
                        continue;
                    }
                    next.extend(subtract(&frag, base, box_bound, eps)?);
                }
                fragments = next;
            }
            for frag in fragments {
                kept.push(frag.remove_redundant(box_bound, eps)?);
            }
        }
        Ok(PolyUnion {
            dim: self.dim,
            pieces: kept,
        })
    }
}

fn overlaps_interior(
    p: &Polyhedron,
    q: &Polyhedron,
    box_bound: f64,
    eps: f64,
) -> Result<bool, GeometryError> {
    Ok(p.intersect(q)?.feasible_interior(box_bound, eps)?.is_some())
}

/// Closed set difference `p \ q` as full-dimensional fragments: split `p`
/// along each facet of `q`, keeping the outside parts; whatever remains at
/// the end lies inside `q` and is dropped.
fn subtract(
    p: &Polyhedron,
    q: &Polyhedron,
    box_bound: f64,
    eps: f64,
) -> Result<Vec<Polyhedron>, GeometryError> {
    let mut fragments = Vec::new();
    let mut core = p.clone();
    for i in 0..q.n_rows() {
        let (a, c) = q.row(i);
        let flipped: Vec<f64> = a.iter().map(|v| -v).collect();
        let outside = core.with_halfspace(flipped, -c).expect("unit row");
        if outside.feasible_interior(box_bound, eps)?.is_some() {
            fragments.push(outside);
        }
        core = core.with_halfspace(a.to_vec(), c).expect("unit row");
        if core.feasible_interior(box_bound, eps)?.is_none() {
            break;
        }
    }
    Ok(fragments)
}

/// What a backward stage did, for reports and debugging.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageKind {
    /// Dominance cone of the chosen class in logit space.
    Target { class_index: usize },
    /// Pre-image through the affine part of a layer (1-based; 0 names the
    /// output layer).
    AffinePreimage { layer: usize },
    /// Intersection with the activation's range before inverting it.
    RangeRestriction { layer: usize },
    /// Pre-image through the elementwise activation of a layer.
    ActivationPreimage { layer: usize },
    /// Intersection with the analysis box.
    BoxClip { box_half: f64 },
    /// Pieces whose interiors never strictly win the class vote are removed.
    StrictnessFilter,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub kind: StageKind,
    /// Space the stage's output lives in.
    pub dim: usize,
    pub n_pieces: usize,
    /// Snapshot of the union after the stage.
    pub pieces: Vec<Polyhedron>,
}

impl Stage {
    fn snapshot(kind: StageKind, set: &PolyUnion) -> Self {
        Stage {
            kind,
            dim: set.dim(),
            n_pieces: set.n_pieces(),
            pieces: set.pieces().to_vec(),
        }
    }
}

/// Per-stage snapshots for one backward run.
#[derive(Debug, Clone, Serialize)]
pub struct BackwardTrace {
    pub stages: Vec<Stage>,
}

/// One input-space piece of a backward-built region.
#[derive(Debug, Clone, Serialize)]
pub struct RegionPiece {
    pub polyhedron: Polyhedron,
    /// Strictly interior point that classifies to the region's class.
    pub witness: Vec<f64>,
}

/// A decision region as the backward engine sees it: closure of the set of
/// inputs in the box where `class_index` strictly wins.
#[derive(Debug, Clone, Serialize)]
pub struct BackwardRegion {
    pub class_index: usize,
    pub box_half: f64,
    pub eps: f64,
    pub pieces: Vec<RegionPiece>,
    pub trace: BackwardTrace,
}

/// Closed dominance cone of `class` in logit space: every other logit is
/// at most the chosen one.
pub fn target_set(n_classes: usize, class: usize) -> Result<PolyUnion, PreimageError> {
    if class >= n_classes {
        return Err(PreimageError::ClassOutOfRange {
            class,
            n_classes,
        });
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..n_classes {
        if k == class {
            continue;
        }
        let mut a = vec![0.0; n_classes];
        a[k] = 1.0;
        a[class] = -1.0;
        rows.push(a);
        rhs.push(0.0);
    }
    let poly = Polyhedron::from_rows(n_classes, rows, rhs)?;
    Ok(PolyUnion::from_pieces(n_classes, vec![poly]))
}

/// Pull a union back through `y = W^T z + b`.
pub fn affine_preimage_union(
    set: &PolyUnion,
    weights: &nalgebra::DMatrix<f64>,
    bias: &nalgebra::DVector<f64>,
) -> Result<PolyUnion, PreimageError> {
    let mut out = PolyUnion::new(weights.nrows());
    for piece in set.pieces() {
        let pre = piece.affine_preimage(weights, bias)?;
        if pre
            .feasible_interior(defaults::LP_BOX_BOUND, defaults::EPS_FEAS)?
            .is_some()
        {
            out.push(pre);
        }
    }
    Ok(out)
}

/// Pull a union back through one elementwise activation: the result is
/// `{ a : activation(a) elementwise in the set }`, as full-dimensional
/// pieces. Branches are pruned by feasibility as coordinates are processed.
pub fn activation_preimage(
    set: &PolyUnion,
    kind: &ActivationKind,
    eps: f64,
) -> Result<PolyUnion, PreimageError> {
    let dim = set.dim();
    match kind {
        ActivationKind::Identity => Ok(set.clone()),
        ActivationKind::LeakyRelu { alpha } => {
            let mut out = PolyUnion::new(dim);
            for piece in set.pieces() {
                // invertible per orthant: branch each coordinate by sign,
                // substituting y_i = alpha a_i on the negative side
                let mut branches = vec![piece.clone()];
                for i in 0..dim {
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for b in branches {
                        let mut pos_row = vec![0.0; dim];
                        pos_row[i] = -1.0;
                        let pos = b.with_halfspace(pos_row, 0.0).expect("unit row");
                        if pos
                            .feasible_interior(defaults::LP_BOX_BOUND, eps)?
                            .is_some()
                        {
                            next.push(pos);
                        }
                        let mut scales = vec![1.0; dim];
                        scales[i] = *alpha;
                        let mut neg_row = vec![0.0; dim];
                        neg_row[i] = 1.0;
                        let neg = b
                            .scale_columns(&scales)
                            .with_halfspace(neg_row, 0.0)
                            .expect("unit row");
                        if neg
                            .feasible_interior(defaults::LP_BOX_BOUND, eps)?
                            .is_some()
                        {
                            next.push(neg);
                        }
                    }
                    branches = next;
                }
                for b in branches {
                    out.push(b);
                }
            }
            Ok(out)
        }
        ActivationKind::Relu => {
            if dim > MAX_RELU_PREIMAGE_WIDTH {
                return Err(PreimageError::WidthCap {
                    layer: 0,
                    width: dim,
                });
            }
            let mut out = PolyUnion::new(dim);
            for piece in set.pieces() {
                // branch by zero-set: coordinate i either stays positive
                // (y_i = a_i >= 0) or collapses (a_i <= 0, y_i = 0). The
                // collapse is not invertible, so fragments from different
                // parents can overlap; intermediate pruning is by closed
                // feasibility only, full-dimensionality is checked last.
                let mut branches = vec![piece.clone()];
                for i in 0..dim {
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for b in branches {
                        let mut pos_row = vec![0.0; dim];
                        pos_row[i] = -1.0;
                        let pos = b.with_halfspace(pos_row, 0.0).expect("unit row");
                        if closed_feasible(&pos)? {
                            next.push(pos);
                        }
                        let mut pinned = vec![false; dim];
                        pinned[i] = true;
                        if let Some(zeroed) = b.zero_columns(&pinned) {
                            let mut neg_row = vec![0.0; dim];
                            neg_row[i] = 1.0;
                            let neg =
                                zeroed.with_halfspace(neg_row, 0.0).expect("unit row");
                            if closed_feasible(&neg)? {
                                next.push(neg);
                            }
                        }
                    }
                    branches = next;
                }
                for b in branches {
                    if b.feasible_interior(defaults::LP_BOX_BOUND, eps)?.is_some() {
                        out.push(b);
                    }
                }
            }
            // zero-set collapses duplicate fragments across parents; keep
            // only pieces that contribute territory of their own
            Ok(out.drop_contained(defaults::LP_BOX_BOUND, eps)?)
        }
        other => Err(PreimageError::NonPiecewiseLinear {
            layer: 0,
            kind: *other,
        }),
    }
}

fn closed_feasible(p: &Polyhedron) -> Result<bool, GeometryError> {
    let (_, slack) = p.max_slack_point(defaults::LP_BOX_BOUND)?;
    Ok(slack >= -1e-9)
}

fn with_layer(err: PreimageError, layer: usize) -> PreimageError {
    match err {
        PreimageError::NonPiecewiseLinear { kind, .. } => {
            PreimageError::NonPiecewiseLinear { layer, kind }
        }
        PreimageError::WidthCap { width, .. } => PreimageError::WidthCap { layer, width },
        e => e,
    }
}

/// Restrict a union to the activation's range. Only hard ReLU restricts
/// anything (its image is the nonnegative orthant); identity and leaky
/// units are onto.
fn range_restrict(
    set: &PolyUnion,
    kind: &ActivationKind,
    eps: f64,
) -> Result<Option<PolyUnion>, PreimageError> {
    if !matches!(kind, ActivationKind::Relu) {
        return Ok(None);
    }
    let dim = set.dim();
    let mut out = PolyUnion::new(dim);
    for piece in set.pieces() {
        let mut clipped = piece.clone();
        for i in 0..dim {
            let mut row = vec![0.0; dim];
            row[i] = -1.0;
            clipped = clipped.with_halfspace(row, 0.0).expect("unit row");
        }
        if clipped
            .feasible_interior(defaults::LP_BOX_BOUND, eps)?
            .is_some()
        {
            out.push(clipped);
        }
    }
    Ok(Some(out))
}

/// Build the decision region of `class` (0-based) inside the box
/// `|x|_inf <= box_half` by pulling the logit dominance cone back through
/// the network, recording a piece count per stage.
pub fn decision_region_backward(
    net: &Network,
    class: usize,
    box_half: f64,
    eps: f64,
) -> Result<BackwardRegion, PreimageError> {
    for (k, layer) in net.hidden_layers().iter().enumerate() {
        if !layer.activation.piecewise_linear() {
            return Err(PreimageError::NonPiecewiseLinear {
                layer: k + 1,
                kind: layer.activation,
            });
        }
        if matches!(layer.activation, ActivationKind::Relu)
            && layer.weights.ncols() > MAX_RELU_PREIMAGE_WIDTH
        {
            return Err(PreimageError::WidthCap {
                layer: k + 1,
                width: layer.weights.ncols(),
            });
        }
    }

    let mut stages = Vec::new();
    let mut set = target_set(net.n_classes(), class)?;
    stages.push(Stage::snapshot(
        StageKind::Target { class_index: class },
        &set,
    ));

    let out_layer = net.output_layer();
    set = affine_preimage_union(&set, &out_layer.weights, &out_layer.bias)?;
    stages.push(Stage::snapshot(StageKind::AffinePreimage { layer: 0 }, &set));

    for (idx, layer) in net.hidden_layers().iter().enumerate().rev() {
        let layer_no = idx + 1;
        if let Some(clipped) = range_restrict(&set, &layer.activation, eps)? {
            set = clipped;
            stages.push(Stage::snapshot(
                StageKind::RangeRestriction { layer: layer_no },
                &set,
            ));
        }
        set = activation_preimage(&set, &layer.activation, eps)
            .map_err(|e| with_layer(e, layer_no))?;
        stages.push(Stage::snapshot(
            StageKind::ActivationPreimage { layer: layer_no },
            &set,
        ));
        set = affine_preimage_union(&set, &layer.weights, &layer.bias)?;
        stages.push(Stage::snapshot(
            StageKind::AffinePreimage { layer: layer_no },
            &set,
        ));
    }

    let cube = Polyhedron::cube(net.input_dim(), box_half);
    let mut clipped = PolyUnion::new(net.input_dim());
    for piece in set.pieces() {
        let c = piece.intersect(&cube)?;
        if c.feasible_interior(defaults::LP_BOX_BOUND, eps)?.is_some() {
            clipped.push(c);
        }
    }
    set = clipped;
    stages.push(Stage::snapshot(StageKind::BoxClip { box_half }, &set));

    // Rank-deficient stages can inflate exact-tie boundaries into
    // full-dimensional pieces. Each final piece carries one activation
    // pattern, so the logit gaps are affine on it: a gap that vanishes at an
    // interior point while staying nonnegative vanishes identically, and the
    // piece is tie everywhere. Dropping pieces whose witness does not
    // strictly classify removes exactly those.
    let mut pieces = Vec::new();
    for piece in set.pieces() {
        let tidy = piece.remove_redundant(defaults::LP_BOX_BOUND, eps)?;
        let witness = match tidy.feasible_interior(defaults::LP_BOX_BOUND, eps)? {
            Some(w) => w.point,
            None => continue,
        };
        let decision = net.classify(&witness, defaults::CLASSIFY_EPS);
        if decision.label == Label::Class(class) {
            pieces.push(RegionPiece {
                polyhedron: tidy,
                witness,
            });
        }
    }
    stages.push(Stage {
        kind: StageKind::StrictnessFilter,
        dim: net.input_dim(),
        n_pieces: pieces.len(),
        pieces: pieces.iter().map(|p| p.polyhedron.clone()).collect(),
    });

    Ok(BackwardRegion {
        class_index: class,
        box_half,
        eps,
        pieces,
        trace: BackwardTrace { stages },
    })
}
