//! Connectivity of a class's decision region: which pieces glue to which
//! across shared facets, how many connected components remain, and explicit
//! polyline certificates between points (or a witness that none exists).
//!
//! Two pieces are adjacent when they share a full (d-1)-dimensional facet
//! whose relative interior still strictly classifies to the class. The logit
//! gaps are affine on each piece, so their minimum is concave along a shared
//! facet: it is either positive on the whole relative interior or zero on
//! all of it, and checking one relative-interior point decides the edge.

use crate::defaults;
use crate::geometry::{GeometryError, Polyhedron};
use crate::net::{Label, Network};
use crate::preimage::{decision_region_backward, PreimageError, RegionPiece};
use crate::regions::{decision_cells, enumerate_cells, RegionsError};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConnectivityError {
    #[error(transparent)]
    Regions(#[from] RegionsError),
    #[error(transparent)]
    Preimage(#[from] PreimageError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("point {point:?} does not strictly classify to class index {class}: {got}")]
    PointNotInClass {
        point: Vec<f64>,
        class: usize,
        got: String,
    },
    #[error("point {point:?} lies outside the analysis box (half-width {box_half})")]
    PointOutsideBox { point: Vec<f64>, box_half: f64 },
    #[error("path validation failed at {point:?}: the sampled margin is not positive")]
    PathValidation { point: Vec<f64> },
}

/// Which construction produces the region pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Forward,
    Backward,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Engine::Forward => write!(f, "forward"),
            Engine::Backward => write!(f, "backward"),
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Engine::Forward),
            "backward" => Ok(Engine::Backward),
            other => Err(format!("unknown engine '{other}', expected forward or backward")),
        }
    }
}

/// Decision region of `class` (0-based) inside the box, as closed pieces
/// with interior witnesses, built by the selected engine.
pub fn region_pieces(
    net: &Network,
    class: usize,
    box_half: f64,
    eps: f64,
    engine: Engine,
) -> Result<Vec<RegionPiece>, ConnectivityError> {
    match engine {
        Engine::Forward => {
            let cells = enumerate_cells(net, box_half, eps)?;
            let dcs = decision_cells(net, class, &cells, eps)?;
            Ok(dcs
                .into_iter()
                .map(|c| RegionPiece {
                    polyhedron: c.polyhedron,
                    witness: c.witness,
                })
                .collect())
        }
        Engine::Backward => {
            Ok(decision_region_backward(net, class, box_half, eps)?.pieces)
        }
    }
}

/// One facet gluing between two pieces.
#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    /// Relative-interior point of the shared facet.
    pub facet_point: Vec<f64>,
    /// Classification margin at that point.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdjacencyGraph {
    pub n_pieces: usize,
    pub edges: Vec<Edge>,
}

impl AdjacencyGraph {
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_pieces];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    pub fn facet_points(&self) -> HashMap<(usize, usize), Vec<f64>> {
        let mut map = HashMap::new();
        for e in &self.edges {
            map.insert((e.i, e.j), e.facet_point.clone());
            map.insert((e.j, e.i), e.facet_point.clone());
        }
        map
    }
}

const ROW_MATCH_TOL: f64 = 1e-7;
const BBOX_TOL: f64 = 1e-7;

fn loosely_opposite(a: &[f64], c: f64, b: &[f64], d: f64, tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x + y).abs() <= tol) && (c + d).abs() <= tol
}

fn loosely_same(a: &[f64], c: f64, b: &[f64], d: f64, tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol) && (c - d).abs() <= tol
}

/// Stack `p`'s rows before `q`'s, snapping any `q` row that loosely
/// duplicates `p`'s row `pin` (either orientation) onto that row exactly, so
/// the facet LP treats it as part of the pinned equality.
fn stacked_for_pin(p: &Polyhedron, q: &Polyhedron, pin: usize) -> Polyhedron {
    let (pa, pc) = p.row(pin);
    let mut rows: Vec<Vec<f64>> = p.rows().to_vec();
    let mut rhs: Vec<f64> = p.rhs().to_vec();
    for i in 0..q.n_rows() {
        let (qa, qc) = q.row(i);
        if loosely_opposite(pa, pc, qa, qc, ROW_MATCH_TOL) {
            rows.push(pa.iter().map(|v| -v).collect());
            rhs.push(-pc);
        } else if loosely_same(pa, pc, qa, qc, ROW_MATCH_TOL) {
            rows.push(pa.to_vec());
            rhs.push(pc);
        } else {
            rows.push(qa.to_vec());
            rhs.push(qc);
        }
    }
    Polyhedron::from_rows(p.dim(), rows, rhs).expect("stacking unit rows")
}

fn bboxes_overlap(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|((alo, ahi), (blo, bhi))| *alo <= bhi + tol && *blo <= ahi + tol)
}

/// Facet-adjacency graph over the pieces of one class's region. An edge
/// means the open region crosses the shared facet.
pub fn build_adjacency(
    pieces: &[RegionPiece],
    net: &Network,
    class: usize,
    eps: f64,
) -> Result<AdjacencyGraph, ConnectivityError> {
    let mut bboxes = Vec::with_capacity(pieces.len());
    for p in pieces {
        bboxes.push(p.polyhedron.bounding_box(defaults::LP_BOX_BOUND)?);
    }
    let mut edges = Vec::new();
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            if !bboxes_overlap(&bboxes[i], &bboxes[j], BBOX_TOL) {
                continue;
            }
            let p = &pieces[i].polyhedron;
            let q = &pieces[j].polyhedron;
            // interior-disjoint convex pieces meet inside one hyperplane; it
            // must show up as an opposite row pair
            let mut found = None;
            'rows: for r in 0..p.n_rows() {
                let (pa, pc) = p.row(r);
                let mut is_candidate = false;
                for s in 0..q.n_rows() {
                    let (qa, qc) = q.row(s);
                    if loosely_opposite(pa, pc, qa, qc, ROW_MATCH_TOL) {
                        is_candidate = true;
                        break;
                    }
                }
                if !is_candidate {
                    continue;
                }
                let stacked = stacked_for_pin(p, q, r);
                if let Some(w) =
                    stacked.facet_interior_point(r, defaults::LP_BOX_BOUND, eps)?
                {
                    found = Some(w.point);
                    break 'rows;
                }
            }
            if let Some(point) = found {
                let d = net.classify(&point, 0.0);
                if d.label == Label::Class(class) && d.margin > eps {
                    edges.push(Edge {
                        i,
                        j,
                        facet_point: point,
                        margin: d.margin,
                    });
                }
            }
        }
    }
    Ok(AdjacencyGraph {
        n_pieces: pieces.len(),
        edges,
    })
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of the adjacency graph, each sorted, ordered by
/// first piece index.
pub fn connected_components(graph: &AdjacencyGraph) -> Vec<Vec<usize>> {
    let mut dsu = Dsu::new(graph.n_pieces);
    for e in &graph.edges {
        dsu.union(e.i, e.j);
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..graph.n_pieces {
        by_root.entry(dsu.find(i)).or_default().push(i);
    }
    let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Single irredundant halfspace description valid for a whole component:
/// keep the rows satisfied by every piece, strip analysis-box rows, and
/// drop what is then redundant. When the component is convex this is its
/// exact description (the box stripped away).
pub fn merged_constraints(
    pieces: &[RegionPiece],
    component: &[usize],
    box_half: f64,
    eps: f64,
) -> Result<Polyhedron, ConnectivityError> {
    let dim = pieces[component[0]].polyhedron.dim();
    let mut cand_rows: Vec<Vec<f64>> = Vec::new();
    let mut cand_rhs: Vec<f64> = Vec::new();
    for &idx in component {
        let p = &pieces[idx].polyhedron;
        for r in 0..p.n_rows() {
            let (a, c) = p.row(r);
            let dup = cand_rows
                .iter()
                .zip(&cand_rhs)
                .any(|(b, &d)| loosely_same(a, c, b, d, 1e-9));
            if !dup {
                cand_rows.push(a.to_vec());
                cand_rhs.push(c);
            }
        }
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    'cand: for (a, c) in cand_rows.into_iter().zip(cand_rhs) {
        // valid for the whole component?
        for &idx in component {
            match pieces[idx]
                .polyhedron
                .maximize_direction(&a, defaults::LP_BOX_BOUND)?
            {
                Some(v) if v <= c + ROW_MATCH_TOL => {}
                _ => continue 'cand,
            }
        }
        // analysis-box rows are artifacts of the clipping, not the region
        let axis = a
            .iter()
            .filter(|v| v.abs() > 1e-9)
            .count()
            == 1
            && a.iter().any(|v| (v.abs() - 1.0).abs() <= 1e-9);
        if axis && (c - box_half).abs() <= 1e-9 {
            continue;
        }
        rows.push(a);
        rhs.push(c);
    }
    let merged = Polyhedron::from_rows(dim, rows, rhs)?;
    Ok(merged.remove_redundant(defaults::LP_BOX_BOUND, eps)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub piece_indices: Vec<usize>,
    /// Interior point of the first piece.
    pub witness: Vec<f64>,
    /// Whether the component presses against the analysis box.
    pub touches_box: bool,
    /// Merged constraint list (box rows stripped).
    pub merged: Polyhedron,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentsReport {
    pub class_index: usize,
    pub engine: Engine,
    pub box_half: f64,
    pub eps: f64,
    pub n_pieces: usize,
    pub components: Vec<ComponentSummary>,
}

fn piece_touches_box(
    piece: &Polyhedron,
    box_half: f64,
) -> Result<bool, ConnectivityError> {
    let bb = piece.bounding_box(defaults::LP_BOX_BOUND)?;
    Ok(bb
        .iter()
        .any(|(lo, hi)| (lo + box_half).abs() <= BBOX_TOL || (hi - box_half).abs() <= BBOX_TOL))
}

/// Component structure of one class's region under the chosen engine.
pub fn components_report(
    net: &Network,
    class: usize,
    box_half: f64,
    eps: f64,
    engine: Engine,
) -> Result<(Vec<RegionPiece>, AdjacencyGraph, ComponentsReport), ConnectivityError> {
    let pieces = region_pieces(net, class, box_half, eps, engine)?;
    let graph = build_adjacency(&pieces, net, class, eps)?;
    let comps = connected_components(&graph);
    let mut summaries = Vec::with_capacity(comps.len());
    for comp in &comps {
        let mut touches = false;
        for &idx in comp {
            if piece_touches_box(&pieces[idx].polyhedron, box_half)? {
                touches = true;
                break;
            }
        }
        summaries.push(ComponentSummary {
            piece_indices: comp.clone(),
            witness: pieces[comp[0]].witness.clone(),
            touches_box: touches,
            merged: merged_constraints(&pieces, comp, box_half, eps)?,
        });
    }
    let report = ComponentsReport {
        class_index: class,
        engine,
        box_half,
        eps,
        n_pieces: pieces.len(),
        components: summaries,
    };
    Ok((pieces, graph, report))
}

/// Region analysis with box growth: if the region splits into several
/// components and some component presses against the box, the box doubles
/// (at most `MAX_DOUBLINGS` times) in case the pieces merge further out.
pub const MAX_DOUBLINGS: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub class_index: usize,
    pub engine: Engine,
    pub initial_box_half: f64,
    pub final_box_half: f64,
    pub doublings: usize,
    /// Component structure at the final box size.
    pub report: ComponentsReport,
    /// True when the doubling cap was hit while components still touch the
    /// box; counts may change on a larger box.
    pub unsettled: bool,
}

pub fn analyze(
    net: &Network,
    class: usize,
    initial_box_half: f64,
    eps: f64,
    engine: Engine,
) -> Result<AnalyzeReport, ConnectivityError> {
    let mut half = initial_box_half;
    let mut doublings = 0;
    loop {
        let (_, _, report) = components_report(net, class, half, eps, engine)?;
        let multi = report.components.len() > 1;
        let touching = report.components.iter().any(|c| c.touches_box);
        if multi && touching && doublings < MAX_DOUBLINGS {
            half *= 2.0;
            doublings += 1;
            continue;
        }
        return Ok(AnalyzeReport {
            class_index: class,
            engine,
            initial_box_half,
            final_box_half: half,
            doublings,
            unsettled: multi && touching,
            report,
        });
    }
}

/// Checkable connectivity certificate: a polyline inside the open region.
#[derive(Debug, Clone, Serialize)]
pub struct PathCertificate {
    pub class_index: usize,
    pub box_half: f64,
    pub polyline: Vec<Vec<f64>>,
    /// Smallest classification margin over the sampled polyline.
    pub min_margin: f64,
    pub samples_per_segment: usize,
}

/// Evidence that two points sit in different components of the region
/// inside the analysis box.
#[derive(Debug, Clone, Serialize)]
pub struct DisconnectedWitness {
    pub class_index: usize,
    pub box_half: f64,
    pub n_components: usize,
    pub from_component: usize,
    pub to_component: usize,
    pub from_component_witness: Vec<f64>,
    pub to_component_witness: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PathOutcome {
    Connected(PathCertificate),
    Disconnected(DisconnectedWitness),
}

fn check_point(
    net: &Network,
    x: &[f64],
    class: usize,
    box_half: f64,
    eps: f64,
) -> Result<(), ConnectivityError> {
    if x.iter().any(|v| v.abs() > box_half) {
        return Err(ConnectivityError::PointOutsideBox {
            point: x.to_vec(),
            box_half,
        });
    }
    let d = net.classify(x, eps);
    if d.label != Label::Class(class) {
        return Err(ConnectivityError::PointNotInClass {
            point: x.to_vec(),
            class,
            got: format!("{:?} with margin {:.3e}", d.label, d.margin),
        });
    }
    Ok(())
}

/// Either a polyline from `from` to `to` staying strictly inside the class
/// region (validated by dense sampling), or a witness that the two points
/// lie in different components.
pub fn find_path(
    net: &Network,
    class: usize,
    from: &[f64],
    to: &[f64],
    box_half: f64,
    eps: f64,
    engine: Engine,
) -> Result<PathOutcome, ConnectivityError> {
    check_point(net, from, class, box_half, eps)?;
    check_point(net, to, class, box_half, eps)?;
    let (pieces, graph, report) = components_report(net, class, box_half, eps, engine)?;
    let contains = |x: &[f64]| -> Vec<usize> {
        pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.polyhedron.contains(x, 1e-9))
            .map(|(i, _)| i)
            .collect()
    };
    let sources = contains(from);
    let targets = contains(to);
    debug_assert!(!sources.is_empty() && !targets.is_empty());

    // multi-source BFS over facet adjacency
    let adj = graph.neighbors();
    let mut parent: Vec<Option<usize>> = vec![None; pieces.len()];
    let mut seen = vec![false; pieces.len()];
    let mut queue = std::collections::VecDeque::new();
    for &s in &sources {
        seen[s] = true;
        queue.push_back(s);
    }
    let target_set: std::collections::HashSet<usize> = targets.iter().copied().collect();
    let mut reached = None;
    while let Some(u) = queue.pop_front() {
        if target_set.contains(&u) {
            reached = Some(u);
            break;
        }
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }

    let Some(last) = reached else {
        let comps = &report.components;
        let comp_of = |piece: usize| {
            comps
                .iter()
                .position(|c| c.piece_indices.contains(&piece))
                .expect("piece in some component")
        };
        let fc = comp_of(sources[0]);
        let tc = comp_of(targets[0]);
        return Ok(PathOutcome::Disconnected(DisconnectedWitness {
            class_index: class,
            box_half,
            n_components: comps.len(),
            from_component: fc,
            to_component: tc,
            from_component_witness: comps[fc].witness.clone(),
            to_component_witness: comps[tc].witness.clone(),
        }));
    };

    let mut order = vec![last];
    while let Some(p) = parent[*order.last().unwrap()] {
        order.push(p);
    }
    order.reverse();

    let facet_points = graph.facet_points();
    let mut polyline: Vec<Vec<f64>> = vec![from.to_vec()];
    polyline.push(pieces[order[0]].witness.clone());
    for w in order.windows(2) {
        let fp = facet_points
            .get(&(w[0], w[1]))
            .expect("BFS edge has a facet point")
            .clone();
        polyline.push(fp);
        polyline.push(pieces[w[1]].witness.clone());
    }
    polyline.push(to.to_vec());

    // validate by sampling every segment
    let n = defaults::SAMPLES_PER_SEGMENT;
    let mut min_margin = f64::INFINITY;
    for seg in polyline.windows(2) {
        for s in 0..=n {
            let t = s as f64 / n as f64;
            let x: Vec<f64> = seg[0]
                .iter()
                .zip(&seg[1])
                .map(|(a, b)| a + t * (b - a))
                .collect();
            let d = net.classify(&x, 0.0);
            if d.label != Label::Class(class) || d.margin <= 0.0 {
                return Err(ConnectivityError::PathValidation { point: x });
            }
            min_margin = min_margin.min(d.margin);
        }
    }
    Ok(PathOutcome::Connected(PathCertificate {
        class_index: class,
        box_half,
        polyline,
        min_margin,
        samples_per_segment: n,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::builtin;

    fn n_components(name: &str, class: usize, engine: Engine) -> usize {
        let net = builtin(name).unwrap();
        let (_, _, report) = components_report(&net, class, 8.0, 1e-9, engine).unwrap();
        report.components.len()
    }

    /// 4-connectivity flood fill over a classification grid.
    fn grid_components(net: &Network, class: usize, half: f64, n: usize) -> usize {
        let mut label = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                let x = [
                    -half + 2.0 * half * (i as f64 + 0.5) / n as f64,
                    -half + 2.0 * half * (j as f64 + 0.5) / n as f64,
                ];
                let d = net.classify(&x, 1e-9);
                label[i * n + j] = d.label == Label::Class(class);
            }
        }
        let mut seen = vec![false; n * n];
        let mut comps = 0;
        for start in 0..n * n {
            if !label[start] || seen[start] {
                continue;
            }
            comps += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(c) = stack.pop() {
                let (i, j) = (c / n, c % n);
                let mut push = |ni: usize, nj: usize, stack: &mut Vec<usize>| {
                    let k = ni * n + nj;
                    if label[k] && !seen[k] {
                        seen[k] = true;
                        stack.push(k);
                    }
                };
                if i > 0 {
                    push(i - 1, j, &mut stack);
                }
                if i + 1 < n {
                    push(i + 1, j, &mut stack);
                }
                if j > 0 {
                    push(i, j - 1, &mut stack);
                }
                if j + 1 < n {
                    push(i, j + 1, &mut stack);
                }
            }
        }
        comps
    }

    #[test]
    fn component_counts_for_the_builtins() {
        for engine in [Engine::Forward, Engine::Backward] {
            assert_eq!(n_components("eq4-nonpyramidal", 0, engine), 2, "{engine}");
            assert_eq!(n_components("eq4-nonpyramidal", 1, engine), 1, "{engine}");
            assert_eq!(n_components("eq5-relu", 0, engine), 2, "{engine}");
            assert_eq!(n_components("eq5-relu", 1, engine), 1, "{engine}");
            assert_eq!(n_components("lowrank-strips(0.1)", 0, engine), 2, "{engine}");
            // the middle band ties the two classes exactly: the second
            // class never strictly wins, its open region is empty
            assert_eq!(n_components("lowrank-strips(0.1)", 1, engine), 0, "{engine}");
            assert_eq!(n_components("tight-2-3-2(0.1)", 0, engine), 2, "{engine}");
            assert_eq!(n_components("tight-2-3-2(0.1)", 1, engine), 1, "{engine}");
        }
    }

    #[test]
    fn component_counts_match_a_flood_fill_of_the_grid() {
        for name in [
            "eq4-nonpyramidal",
            "eq5-relu",
            "lowrank-strips(0.1)",
            "tight-2-3-2(0.1)",
        ] {
            let net = builtin(name).unwrap();
            for class in 0..net.n_classes() {
                let exact = {
                    let (_, _, r) =
                        components_report(&net, class, 8.0, 1e-9, Engine::Forward).unwrap();
                    r.components.len()
                };
                let grid = grid_components(&net, class, 8.0, 301);
                assert_eq!(exact, grid, "{name} class {class}");
            }
        }
    }

    #[test]
    fn corner_region_pieces_glue_into_the_triangle_and_the_wedge() {
        let net = builtin("eq5-relu").unwrap();
        let (pieces, graph, report) =
            components_report(&net, 0, 8.0, 1e-9, Engine::Forward).unwrap();
        assert_eq!(report.components.len(), 2);
        // every edge's facet point must strictly classify to class 0
        for e in &graph.edges {
            assert!(e.margin > 0.0);
            let d = net.classify(&e.facet_point, 0.0);
            assert_eq!(d.label, Label::Class(0));
        }
        // the component holding the origin is the truncated triangle
        let tri = report
            .components
            .iter()
            .find(|c| {
                c.piece_indices
                    .iter()
                    .any(|&i| pieces[i].polyhedron.contains(&[0.0, 0.0], 1e-9))
            })
            .unwrap();
        let m = &tri.merged;
        assert!(m.contains(&[0.0, 0.0], 1e-9));
        assert!(m.contains(&[-7.0, -7.0], 1e-9));
        assert!(!m.contains(&[0.8, 0.8], -1e-9));
        assert!(!m.contains(&[1.5, -1.0], -1e-9));
        // x1 <= 1, x2 <= 1, x1 + x2 <= 1 and nothing else
        assert_eq!(m.n_rows(), 3, "merged rows: {:?}", m);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [
            (vec![1.0, 0.0], 1.0),
            (vec![0.0, 1.0], 1.0),
            (vec![s, s], s),
        ];
        for (a, c) in &want {
            assert!(
                (0..m.n_rows()).any(|r| {
                    let (b, d) = m.row(r);
                    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
                        && (c - d).abs() <= 1e-9
                }),
                "missing row {a:?} <= {c}"
            );
        }
    }

    #[test]
    fn wedge_merged_description_drops_the_redundant_diagonal() {
        let net = builtin("eq5-relu").unwrap();
        let (pieces, _, report) =
            components_report(&net, 0, 8.0, 1e-9, Engine::Forward).unwrap();
        let wedge = report
            .components
            .iter()
            .find(|c| {
                c.piece_indices
                    .iter()
                    .any(|&i| pieces[i].polyhedron.contains(&[0.0, 6.0], 1e-9))
            })
            .unwrap();
        let m = &wedge.merged;
        // 2 x1 - x2 <= -4 and -x2 <= -4
        assert_eq!(m.n_rows(), 2, "merged rows: {:?}", m);
        assert!(m.contains(&[0.0, 5.0], 1e-9));
        assert!(!m.contains(&[1.0, 5.0], -1e-9));
        assert!(!m.contains(&[0.0, 3.0], -1e-9));
    }

    #[test]
    fn narrow_weights_region_boundary_sits_at_the_predicted_offset() {
        let alpha = 0.1;
        let net = builtin("tight-2-3-2(0.1)").unwrap();
        let bound = (2.0 - alpha) / (1.0 - alpha);
        let (_, _, report) = components_report(&net, 0, 8.0, 1e-9, Engine::Forward).unwrap();
        assert_eq!(report.components.len(), 2);
        for comp in &report.components {
            let m = &comp.merged;
            // each half is a halfplane |x1| >= bound
            assert_eq!(m.n_rows(), 1);
            let (a, c) = m.row(0);
            assert!((a[0].abs() - 1.0).abs() <= 1e-9);
            assert!(a[1].abs() <= 1e-9);
            assert!((c - (-bound)).abs() <= 1e-9, "offset {c} vs {}", -bound);
        }
    }

    #[test]
    fn box_growth_reports_regions_that_keep_touching_the_box() {
        let net = builtin("eq4-nonpyramidal").unwrap();
        // both strips live past |x1 + x2| >= 2; they touch any box
        let report = analyze(&net, 0, 3.0, 1e-9, Engine::Forward).unwrap();
        assert_eq!(report.report.components.len(), 2);
        assert_eq!(report.doublings, MAX_DOUBLINGS);
        assert!((report.final_box_half - 24.0).abs() < 1e-12);
        assert!(report.unsettled);
        // the complement strip is one component: no growth needed
        let quiet = analyze(&net, 1, 3.0, 1e-9, Engine::Forward).unwrap();
        assert_eq!(quiet.doublings, 0);
        assert_eq!(quiet.report.components.len(), 1);
        assert!(!quiet.unsettled);
    }

    #[test]
    fn paths_inside_one_component_come_with_positive_margins() {
        let net = builtin("eq5-relu").unwrap();
        let out = find_path(
            &net,
            0,
            &[-5.0, -5.0],
            &[0.5, -0.5],
            8.0,
            1e-9,
            Engine::Forward,
        )
        .unwrap();
        match out {
            PathOutcome::Connected(cert) => {
                assert!(cert.min_margin > 0.0);
                assert!(cert.polyline.len() >= 2);
                assert_eq!(cert.polyline[0], vec![-5.0, -5.0]);
                assert_eq!(cert.polyline.last().unwrap(), &vec![0.5, -0.5]);
            }
            other => panic!("expected a path, got {other:?}"),
        }
    }

    #[test]
    fn cross_component_requests_return_a_disconnection_witness() {
        let net = builtin("eq5-relu").unwrap();
        let out = find_path(
            &net,
            0,
            &[0.0, 0.0],
            &[0.0, 6.0],
            8.0,
            1e-9,
            Engine::Forward,
        )
        .unwrap();
        match out {
            PathOutcome::Disconnected(w) => {
                assert_eq!(w.n_components, 2);
                assert_ne!(w.from_component, w.to_component);
                let df = net.classify(&w.from_component_witness, 0.0);
                let dt = net.classify(&w.to_component_witness, 0.0);
                assert_eq!(df.label, Label::Class(0));
                assert_eq!(dt.label, Label::Class(0));
            }
            other => panic!("expected disconnection, got {other:?}"),
        }
    }

    #[test]
    fn path_preconditions_reject_wrong_class_and_out_of_box_points() {
        let net = builtin("eq5-relu").unwrap();
        assert!(matches!(
            find_path(&net, 0, &[2.0, 0.0], &[0.0, 0.0], 8.0, 1e-9, Engine::Forward),
            Err(ConnectivityError::PointNotInClass { .. })
        ));
        assert!(matches!(
            find_path(&net, 0, &[-9.0, 0.0], &[0.0, 0.0], 8.0, 1e-9, Engine::Forward),
            Err(ConnectivityError::PointOutsideBox { .. })
        ));
    }

    #[test]
    fn backward_engine_paths_agree_with_forward_engine_paths() {
        let net = builtin("eq4-nonpyramidal").unwrap();
        for engine in [Engine::Forward, Engine::Backward] {
            let out = find_path(&net, 0, &[3.0, 1.0], &[1.5, 1.5], 8.0, 1e-9, engine).unwrap();
            assert!(matches!(out, PathOutcome::Connected(_)), "{engine}");
            let out = find_path(&net, 0, &[3.0, 1.0], &[-3.0, -3.0], 8.0, 1e-9, engine).unwrap();
            assert!(matches!(out, PathOutcome::Disconnected(_)), "{engine}");
        }
    }
}
