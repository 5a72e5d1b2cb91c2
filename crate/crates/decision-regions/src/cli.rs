//! Command-line surface: batch JSON reports plus optional SVG figures for
//! planar inputs. Flags use 1-based class numbers; JSON reports index
//! classes from 0.
//!
//! Exit codes: 0 success, 2 precondition/usage error, 3 numerical failure.

use crate::certify::{certify, CertReport, Verdict};
use crate::connectivity::{
    components_report, find_path, ComponentsReport, ConnectivityError, Engine, PathOutcome,
};
use crate::defaults;
use crate::geometry::{GeometryError, Polyhedron};
use crate::net::{builtin, load_network, ActivationKind, NetError, Network};
use crate::preimage::{decision_region_backward, PreimageError, StageKind};
use crate::regions::{decision_cells, enumerate_cells, Cell, DecisionCell, RegionsError};
use crate::svg::SvgScene;
use crate::train::{self, DataError, Dataset, TrainConfig, TrainError};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// Bad input, flags, or file content.
    Precondition(String),
    /// LP trouble or a failed certificate validation.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Precondition(m) | CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        CliError::Precondition(format!("netmodel: {e}"))
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Precondition(format!("train: {e}"))
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        CliError::Precondition(format!("train: {e}"))
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Numerical(format!("geometry: {e}"))
    }
}

impl From<RegionsError> for CliError {
    fn from(e: RegionsError) -> Self {
        match e {
            RegionsError::Geometry(g) => g.into(),
            other => CliError::Precondition(format!("regions: {other}")),
        }
    }
}

impl From<PreimageError> for CliError {
    fn from(e: PreimageError) -> Self {
        match e {
            PreimageError::Geometry(g) => g.into(),
            other => CliError::Precondition(format!("preimage: {other}")),
        }
    }
}

impl From<ConnectivityError> for CliError {
    fn from(e: ConnectivityError) -> Self {
        match e {
            ConnectivityError::Regions(r) => r.into(),
            ConnectivityError::Preimage(p) => p.into(),
            ConnectivityError::Geometry(g) => g.into(),
            ConnectivityError::PathValidation { .. } => {
                CliError::Numerical(format!("connectivity: {e}"))
            }
            other => CliError::Precondition(format!("connectivity: {other}")),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "decision-regions",
    version,
    about = "Exact decision regions of small piecewise-linear classifiers: \
             enumeration, connectivity, certificates, and training"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the architectural conditions that guarantee connected regions
    Certify(CertifyArgs),
    /// Enumerate activation cells and per-class decision pieces
    Regions(RegionsArgs),
    /// Count connected components per class and describe each one
    Connectivity(ConnectivityArgs),
    /// Build one class's region backwards through the layers
    Preimage(PreimageArgs),
    /// Certify a within-region path between two inputs, or witness that none exists
    Path(PathArgs),
    /// Train a small classifier, then chain certify and connectivity on it
    Train(TrainArgs),
}

#[derive(Args)]
struct NetSource {
    /// Network JSON file
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "builtin",
        required_unless_present = "builtin"
    )]
    network: Option<PathBuf>,
    /// Builtin: eq4-nonpyramidal, eq5-relu, lowrank-strips(A), tight-2-3-2(A)
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

impl NetSource {
    fn load(&self) -> Result<Network, CliError> {
        match (&self.network, &self.builtin) {
            (Some(path), None) => Ok(load_network(path)?),
            (None, Some(name)) => Ok(builtin(name)?),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }
}

#[derive(Args)]
struct BoxArgs {
    /// Analysis box half-width
    #[arg(long = "box", value_name = "HALF", default_value_t = defaults::ANALYSIS_BOX_HALF)]
    box_half: f64,
    /// Feasibility/interior tolerance
    #[arg(long, value_name = "EPS", default_value_t = defaults::EPS_FEAS)]
    eps: f64,
}

impl BoxArgs {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.box_half.is_finite() && self.box_half > 0.0) {
            return Err(CliError::Precondition(
                "cli: --box must be a positive finite number".into(),
            ));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(CliError::Precondition(
                "cli: --eps must be a positive finite number".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write an SVG figure here (planar inputs only)
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: NetSource,
    /// Relative singular-value cutoff for numerical rank
    #[arg(long, value_name = "TOL", default_value_t = defaults::RANK_REL_TOL)]
    rank_tol: f64,
    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RegionsArgs {
    #[command(flatten)]
    source: NetSource,
    /// 1-based class whose decision pieces to include
    #[arg(long, value_name = "J")]
    class: Option<usize>,
    #[command(flatten)]
    boxa: BoxArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ConnectivityArgs {
    #[command(flatten)]
    source: NetSource,
    /// 1-based class; omit to report every class
    #[arg(long, value_name = "J")]
    class: Option<usize>,
    #[command(flatten)]
    boxa: BoxArgs,
    /// Region construction: forward | backward
    #[arg(long, value_name = "ENGINE", default_value = "forward", value_parser = parse_engine)]
    engine: Engine,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PreimageArgs {
    #[command(flatten)]
    source: NetSource,
    /// 1-based class to build
    #[arg(long, value_name = "J")]
    class: usize,
    #[command(flatten)]
    boxa: BoxArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    source: NetSource,
    /// 1-based class both endpoints must belong to
    #[arg(long, value_name = "J")]
    class: usize,
    /// Start point, comma separated
    #[arg(long, value_name = "X0,X1,...", allow_hyphen_values = true)]
    from: String,
    /// End point, comma separated
    #[arg(long, value_name = "X0,X1,...", allow_hyphen_values = true)]
    to: String,
    #[command(flatten)]
    boxa: BoxArgs,
    /// Region construction: forward | backward
    #[arg(long, value_name = "ENGINE", default_value = "forward", value_parser = parse_engine)]
    engine: Engine,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TrainArgs {
    /// Training CSV with header x0,...,x{d-1},label
    #[arg(long, value_name = "PATH", conflicts_with_all = ["generator", "n"])]
    data: Option<PathBuf>,
    /// Synthetic dataset: strips | two-islands
    #[arg(long, value_name = "NAME", default_value = "two-islands")]
    generator: String,
    /// Points per class for the generator
    #[arg(long, value_name = "N", default_value_t = 200)]
    n: usize,
    /// Hidden widths, comma separated; empty trains an affine model
    #[arg(long, value_name = "W1,W2,...", default_value = "8")]
    widths: String,
    /// Leaky-ReLU slope for hidden layers
    #[arg(long, value_name = "ALPHA", default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    /// Halve the learning rate every this many epochs
    #[arg(long, value_name = "E", default_value_t = 50)]
    halve_every: usize,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    /// Seed for data generation and training
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Write the trained network JSON here
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write the per-epoch loss/error history CSV here
    #[arg(long, value_name = "PATH")]
    history: Option<PathBuf>,
    /// Relative singular-value cutoff for the chained certify step
    #[arg(long, value_name = "TOL", default_value_t = defaults::RANK_REL_TOL)]
    rank_tol: f64,
    #[command(flatten)]
    boxa: BoxArgs,
    #[command(flatten)]
    outargs: OutputArgs,
}

/// Parse args from the process environment, run, and return the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::Regions(a) => cmd_regions(a),
        Cmd::Connectivity(a) => cmd_connectivity(a),
        Cmd::Preimage(a) => cmd_preimage(a),
        Cmd::Path(a) => cmd_path(a),
        Cmd::Train(a) => cmd_train(a),
    }
}

/// Internal 0-based class index from a 1-based flag value.
fn class_index(class: usize, net: &Network) -> Result<usize, CliError> {
    if class == 0 || class > net.n_classes() {
        return Err(CliError::Precondition(format!(
            "cli: --class counts from 1 and the network has {} classes, got {class}",
            net.n_classes()
        )));
    }
    Ok(class - 1)
}

fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|e| {
                CliError::Precondition(format!("cli: bad coordinate `{t}`: {e}"))
            })
        })
        .collect()
}

fn parse_widths(s: &str) -> Result<Vec<usize>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim().parse::<usize>().map_err(|e| {
                CliError::Precondition(format!("cli: bad width `{t}`: {e}"))
            })
        })
        .collect()
}

fn write_file(path: &Path, bytes: &str) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Precondition(format!("cli: writing {}: {e}", path.display())))
}

/// JSON report to stdout, or to `--json PATH` with the summary lines on
/// stdout instead.
fn emit<T: Serialize>(report: &T, json: &Option<PathBuf>, summary: &[String]) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Numerical(format!("cli: serializing report: {e}")))?;
    text.push('\n');
    match json {
        Some(path) => {
            write_file(path, &text)?;
            for line in summary {
                println!("{line}");
            }
            println!("report: {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn require_planar(net: &Network) -> Result<(), CliError> {
    if net.input_dim() != 2 {
        return Err(CliError::Precondition(format!(
            "cli: --svg needs a planar input space, the network has d={}",
            net.input_dim()
        )));
    }
    Ok(())
}

fn write_scene(path: &Path, scene: &SvgScene) -> Result<(), CliError> {
    let svg = scene
        .render()
        .map_err(|e| CliError::Precondition(format!("svg: {e}")))?;
    write_file(path, &svg)
}

fn cmd_certify(a: CertifyArgs) -> Result<(), CliError> {
    if !(a.rank_tol.is_finite() && a.rank_tol > 0.0) {
        return Err(CliError::Precondition(
            "cli: --rank-tol must be a positive finite number".into(),
        ));
    }
    let net = a.source.load()?;
    let report = certify(&net, a.rank_tol);
    let summary = vec![match &report.verdict {
        Verdict::GuaranteedConnected { basis } => {
            format!("verdict: guaranteed connected ({basis:?})")
        }
        Verdict::NoGuarantee { obstructions } => {
            format!("verdict: no guarantee ({} obstruction(s))", obstructions.len())
        }
    }];
    emit(&report, &a.json, &summary)
}

#[derive(Serialize)]
struct RegionsReport<'a> {
    box_half: f64,
    eps: f64,
    n_cells: usize,
    cells: &'a [Cell],
    #[serde(skip_serializing_if = "Option::is_none")]
    class_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decision_cells: Option<Vec<DecisionCell>>,
}

fn cmd_regions(a: RegionsArgs) -> Result<(), CliError> {
    a.boxa.validate()?;
    let net = a.source.load()?;
    let cells = enumerate_cells(&net, a.boxa.box_half, a.boxa.eps)?;
    let class = a.class.map(|c| class_index(c, &net)).transpose()?;
    let dcs = class
        .map(|j| decision_cells(&net, j, &cells, a.boxa.eps))
        .transpose()?;

    if let Some(svg_path) = &a.out.svg {
        require_planar(&net)?;
        let mut scene = SvgScene::new(a.boxa.box_half);
        let classes: Vec<usize> = match class {
            Some(j) => vec![j],
            None => (0..net.n_classes()).collect(),
        };
        for j in classes {
            let pieces = decision_cells(&net, j, &cells, a.boxa.eps)?
                .into_iter()
                .map(|c| c.polyhedron)
                .collect();
            scene.add_region_layer(pieces, j, format!("class {}", j + 1));
        }
        write_scene(svg_path, &scene)?;
    }

    let mut summary = vec![format!("activation cells: {}", cells.len())];
    if let (Some(j), Some(d)) = (class, &dcs) {
        summary.push(format!("decision pieces for class {}: {}", j + 1, d.len()));
    }
    let report = RegionsReport {
        box_half: a.boxa.box_half,
        eps: a.boxa.eps,
        n_cells: cells.len(),
        cells: &cells,
        class_index: class,
        decision_cells: dcs,
    };
    emit(&report, &a.out.json, &summary)
}

#[derive(Serialize)]
struct ConnectivityCliReport {
    reports: Vec<ComponentsReport>,
}

fn cmd_connectivity(a: ConnectivityArgs) -> Result<(), CliError> {
    a.boxa.validate()?;
    let net = a.source.load()?;
    let classes: Vec<usize> = match a.class {
        Some(c) => vec![class_index(c, &net)?],
        None => (0..net.n_classes()).collect(),
    };
    let mut reports = Vec::new();
    let mut summary = Vec::new();
    let mut per_class_pieces = Vec::new();
    for &j in &classes {
        let (pieces, _, report) =
            components_report(&net, j, a.boxa.box_half, a.boxa.eps, a.engine)?;
        summary.push(format!(
            "class {}: {} component(s), {} piece(s)",
            j + 1,
            report.components.len(),
            report.n_pieces
        ));
        per_class_pieces.push(pieces);
        reports.push(report);
    }

    if let Some(svg_path) = &a.out.svg {
        require_planar(&net)?;
        let mut scene = SvgScene::new(a.boxa.box_half);
        if classes.len() == 1 {
            // single class: color by component
            let pieces = &per_class_pieces[0];
            for (k, comp) in reports[0].components.iter().enumerate() {
                let polys = comp
                    .piece_indices
                    .iter()
                    .map(|&i| pieces[i].polyhedron.clone())
                    .collect();
                scene.add_region_layer(polys, k, format!("component {}", k + 1));
            }
        } else {
            for (idx, &j) in classes.iter().enumerate() {
                let polys = per_class_pieces[idx]
                    .iter()
                    .map(|p| p.polyhedron.clone())
                    .collect();
                scene.add_region_layer(polys, j, format!("class {}", j + 1));
            }
        }
        write_scene(svg_path, &scene)?;
    }

    emit(&ConnectivityCliReport { reports }, &a.out.json, &summary)
}

fn stage_slug(kind: &StageKind) -> String {
    match kind {
        StageKind::Target { .. } => "target".into(),
        StageKind::AffinePreimage { layer } => format!("affine-l{layer}"),
        StageKind::RangeRestriction { layer } => format!("range-l{layer}"),
        StageKind::ActivationPreimage { layer } => format!("activation-l{layer}"),
        StageKind::BoxClip { .. } => "box-clip".into(),
        StageKind::StrictnessFilter => "strict".into(),
    }
}

fn cmd_preimage(a: PreimageArgs) -> Result<(), CliError> {
    a.boxa.validate()?;
    let net = a.source.load()?;
    let j = class_index(a.class, &net)?;
    let region = decision_region_backward(&net, j, a.boxa.box_half, a.boxa.eps)?;

    if let Some(svg_path) = &a.out.svg {
        let mut wrote = false;
        if net.input_dim() == 2 {
            let mut scene = SvgScene::new(a.boxa.box_half);
            scene.add_region_layer(
                region.pieces.iter().map(|p| p.polyhedron.clone()).collect(),
                j,
                format!("class {}", j + 1),
            );
            write_scene(svg_path, &scene)?;
            wrote = true;
        }
        // one panel per planar stage, clipped to the analysis window
        let stem = svg_path.with_extension("");
        let stem = stem.to_string_lossy();
        let window = Polyhedron::cube(2, a.boxa.box_half);
        for (i, stage) in region.trace.stages.iter().enumerate() {
            if stage.dim != 2 {
                continue;
            }
            let mut scene = SvgScene::new(a.boxa.box_half);
            let mut polys = Vec::new();
            for p in &stage.pieces {
                polys.push(p.intersect(&window)?);
            }
            scene.add_region_layer(polys, j, stage_slug(&stage.kind));
            let panel = PathBuf::from(format!("{stem}-{i:02}-{}.svg", stage_slug(&stage.kind)));
            write_scene(&panel, &scene)?;
            wrote = true;
        }
        if !wrote {
            return Err(CliError::Precondition(format!(
                "cli: --svg produced nothing: no stage of this network is planar (d={})",
                net.input_dim()
            )));
        }
    }

    let mut summary = vec![format!(
        "class {}: {} piece(s) after {} stages",
        j + 1,
        region.pieces.len(),
        region.trace.stages.len()
    )];
    for (i, s) in region.trace.stages.iter().enumerate() {
        summary.push(format!(
            "  stage {i:02} {}: {} piece(s) in dim {}",
            stage_slug(&s.kind),
            s.n_pieces,
            s.dim
        ));
    }
    emit(&region, &a.out.json, &summary)
}

fn cmd_path(a: PathArgs) -> Result<(), CliError> {
    a.boxa.validate()?;
    let net = a.source.load()?;
    let j = class_index(a.class, &net)?;
    let from = parse_point(&a.from)?;
    let to = parse_point(&a.to)?;
    if from.len() != net.input_dim() || to.len() != net.input_dim() {
        return Err(CliError::Precondition(format!(
            "cli: endpoints must have {} coordinates (got {} and {})",
            net.input_dim(),
            from.len(),
            to.len()
        )));
    }
    let outcome = find_path(&net, j, &from, &to, a.boxa.box_half, a.boxa.eps, a.engine)?;

    if let Some(svg_path) = &a.out.svg {
        require_planar(&net)?;
        let mut scene = SvgScene::new(a.boxa.box_half);
        let (pieces, _, _) = components_report(&net, j, a.boxa.box_half, a.boxa.eps, a.engine)?;
        scene.add_region_layer(
            pieces.into_iter().map(|p| p.polyhedron).collect(),
            j,
            format!("class {}", j + 1),
        );
        let accent = net.n_classes();
        if let PathOutcome::Connected(cert) = &outcome {
            scene.add_polyline(cert.polyline.clone(), accent);
        }
        scene.add_point(from.clone(), accent);
        scene.add_point(to.clone(), accent);
        write_scene(svg_path, &scene)?;
    }

    let summary = vec![match &outcome {
        PathOutcome::Connected(c) => format!(
            "connected: {} segment(s), min margin {:.3e}",
            c.polyline.len() - 1,
            c.min_margin
        ),
        PathOutcome::Disconnected(w) => format!(
            "disconnected: endpoints sit in components {} and {} of {}",
            w.from_component + 1,
            w.to_component + 1,
            w.n_components
        ),
    }];
    emit(&outcome, &a.out.json, &summary)
}

#[derive(Serialize)]
struct TrainCliReport {
    source: String,
    n_train: usize,
    widths: Vec<usize>,
    alpha: f64,
    epochs: usize,
    lr: f64,
    halve_every: usize,
    momentum: f64,
    batch: usize,
    seed: u64,
    final_loss: f64,
    final_errors: usize,
    history: Vec<train::EpochStats>,
    network: serde_json::Value,
    certify: CertReport,
    connectivity: Vec<ComponentsReport>,
}

fn cmd_train(a: TrainArgs) -> Result<(), CliError> {
    a.boxa.validate()?;
    if !(a.alpha.is_finite() && a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Precondition(
            "cli: --alpha must lie strictly between 0 and 1".into(),
        ));
    }
    let (data, source_desc) = match &a.data {
        Some(path) => (
            Dataset::load_csv(path)?,
            format!("file:{}", path.display()),
        ),
        None => {
            let d = match a.generator.as_str() {
                "strips" => train::gen_strips(a.n, a.seed),
                "two-islands" | "two_islands" => train::gen_two_islands(a.n, a.seed),
                other => {
                    return Err(CliError::Precondition(format!(
                        "cli: unknown generator `{other}` (use strips or two-islands)"
                    )))
                }
            };
            (d, format!("generator:{}", a.generator))
        }
    };
    let cfg = TrainConfig {
        widths: parse_widths(&a.widths)?,
        activation: ActivationKind::LeakyRelu { alpha: a.alpha },
        epochs: a.epochs,
        lr: a.lr,
        halve_every: a.halve_every,
        momentum: a.momentum,
        batch: a.batch,
        seed: a.seed,
    };
    let result = train::train(&data, &cfg)?;
    let net = result.network;
    let last = result.history.last().expect("epochs is validated positive");

    if let Some(path) = &a.out {
        net.save(path)?;
    }
    if let Some(path) = &a.history {
        let mut csv = String::from("epoch,loss,errors\n");
        for e in &result.history {
            csv.push_str(&format!("{},{},{}\n", e.epoch, e.loss, e.errors));
        }
        write_file(path, &csv)?;
    }

    let cert = certify(&net, a.rank_tol);
    let mut conn = Vec::new();
    let mut summary = vec![format!(
        "trained {} on {} ({} points): final loss {:.6}, {} training error(s)",
        net.widths()
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join("-"),
        source_desc,
        data.len(),
        last.loss,
        last.errors
    )];
    summary.push(match &cert.verdict {
        Verdict::GuaranteedConnected { basis } => {
            format!("certify: guaranteed connected ({basis:?})")
        }
        Verdict::NoGuarantee { obstructions } => {
            format!("certify: no guarantee ({} obstruction(s))", obstructions.len())
        }
    });
    for j in 0..net.n_classes() {
        let (_, _, rep) =
            components_report(&net, j, a.boxa.box_half, a.boxa.eps, Engine::Forward)?;
        summary.push(format!(
            "class {}: {} component(s), {} piece(s)",
            j + 1,
            rep.components.len(),
            rep.n_pieces
        ));
        conn.push(rep);
    }

    if let Some(svg_path) = &a.outargs.svg {
        require_planar(&net)?;
        let mut scene = SvgScene::new(a.boxa.box_half);
        for j in 0..net.n_classes() {
            let (pieces, _, _) =
                components_report(&net, j, a.boxa.box_half, a.boxa.eps, Engine::Forward)?;
            scene.add_region_layer(
                pieces.into_iter().map(|p| p.polyhedron).collect(),
                j,
                format!("class {}", j + 1),
            );
        }
        for (x, &label) in data.points.iter().zip(&data.labels) {
            scene.add_point(x.clone(), label);
        }
        write_scene(svg_path, &scene)?;
    }

    let network_json: serde_json::Value = serde_json::from_str(&net.to_json_string())
        .expect("network serialization is valid json");
    let report = TrainCliReport {
        source: source_desc,
        n_train: data.len(),
        widths: cfg.widths,
        alpha: a.alpha,
        epochs: a.epochs,
        lr: a.lr,
        halve_every: a.halve_every,
        momentum: a.momentum,
        batch: a.batch,
        seed: a.seed,
        final_loss: last.loss,
        final_errors: last.errors,
        history: result.history,
        network: network_json,
        certify: cert,
        connectivity: conn,
    };
    emit(&report, &a.outargs.json, &summary)
}
