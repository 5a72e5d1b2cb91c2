//! Exact decision-region analysis for small piecewise-linear feedforward
//! networks.
//!
//! The library turns a trained (or hand-built) network into explicit
//! geometry: the polyhedral cells on which the network is affine, each
//! class's decision region as a union of polyhedra, the adjacency structure
//! of those pieces, and connectivity verdicts with checkable witnesses. A
//! `certify` pass reports when a network's shape alone (widths non-increasing,
//! weights full rank, activations strictly increasing) already guarantees
//! connected decision regions, so disconnected-region behavior can only come
//! from nets that fail those hypotheses.
//!
//! Entry points:
//! - [`net`]: network representation, builtins, JSON round-trip
//! - [`regions`]: forward cell enumeration (activation-pattern subdivision)
//! - [`preimage`]: backward region construction through layer pre-images
//! - [`connectivity`]: adjacency graph, components, path certificates
//! - [`certify`]: width/rank/activation-based connectedness certificates
//! - [`train`]: small deterministic trainer to reproduce the width effect
//! - [`svg`]: flat 2d renderings of regions and paths
//! - [`cli`]: the `decision-regions` binary (certify, regions, connectivity,
//!   preimage, path, train subcommands emitting schema-validated JSON)
//!
//! Run `cargo run --example tour_builtins` for a guided look at the four
//! builtin networks, or see `examples/` for one runnable program per
//! capability.

pub mod certify;
pub mod cli;
pub mod connectivity;
pub mod geometry;
pub mod net;
pub mod preimage;
pub mod regions;
pub mod svg;
pub mod train;

/// Shared numeric defaults. Every tolerance is overridable at the call site;
/// these are the values the CLI and the test suite use.
pub mod defaults {
    /// Minimum slack for a point to count as interior.
    pub const EPS_FEAS: f64 = 1e-9;
    /// Relative singular-value cutoff for numerical rank.
    pub const RANK_REL_TOL: f64 = 1e-8;
    /// Variable bound handed to every LP so unbounded polyhedra still
    /// produce witnesses.
    pub const LP_BOX_BOUND: f64 = 1e6;
    /// Half-width of the default analysis box.
    pub const ANALYSIS_BOX_HALF: f64 = 8.0;
    /// Samples per polyline segment when validating a path certificate.
    pub const SAMPLES_PER_SEGMENT: usize = 256;
    /// Classification margin below which a point is reported as a tie.
    pub const CLASSIFY_EPS: f64 = 1e-9;
}
