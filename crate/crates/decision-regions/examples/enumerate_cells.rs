//! Forward engine: subdivide the analysis box into activation cells (the
//! maximal regions where every hidden neuron keeps one linear branch), then
//! carve out one class's decision pieces.

use decision_regions::defaults;
use decision_regions::net::builtin;
use decision_regions::regions::{decision_cells, enumerate_cells};

fn fmt_row(a: &[f64], c: f64) -> String {
    let terms: Vec<String> = a
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{v:+.3}*x{}", i + 1))
        .collect();
    format!("{} <= {c:.3}", terms.join(" "))
}

fn main() {
    let net = builtin("eq5-relu").unwrap();
    let half = defaults::ANALYSIS_BOX_HALF;
    let eps = defaults::EPS_FEAS;

    let cells = enumerate_cells(&net, half, eps).unwrap();
    println!(
        "{} activation cells tile the box [-{half}, {half}]^2",
        cells.len()
    );
    for (i, cell) in cells.iter().enumerate() {
        println!(
            "cell {i}: pattern {:?}, {} constraint rows, witness ({:.2}, {:.2})",
            cell.pattern,
            cell.polyhedron.n_rows(),
            cell.witness[0],
            cell.witness[1]
        );
        // on the cell the whole network collapses to one affine map
        let logits = net.eval_logits(&cell.witness);
        let affine: Vec<f64> = (0..2)
            .map(|r| {
                (0..2)
                    .map(|c| cell.logit_map[(r, c)] * cell.witness[c])
                    .sum::<f64>()
                    + cell.logit_offset[r]
            })
            .collect();
        println!(
            "        network logits {:>8.4?} == cell affine map {:>8.4?}",
            logits, affine
        );
    }

    println!();
    for class in 0..net.n_classes() {
        let pieces = decision_cells(&net, class, &cells, eps).unwrap();
        println!("class {} wins on {} piece(s):", class + 1, pieces.len());
        for p in &pieces {
            println!("  piece with witness ({:.2}, {:.2}):", p.witness[0], p.witness[1]);
            for i in 0..p.polyhedron.n_rows() {
                let (a, c) = p.polyhedron.row(i);
                println!("    {}", fmt_row(a, c));
            }
        }
    }
}
