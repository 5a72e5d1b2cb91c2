//! Randomized invariants of the geometric core. Points near a boundary
//! (within the stated margins) are skipped: halfspace membership is only
//! meaningful away from the tolerance band.

use decision_regions::geometry::Polyhedron;
use decision_regions::net::{decide, Label};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Replace near-zero rows so `from_rows` never rejects the sample.
fn fixed_rows(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for r in &mut rows {
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 0.1 {
            r[0] = 1.0;
        }
    }
    rows
}

fn row_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

fn poly_strategy(dim: usize) -> impl Strategy<Value = Polyhedron> {
    (prop::collection::vec(row_strategy(dim), 3..8), prop::collection::vec(-2.0..4.0f64, 7))
        .prop_map(move |(rows, rhs)| {
            let rows = fixed_rows(rows);
            let n = rows.len();
            Polyhedron::from_rows(dim, rows, rhs[..n].to_vec()).expect("rows are nonzero")
        })
}

/// Signed distance to the boundary: positive inside, negative outside.
fn margin(p: &Polyhedron, x: &[f64]) -> f64 {
    (0..p.n_rows())
        .map(|i| {
            let (a, c) = p.row(i);
            c - a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    /// x lands in the pre-image exactly when its image lands in the set,
    /// outside a thin boundary band.
    #[test]
    fn affine_preimage_membership_matches_the_image(
        p in poly_strategy(2),
        w_entries in prop::collection::vec(-2.0..2.0f64, 6),
        b_entries in prop::collection::vec(-2.0..2.0f64, 2),
        x in prop::collection::vec(-4.0..4.0f64, 3),
    ) {
        // map from 3d inputs to the 2d space the set lives in
        let w = DMatrix::from_column_slice(3, 2, &w_entries);
        let b = DVector::from_column_slice(&b_entries);
        let pre = p.affine_preimage(&w, &b).unwrap();

        let y: Vec<f64> = (0..2)
            .map(|j| (0..3).map(|i| w[(i, j)] * x[i]).sum::<f64>() + b[j])
            .collect();
        let m = margin(&p, &y);
        // |W a| <= ||W|| < 9 for unit rows a, so a 1e-6 margin in image
        // space stays bigger than 1e-7 after normalization
        if m > 1e-6 {
            prop_assert!(pre.contains(&x, 1e-9));
        } else if m < -1e-6 {
            prop_assert!(!pre.contains(&x, 1e-8));
        }
    }

    /// Dropping LP-proven-redundant rows never changes membership away
    /// from the tolerance band.
    #[test]
    fn remove_redundant_preserves_membership(
        p in poly_strategy(2),
        samples in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 2), 32),
    ) {
        let slim = p.remove_redundant(1e6, 1e-9).unwrap();
        prop_assert!(slim.n_rows() <= p.n_rows());
        for x in &samples {
            let m_full = margin(&p, x);
            let m_slim = margin(&slim, x);
            if m_full.abs() > 1e-6 && m_slim.abs() > 1e-6 {
                prop_assert_eq!(m_full > 0.0, m_slim > 0.0);
            }
        }
    }

    /// Idempotence: a second pass removes nothing further.
    #[test]
    fn remove_redundant_is_idempotent(p in poly_strategy(2)) {
        let once = p.remove_redundant(1e6, 1e-9).unwrap();
        let twice = once.remove_redundant(1e6, 1e-9).unwrap();
        prop_assert_eq!(once.n_rows(), twice.n_rows());
    }

    /// The interior witness really has the slack it claims.
    #[test]
    fn interior_witness_has_positive_slack(p in poly_strategy(2)) {
        if let Some(w) = p.feasible_interior(1e6, 1e-9).unwrap() {
            prop_assert!(w.slack > 1e-9);
            prop_assert!(margin(&p, &w.point) >= w.slack - 1e-7);
        }
    }

    /// Serde round trip reproduces rows bitwise (normalization is
    /// idempotent on already-unit rows).
    #[test]
    fn polyhedron_json_round_trips_bitwise(p in poly_strategy(3)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: Polyhedron = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(p.n_rows(), back.n_rows());
        for i in 0..p.n_rows() {
            let (a, c) = p.row(i);
            let (a2, c2) = back.row(i);
            prop_assert_eq!(a, a2);
            prop_assert!(c.to_bits() == c2.to_bits());
        }
    }

    /// The decision rule picks the unique argmax with the runner-up gap as
    /// margin, and reports a tie when the gap closes.
    #[test]
    fn decide_picks_the_argmax_with_runner_up_margin(
        logits in prop::collection::vec(-10.0..10.0f64, 2..6),
    ) {
        let mut sorted = logits.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let gap = sorted[0] - sorted[1];
        let d = decide(&logits, 1e-9);
        if gap > 1e-9 {
            let argmax = logits
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            prop_assert_eq!(d.label, Label::Class(argmax));
            prop_assert!((d.margin - gap).abs() <= 1e-12);
        } else {
            prop_assert_eq!(d.label, Label::Tie);
        }
    }
}
