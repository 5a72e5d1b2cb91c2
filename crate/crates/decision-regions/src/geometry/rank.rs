use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Numerical rank of a weight matrix with the evidence behind it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values, largest first.
    pub singular_values: Vec<f64>,
    /// Smallest singular value counted toward the rank (0 when rank is 0).
    pub smallest_kept: f64,
    pub rel_tol: f64,
}

impl RankReport {
    /// Full rank means rank equals min(rows, cols).
    pub fn is_full(&self) -> bool {
        self.rank == self.singular_values.len()
    }
}

/// Rank = number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(w: &DMatrix<f64>, rel_tol: f64) -> RankReport {
    let svd = w.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let rank = if sigma_max <= 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > rel_tol * sigma_max).count()
    };
    let smallest_kept = if rank > 0 { sv[rank - 1] } else { 0.0 };
    RankReport {
        rank,
        singular_values: sv,
        smallest_kept,
        rel_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_rotation_has_full_rank_with_equal_singular_values() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w = DMatrix::from_row_slice(2, 2, &[s, -s, s, s]);
        let r = numerical_rank(&w, 1e-8);
        assert_eq!(r.rank, 2);
        assert!((r.singular_values[0] - 1.0).abs() < 1e-12);
        assert!((r.singular_values[1] - 1.0).abs() < 1e-12);
        assert!((r.smallest_kept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_projection() {
        // both rows hit only the first coordinate
        let w = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 0.0]);
        let r = numerical_rank(&w, 1e-8);
        assert_eq!(r.rank, 1);
        assert!(!r.is_full());
        assert!((r.smallest_kept - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn tightening_the_tolerance_never_lowers_the_rank() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-6]);
        let loose = numerical_rank(&w, 1e-4);
        let tight = numerical_rank(&w, 1e-8);
        assert!(tight.rank >= loose.rank);
        assert_eq!(loose.rank, 1);
        assert_eq!(tight.rank, 2);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let w = DMatrix::zeros(3, 2);
        let r = numerical_rank(&w, 1e-8);
        assert_eq!(r.rank, 0);
        assert_eq!(r.smallest_kept, 0.0);
    }

    #[test]
    fn wide_matrix_full_rank_is_min_dimension() {
        let w = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
        let r = numerical_rank(&w, 1e-8);
        assert_eq!(r.rank, 2);
        assert!(r.is_full());
    }
}
