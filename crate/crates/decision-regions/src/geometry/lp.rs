//! Dense two-phase tableau simplex.
//!
//! Every variable carries finite bounds, so a bounded optimum always exists
//! once the constraints are satisfiable. Callers pass a box wide enough to
//! contain any witness they care about; the box doubles as the anti-cycling
//! safety net for unbounded polyhedra.
//!
//! Pivoting uses Bland's rule (lowest eligible index enters, ties in the
//! ratio test break toward the lowest basis index), which cannot cycle. An
//! iteration cap of `10 * (rows + cols)` per phase turns a stuck solve into
//! an explicit error instead of a hang.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex exceeded the iteration cap of {0}")]
    IterationCap(usize),
    #[error("LP reported unbounded despite finite variable bounds")]
    Unbounded,
    #[error("LP shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
}

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const RATIO_TIE: f64 = 1e-9;

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    z: Vec<f64>,
    z_rhs: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        self.rhs[r] /= piv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e];
            if f.abs() > 1e-14 {
                for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                self.rows[i][e] = 0.0;
                self.rhs[i] -= f * prhs;
            }
        }
        let f = self.z[e];
        if f.abs() > 1e-14 {
            for (v, p) in self.z.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            self.z[e] = 0.0;
            self.z_rhs -= f * prhs;
        }
        self.basis[r] = e;
    }

    /// Bland's rule main loop over the first `active` columns.
    fn run(&mut self, active: usize, cap: usize) -> Result<(), LpError> {
        for _ in 0..cap {
            let Some(e) = (0..active).find(|&j| self.z[j] < -COST_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][e];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - RATIO_TIE
                                || (ratio < br + RATIO_TIE && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, e);
        }
        Err(LpError::IterationCap(cap))
    }
}

/// Maximize `obj . x` subject to `rows[i] . x <= rhs[i]` and
/// `lower[j] <= x[j] <= upper[j]` (all bounds finite).
pub fn maximize(
    obj: &[f64],
    rows: &[Vec<f64>],
    rhs: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Result<LpOutcome, LpError> {
    let n = obj.len();
    if lower.len() != n || upper.len() != n {
        return Err(LpError::Shape("bound length != variable count".into()));
    }
    if rows.len() != rhs.len() {
        return Err(LpError::Shape("row count != rhs count".into()));
    }
    for row in rows {
        if row.len() != n {
            return Err(LpError::Shape("row length != variable count".into()));
        }
    }
    for j in 0..n {
        // partial_cmp keeps the NaN case an error rather than a pass
        let ordered = lower[j].partial_cmp(&upper[j]);
        if ordered.is_none_or(|o| o == std::cmp::Ordering::Greater) {
            return Err(LpError::Shape(format!("empty bound interval for var {j}")));
        }
    }

    let m = rows.len();
    let nrows = m + n; // structural rows, then one upper-bound row per variable
    let shifted: Vec<f64> = (0..m)
        .map(|i| rhs[i] - rows[i].iter().zip(lower).map(|(a, l)| a * l).sum::<f64>())
        .collect();
    let neg: Vec<usize> = (0..m).filter(|&i| shifted[i] < 0.0).collect();
    let k = neg.len();
    let ncols = n + nrows + k;
    let art_start = n + nrows;

    let mut t = Tableau {
        rows: vec![vec![0.0; ncols]; nrows],
        rhs: vec![0.0; nrows],
        z: vec![0.0; ncols],
        z_rhs: 0.0,
        basis: vec![0; nrows],
    };
    for i in 0..m {
        t.rows[i][..n].copy_from_slice(&rows[i]);
        t.rows[i][n + i] = 1.0;
        t.rhs[i] = shifted[i];
        t.basis[i] = n + i;
    }
    for j in 0..n {
        let i = m + j;
        t.rows[i][j] = 1.0;
        t.rows[i][n + i] = 1.0;
        t.rhs[i] = upper[j] - lower[j];
        t.basis[i] = n + i;
    }

    let cap = 10 * (nrows + ncols);

    if k > 0 {
        // Phase 1: negate infeasible rows, add artificials, minimize their sum.
        for (a, &i) in neg.iter().enumerate() {
            for v in t.rows[i].iter_mut() {
                *v = -*v;
            }
            t.rhs[i] = -t.rhs[i];
            t.rows[i][art_start + a] = 1.0;
            t.basis[i] = art_start + a;
        }
        for a in 0..k {
            t.z[art_start + a] = 1.0;
        }
        t.z_rhs = 0.0;
        for &i in &neg {
            // basic artificial has cost -1: eliminate it from the z-row
            let row = t.rows[i].clone();
            for (v, p) in t.z.iter_mut().zip(&row) {
                *v -= p;
            }
            t.z_rhs -= t.rhs[i];
        }
        t.run(ncols, cap)?;
        let scale = 1.0 + t.rhs.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if t.z_rhs < -1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive leftover artificials out of the basis; rows that cannot
        // pivot are redundant and get dropped.
        let mut drop_rows = Vec::new();
        for r in 0..t.rows.len() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| t.rows[r][j].abs() > 1e-9) {
                    Some(e) => t.pivot(r, e),
                    None => drop_rows.push(r),
                }
            }
        }
        for &r in drop_rows.iter().rev() {
            t.rows.remove(r);
            t.rhs.remove(r);
            t.basis.remove(r);
        }
    }

    // Phase 2 with the real objective; artificial columns stay banned.
    t.z = vec![0.0; ncols];
    t.z_rhs = 0.0;
    for (zj, oj) in t.z.iter_mut().zip(obj) {
        *zj = -oj;
    }
    for r in 0..t.rows.len() {
        let bv = t.basis[r];
        if bv < n && obj[bv] != 0.0 {
            let row = t.rows[r].clone();
            let c = obj[bv];
            for (v, p) in t.z.iter_mut().zip(&row) {
                *v += c * p;
            }
            t.z_rhs += c * t.rhs[r];
        }
    }
    t.run(art_start, cap)?;

    let mut x = lower.to_vec();
    for r in 0..t.rows.len() {
        let bv = t.basis[r];
        if bv < n {
            x[bv] = lower[bv] + t.rhs[r].max(0.0);
        }
    }
    for j in 0..n {
        x[j] = x[j].clamp(lower[j], upper[j]);
    }
    let value = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal(LpSolution { x, value }))
}
