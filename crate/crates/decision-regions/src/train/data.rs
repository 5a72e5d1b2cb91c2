//! Labeled 2d point sets for the width experiments, plus CSV round-trip.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("dataset is empty")]
    Empty,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    /// CSV with a header `x0,...,x{d-1},label`.
    pub fn to_csv_string(&self) -> String {
        let d = self.dim();
        let mut out = String::new();
        for j in 0..d {
            out.push_str(&format!("x{j},"));
        }
        out.push_str("label\n");
        for (p, l) in self.points.iter().zip(&self.labels) {
            for v in p {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{l}\n"));
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), DataError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn from_csv_str(s: &str) -> Result<Self, DataError> {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut dim = None;
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if i == 0 && line.starts_with('x') {
                continue; // header
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 2 {
                return Err(DataError::Csv {
                    line: i + 1,
                    msg: "need at least one coordinate and a label".into(),
                });
            }
            let (coords, label) = fields.split_at(fields.len() - 1);
            let p: Result<Vec<f64>, _> = coords.iter().map(|c| c.trim().parse()).collect();
            let p = p.map_err(|e| DataError::Csv {
                line: i + 1,
                msg: format!("bad coordinate: {e}"),
            })?;
            if let Some(d) = dim {
                if p.len() != d {
                    return Err(DataError::Csv {
                        line: i + 1,
                        msg: format!("expected {d} coordinates, got {}", p.len()),
                    });
                }
            } else {
                dim = Some(p.len());
            }
            let l: usize = label[0].trim().parse().map_err(|e| DataError::Csv {
                line: i + 1,
                msg: format!("bad label: {e}"),
            })?;
            points.push(p);
            labels.push(l);
        }
        if points.is_empty() {
            return Err(DataError::Empty);
        }
        let n_classes = labels.iter().copied().max().unwrap() + 1;
        Ok(Dataset {
            points,
            labels,
            n_classes,
        })
    }

    pub fn load_csv(path: &Path) -> Result<Self, DataError> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

fn uniform_box(rng: &mut ChaCha8Rng, x: (f64, f64), y: (f64, f64)) -> Vec<f64> {
    vec![rng.gen_range(x.0..x.1), rng.gen_range(y.0..y.1)]
}

/// Three vertical strips: the first class fills `[-2,-1] u [1,2]` in x, the
/// second fills `[-1,1]`, both restricted to `|y| <= 1/2`. The first class
/// is intrinsically disconnected.
pub fn gen_strips(n_per_class: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for i in 0..n_per_class {
        let p = if i % 2 == 0 {
            uniform_box(&mut rng, (-2.0, -1.0), (-0.5, 0.5))
        } else {
            uniform_box(&mut rng, (1.0, 2.0), (-0.5, 0.5))
        };
        points.push(p);
        labels.push(0);
    }
    for _ in 0..n_per_class {
        points.push(uniform_box(&mut rng, (-1.0, 1.0), (-0.5, 0.5)));
        labels.push(1);
    }
    Dataset {
        points,
        labels,
        n_classes: 2,
    }
}

/// Two square islands of the first class in opposite corners, separated by
/// a horizontal band of the second class. Not linearly separable; the
/// islands are far enough apart that a narrow certified net cannot give the
/// first class two regions.
pub fn gen_two_islands(n_per_class: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for i in 0..n_per_class {
        let p = if i % 2 == 0 {
            uniform_box(&mut rng, (-3.8, -2.2), (-3.8, -2.2))
        } else {
            uniform_box(&mut rng, (2.2, 3.8), (2.2, 3.8))
        };
        points.push(p);
        labels.push(0);
    }
    for _ in 0..n_per_class {
        points.push(uniform_box(&mut rng, (-4.0, 4.0), (-0.75, 0.75)));
        labels.push(1);
    }
    Dataset {
        points,
        labels,
        n_classes: 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_in_bounds() {
        let a = gen_strips(40, 9);
        let b = gen_strips(40, 9);
        assert_eq!(a.points, b.points);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.len(), 80);
        for (p, l) in a.points.iter().zip(&a.labels) {
            assert!(p[1].abs() <= 0.5);
            match l {
                0 => assert!((1.0..=2.0).contains(&p[0].abs())),
                _ => assert!(p[0].abs() <= 1.0),
            }
        }

        let c = gen_two_islands(40, 9);
        for (p, l) in c.points.iter().zip(&c.labels) {
            match l {
                0 => {
                    assert!((2.2..=3.8).contains(&p[0].abs()));
                    assert!((p[0] - p[1]).abs() <= 1.6); // same corner
                }
                _ => {
                    assert!(p[0].abs() <= 4.0 && p[1].abs() <= 0.75);
                }
            }
        }
    }

    #[test]
    fn islands_and_band_keep_a_margin() {
        let d = gen_two_islands(200, 1);
        for (p, l) in d.points.iter().zip(&d.labels) {
            if *l == 0 {
                assert!(p[1].abs() >= 2.2); // band tops out at 0.75
            } else {
                assert!(p[1].abs() <= 0.75);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = gen_strips(10, 3);
        let s = d.to_csv_string();
        let back = Dataset::from_csv_str(&s).unwrap();
        assert_eq!(d.points, back.points);
        assert_eq!(d.labels, back.labels);
        assert_eq!(back.n_classes, 2);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        let s = "x0,x1,label\n1.0,2.0,0\n1.0,1\n";
        assert!(matches!(
            Dataset::from_csv_str(s),
            Err(DataError::Csv { line: 3, .. })
        ));
    }
}
