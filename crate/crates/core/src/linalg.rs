//! Exact Gaussian elimination over the rationals, fed one equation at a time.

use crate::exact::Scalar;

/// What happened to an equation pushed into an [`IncrementalSolver`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    /// The row raised the rank.
    Pivot,
    /// The row reduced to `0 = 0`.
    Redundant,
    /// The row reduced to `0 = c` with `c != 0`.
    Inconsistent,
}

/// Keeps the accepted equations in reduced row echelon form.
///
/// Pivot choice is the first nonzero entry; over the rationals there is no
/// conditioning to worry about.
#[derive(Clone, Debug)]
pub struct IncrementalSolver {
    unknowns: usize,
    rows: Vec<(usize, Vec<Scalar>, Scalar)>,
}

impl IncrementalSolver {
    pub fn new(unknowns: usize) -> Self {
        IncrementalSolver { unknowns, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    /// Adds `sum_j row[j] x_j = rhs`. Inconsistent rows are not stored.
    pub fn push(&mut self, mut row: Vec<Scalar>, mut rhs: Scalar) -> RowStatus {
        assert_eq!(row.len(), self.unknowns, "row length must match the unknown count");
        for (col, prow, prhs) in &self.rows {
            let f = row[*col].clone();
            if f.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            rhs -= &f * prhs;
        }
        let Some(col) = row.iter().position(|x| !x.is_zero()) else {
            return if rhs.is_zero() { RowStatus::Redundant } else { RowStatus::Inconsistent };
        };
        let inv = row[col].recip();
        for x in row.iter_mut() {
            *x *= &inv;
        }
        rhs *= &inv;
        for (_, prow, prhs) in self.rows.iter_mut() {
            let f = prow[col].clone();
            if f.is_zero() {
                continue;
            }
            for (x, r) in prow.iter_mut().zip(&row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
            *prhs -= &f * &rhs;
        }
        self.rows.push((col, row, rhs));
        RowStatus::Pivot
    }

    /// The unique solution, if the accepted rows have full column rank.
    pub fn solution(&self) -> Option<Vec<Scalar>> {
        if self.rank() < self.unknowns {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.unknowns];
        for (col, _, rhs) in &self.rows {
            x[*col] = rhs.clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from(x)).collect()
    }

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1, 2x + 2y = 6
        let mut s = IncrementalSolver::new(2);
        assert_eq!(s.push(v(&[1, 1]), Scalar::from(3)), RowStatus::Pivot);
        assert_eq!(s.push(v(&[1, -1]), Scalar::from(1)), RowStatus::Pivot);
        assert_eq!(s.push(v(&[2, 2]), Scalar::from(6)), RowStatus::Redundant);
        assert_eq!(s.solution().unwrap(), v(&[2, 1]));
        assert_eq!(s.push(v(&[0, 1]), Scalar::from(5)), RowStatus::Inconsistent);
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rank_deficient_has_no_solution() {
        let mut s = IncrementalSolver::new(3);
        s.push(v(&[0, 1, 1]), Scalar::from(1));
        s.push(v(&[0, 2, 2]), Scalar::from(2));
        assert_eq!(s.rank(), 1);
        assert!(s.solution().is_none());
    }

    #[test]
    fn hilbert_matrix_exact() {
        let n = 6;
        let mut s = IncrementalSolver::new(n);
        let x_true: Vec<Scalar> = (0..n as i64).map(|i| Scalar::new(i - 2, i + 1)).collect();
        for i in 0..n {
            let row: Vec<Scalar> = (0..n).map(|j| Scalar::new(1, (i + j + 1) as i64)).collect();
            let rhs = row.iter().zip(&x_true).map(|(a, b)| a * b).sum();
            assert_eq!(s.push(row, rhs), RowStatus::Pivot);
        }
        assert_eq!(s.solution().unwrap(), x_true);
    }
}
