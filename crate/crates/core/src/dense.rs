//! Minimal dense linear algebra: LU with partial pivoting, solves,
//! 1-norm condition estimation, and null-vector extraction. System sizes
//! here are small (interpolation systems are at most 10×10; the dense
//! fallback solver is capped at a few thousand unknowns), so nothing is
//! blocked or tuned.

use crate::error::{InterpError, SolveError};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols);
            data.extend_from_slice(r);
        }
        DenseMatrix {
            n_rows,
            n_cols,
            data,
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n_cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.n_cols + c]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.n_cols, self.n_rows);
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                *t.at_mut(c, r) = self.at(r, c);
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut best = 0.0f64;
        for c in 0..self.n_cols {
            let s: f64 = (0..self.n_rows).map(|r| self.at(r, c).abs()).sum();
            best = best.max(s);
        }
        best
    }
}

/// LU factorization with partial (row) pivoting of a square matrix.
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
    /// Smallest |pivot| / max|A| encountered.
    pub min_rel_pivot: f64,
}

/// Relative pivot threshold below which a system is declared singular.
pub const SINGULAR_TOL: f64 = 1e-12;

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors, InterpError> {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut min_rel_pivot = f64::INFINITY;
    for k in 0..n {
        let mut p = k;
        let mut best = lu.at(k, k).abs();
        for r in k + 1..n {
            let v = lu.at(r, k).abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        let rel = best / scale;
        min_rel_pivot = min_rel_pivot.min(rel);
        if rel <= SINGULAR_TOL {
            return Err(InterpError::SingularSystem { pivot: rel });
        }
        if p != k {
            for c in 0..n {
                let tmp = lu.at(k, c);
                *lu.at_mut(k, c) = lu.at(p, c);
                *lu.at_mut(p, c) = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu.at(k, k);
        for r in k + 1..n {
            let factor = lu.at(r, k) / pivot;
            *lu.at_mut(r, k) = factor;
            for c in k + 1..n {
                *lu.at_mut(r, c) -= factor * lu.at(k, c);
            }
        }
    }
    Ok(LuFactors {
        lu,
        perm,
        sign,
        min_rel_pivot,
    })
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.lu.n_rows
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            for c in 0..r {
                x[r] -= self.lu.at(r, c) * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu.at(r, c) * x[c];
            }
            x[r] /= self.lu.at(r, r);
        }
        x
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for k in 0..self.n() {
            d *= self.lu.at(k, k);
        }
        d
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.n();
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for c in 0..n {
            e[c] = 1.0;
            let col = self.solve(&e);
            e[c] = 0.0;
            for r in 0..n {
                *inv.at_mut(r, c) = col[r];
            }
        }
        inv
    }
}

/// 1-norm condition number via the explicit inverse (fine at these sizes).
pub fn condition_1(a: &DenseMatrix) -> f64 {
    match lu_factor(a) {
        Ok(f) => a.norm_1() * f.inverse().norm_1(),
        Err(_) => f64::INFINITY,
    }
}

/// Determinant; 0.0 for rank-deficient input.
pub fn det(a: &DenseMatrix) -> f64 {
    match lu_factor(a) {
        Ok(f) => f.det(),
        Err(_) => 0.0,
    }
}

/// Solve a general square system; `SolveError::Singular` on rank deficiency.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let f = lu_factor(a).map_err(|_| SolveError::Singular)?;
    Ok(f.solve(b))
}

/// A unit-norm null vector of a rank-deficient square matrix, or `None` when
/// the matrix is numerically nonsingular. Gaussian elimination with full
/// pivoting; pivots below `SINGULAR_TOL`·max|A| count as zero.
pub fn null_vector(a: &DenseMatrix) -> Option<Vec<f64>> {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, 0.0f64);
        for r in k..n {
            for c in k..n {
                let v = m.at(r, c).abs();
                if v > best {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        if best <= SINGULAR_TOL * scale {
            break;
        }
        if pr != k {
            for c in 0..n {
                let tmp = m.at(k, c);
                *m.at_mut(k, c) = m.at(pr, c);
                *m.at_mut(pr, c) = tmp;
            }
        }
        if pc != k {
            for r in 0..n {
                let tmp = m.at(r, k);
                *m.at_mut(r, k) = m.at(r, pc);
                *m.at_mut(r, pc) = tmp;
            }
            col_perm.swap(k, pc);
        }
        let pivot = m.at(k, k);
        for r in k + 1..n {
            let f = m.at(r, k) / pivot;
            for c in k..n {
                *m.at_mut(r, c) -= f * m.at(k, c);
            }
        }
        rank += 1;
    }
    if rank == n {
        return None;
    }
    // Back-substitute with the first free variable set to 1.
    let mut y = vec![0.0; n];
    y[rank] = 1.0;
    for r in (0..rank).rev() {
        let mut s = 0.0;
        for c in r + 1..n {
            s += m.at(r, c) * y[c];
        }
        y[r] = -s / m.at(r, r);
    }
    let mut x = vec![0.0; n];
    for (k, &orig) in col_perm.iter().enumerate() {
        x[orig] = y[k];
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut x {
        *v /= norm;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn det_and_sign() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((det(&a) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(solve(&a, &[1.0, 2.0]), Err(SolveError::Singular)));
        let nv = null_vector(&a).unwrap();
        // (1,2)·x = 0 and |x| = 1
        assert!((nv[0] + 2.0 * nv[1]).abs() < 1e-10);
    }

    #[test]
    fn null_vector_none_for_nonsingular() {
        let a = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 2.0]]);
        assert!(null_vector(&a).is_none());
    }

    #[test]
    fn condition_of_identity() {
        let id = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((condition_1(&id) - 1.0).abs() < 1e-12);
    }
}
