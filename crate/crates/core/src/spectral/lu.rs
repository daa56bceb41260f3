//! Gaussian elimination with partial pivoting.

use super::SpectralError;
use crate::matrix::Matrix;

/// Pivots with magnitude below this are treated as zero.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// An inverse together with its residual `‖M M⁻¹ − I‖_max`.
#[derive(Clone, Debug)]
pub struct Inverse {
    pub matrix: Matrix,
    pub residual: f64,
}

struct Lu {
    /// Combined unit-lower and upper factors.
    factors: Matrix,
    perm: Vec<usize>,
    swaps: usize,
}

fn factorize(m: &Matrix, pivot_floor: f64) -> Result<Lu, SpectralError> {
    super::eigen::check_square_finite(m)?;
    let n = m.rows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for col in 0..n {
        let (pivot_row, pivot) =
            (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot < pivot_floor || pivot == 0.0 {
            return Err(SpectralError::Singular { column: col, pivot });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
            perm.swap(col, pivot_row);
            swaps += 1;
        }
        let d = a[(col, col)];
        for r in (col + 1)..n {
            let factor = a[(r, col)] / d;
            a[(r, col)] = factor;
            if factor != 0.0 {
                for j in (col + 1)..n {
                    a[(r, j)] -= factor * a[(col, j)];
                }
            }
        }
    }
    Ok(Lu {
        factors: a,
        perm,
        swaps,
    })
}

impl Lu {
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.perm.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.factors[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.factors[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.factors[(i, i)];
        }
        b.copy_from_slice(&x);
    }
}

pub fn matrix_inverse(m: &Matrix) -> Result<Inverse, SpectralError> {
    let lu = factorize(m, SINGULAR_PIVOT)?;
    let n = m.rows();
    let mut inv = Matrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        lu.solve_in_place(&mut col);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    let residual = m.matmul(&inv).max_abs_diff(&Matrix::identity(n));
    Ok(Inverse { matrix: inv, residual })
}

/// Determinant via LU; exactly singular matrices give `0.0`.
pub fn determinant(m: &Matrix) -> Result<f64, SpectralError> {
    match factorize(m, 0.0) {
        Ok(lu) => {
            let diag: f64 = (0..m.rows()).map(|i| lu.factors[(i, i)]).product();
            Ok(if lu.swaps % 2 == 0 { diag } else { -diag })
        }
        Err(SpectralError::Singular { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}
