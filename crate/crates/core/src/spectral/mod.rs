//! Spectra of small dense matrices and the stability / M-matrix predicates
//! built on them.
//!
//! Strict inequalities such as `ρ < 1` are decided against an explicit
//! margin: values within `±margin` of the threshold are reported as
//! [`Certainty::Boundary`] rather than forced to one side.

mod eigen;
mod lu;

pub use eigen::{eigenvalues, spectral_abscissa, spectral_radius, Eigenvalue, Spectrum};
pub use lu::{determinant, matrix_inverse, Inverse, SINGULAR_PIVOT};

use serde::Serialize;
use thiserror::Error;

use crate::matrix::Matrix;

/// Default margin for strict spectral inequalities.
pub const DEFAULT_MARGIN: f64 = 1e-9;
/// Tolerance on the imaginary part for an eigenvalue to count as real,
/// relative to `1 + |λ|`.
pub const REAL_EIGENVALUE_TOL: f64 = 1e-9;
/// Most negative entry accepted in a "nonnegative" inverse.
pub const INVERSE_NONNEGATIVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("QR iteration failed to converge ({remaining} eigenvalues left after {iterations} iterations)")]
    NoConvergence { remaining: usize, iterations: usize },
    #[error("matrix is singular (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certainty {
    Yes,
    No,
    Boundary,
}

/// Outcome of a margin-certified comparison. `gap` is the signed distance
/// of the certified quantity from its threshold, positive when the
/// property holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginCheck {
    pub certainty: Certainty,
    pub gap: f64,
}

impl MarginCheck {
    pub fn from_gap(gap: f64, margin: f64) -> Self {
        let certainty = if gap > margin {
            Certainty::Yes
        } else if gap < -margin {
            Certainty::No
        } else {
            Certainty::Boundary
        };
        Self { certainty, gap }
    }

    pub fn holds(&self) -> bool {
        self.certainty == Certainty::Yes
    }
}

/// Schur stability: `ρ(m) < 1 − margin`, gap `1 − ρ`.
pub fn is_schur(m: &Matrix, margin: f64) -> Result<MarginCheck, SpectralError> {
    Ok(MarginCheck::from_gap(1.0 - spectral_radius(m)?, margin))
}

/// Hurwitz stability: spectral abscissa `< −margin`, gap `−abscissa`.
pub fn is_hurwitz(m: &Matrix, margin: f64) -> Result<MarginCheck, SpectralError> {
    Ok(MarginCheck::from_gap(-spectral_abscissa(m)?, margin))
}

/// Every off-diagonal entry is `≤ 0` (exact comparison).
pub fn is_z_matrix(m: &Matrix) -> bool {
    m.is_square() && (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)] <= 0.0))
}

/// Every off-diagonal entry is `≥ 0` (exact comparison).
pub fn is_metzler(m: &Matrix) -> bool {
    m.is_square() && (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)] >= 0.0))
}

/// Characterisations of a nonsingular M-matrix among Z-matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MMatrixVariant {
    /// All eigenvalues have positive real part.
    PositiveStable,
    /// All real eigenvalues are positive.
    D16,
    /// Invertible with an entrywise nonnegative inverse.
    N38,
}

impl MMatrixVariant {
    pub const ALL: [MMatrixVariant; 3] = [Self::PositiveStable, Self::D16, Self::N38];
}

/// Result of one M-matrix test. `margin` is the distance of the deciding
/// quantity from its threshold: infinite for non-Z-matrices, zero for a
/// singular matrix under N38.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MMatrixCheck {
    pub holds: bool,
    pub margin: f64,
}

/// Tests whether `m` is a nonsingular M-matrix under `variant`, with
/// eigenvalue comparisons made against `tol`.
pub fn m_matrix_check(m: &Matrix, variant: MMatrixVariant, tol: f64) -> Result<MMatrixCheck, SpectralError> {
    eigen::check_square_finite(m)?;
    if !is_z_matrix(m) {
        return Ok(MMatrixCheck {
            holds: false,
            margin: f64::INFINITY,
        });
    }
    match variant {
        MMatrixVariant::PositiveStable => {
            let lowest = eigenvalues(m)?.min_real_part();
            Ok(MMatrixCheck {
                holds: lowest > tol,
                margin: lowest.abs(),
            })
        }
        MMatrixVariant::D16 => {
            let spectrum = eigenvalues(m)?;
            let (lowest, closest) = spectrum
                .real_eigenvalues(REAL_EIGENVALUE_TOL)
                .fold((f64::INFINITY, f64::INFINITY), |(lo, cl), x| {
                    (lo.min(x), cl.min(x.abs()))
                });
            Ok(MMatrixCheck {
                holds: lowest > tol,
                margin: closest,
            })
        }
        MMatrixVariant::N38 => {
            let inv = matrix_inverse(m)?;
            let lowest = inv.matrix.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
            Ok(MMatrixCheck {
                holds: lowest >= -INVERSE_NONNEGATIVE_TOL,
                margin: lowest.abs(),
            })
        }
    }
}

/// Nonsingular M-matrix test at the default tolerance. Under
/// [`MMatrixVariant::N38`] a singular matrix is an error, not `false`.
pub fn is_nonsingular_m_matrix(m: &Matrix, variant: MMatrixVariant) -> Result<bool, SpectralError> {
    Ok(m_matrix_check(m, variant, DEFAULT_MARGIN)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Matrix {
        Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn stability_predicates() {
        let neg = Matrix::identity(3).scale(-1.0);
        let h = is_hurwitz(&neg, 1e-9).unwrap();
        assert!(h.holds());
        assert_eq!(h.gap, 1.0);

        let s = is_schur(&golden(), 1e-9).unwrap();
        assert_eq!(s.certainty, Certainty::No);
        assert!((s.gap - (1.0 - (1.0 + 5f64.sqrt()) / 2.0)).abs() < 1e-14);

        let s = is_schur(&Matrix::identity(2), 1e-9).unwrap();
        assert_eq!(s.certainty, Certainty::Boundary);
        let h = is_hurwitz(&Matrix::zeros(2, 2), 1e-9).unwrap();
        assert_eq!(h.certainty, Certainty::Boundary);
    }

    #[test]
    fn z_matrix() {
        assert!(is_z_matrix(&Matrix::identity(3)));
        assert!(!is_z_matrix(&Matrix::from_fn(2, 2, |_, _| 1.0)));
        assert!(is_metzler(&Matrix::from_fn(2, 2, |_, _| 1.0)));
        assert!(!is_z_matrix(&Matrix::zeros(2, 3)));
    }

    #[test]
    fn identity_is_m_matrix_under_all_variants() {
        for v in MMatrixVariant::ALL {
            assert!(is_nonsingular_m_matrix(&Matrix::identity(4), v).unwrap());
        }
    }

    #[test]
    fn non_z_matrix_is_never_m_matrix() {
        let m = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.0, 2.0]]).unwrap();
        for v in MMatrixVariant::ALL {
            let c = m_matrix_check(&m, v, 1e-9).unwrap();
            assert!(!c.holds);
            assert_eq!(c.margin, f64::INFINITY);
        }
    }

    #[test]
    fn singular_z_matrix() {
        // I - N with ρ(N) = 1
        let m = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!(!is_nonsingular_m_matrix(&m, MMatrixVariant::PositiveStable).unwrap());
        assert!(!is_nonsingular_m_matrix(&m, MMatrixVariant::D16).unwrap());
        assert!(matches!(
            is_nonsingular_m_matrix(&m, MMatrixVariant::N38),
            Err(SpectralError::Singular { .. })
        ));
    }

    #[test]
    fn z_matrix_that_is_not_m_matrix() {
        // 0.5 I - N with ρ(N) = 1: eigenvalues -0.5 and 1.5
        let m = Matrix::from_rows(&[vec![0.5, -1.0], vec![-1.0, 0.5]]).unwrap();
        for v in MMatrixVariant::ALL {
            assert!(!is_nonsingular_m_matrix(&m, v).unwrap(), "{v:?}");
        }
    }
}
