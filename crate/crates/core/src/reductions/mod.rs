//! Graph → matrix-polytope reductions.
//!
//! For a graph with adjacency matrix `C` (columns `c_i`) and threshold `j`,
//! each family consists of `n` matrices of size `(n+1)×(n+1)`:
//!
//! | kind         | `A_i`                                   | scalar `r`         |
//! |--------------|-----------------------------------------|--------------------|
//! | `MinRadius`  | `[[0, e_i + c_i], [e_iᵀ, r]]`           | `1 − 1/(j−1)`      |
//! | `MaxRadius`  | `[[0, c_i], [e_iᵀ, r]]`                 | `1/(j−1)`          |
//! | `MMatrix`    | `[[I, −(e_i + c_i)], [−e_iᵀ, 1/(j−1)]]` | `1 − 1/(j−1)`      |
//! | `Hurwitz`    | `[[−I, e_i + c_i], [e_iᵀ, −1/(j−1)]]`   | `−1/(j−1)`         |
//!
//! The convex combination `B_π = Σ π_i A_i` of the first family is
//! `[[0, (I+C)π], [πᵀ, r]]`, whose eigenvalues are `0` (multiplicity `n−1`)
//! and `(r ± √(r² + 4q))/2` with `q = πᵀ(I+C)π`. The same algebra applies to
//! the second family with `q = πᵀCπ`; the M-matrix and Hurwitz families are
//! `I − B_π` and `B_π − I`.
//!
//! For `MaxRadius` the scalar is `1/(j−1)` rather than `1/2 + 1/(2(j−1))`:
//! since `max_Δ πᵀCπ = 1 − 1/ω`, this is the value for which
//! `max ρ(B_π) > 1 ⟺ ω ≥ j`.

mod json;

pub use json::{load_polytope_json, LoadedPolytope, PolytopeFile, PolytopeJsonError, PolytopeMeta};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::DimensionMismatch;
use crate::graph::{quadratic_form, Graph};
use crate::matrix::Matrix;
use crate::simplex::SimplexPoint;

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("j must be ≥ 2 (got {0})")]
    ThresholdTooSmall(usize),
    #[error("j must be ≤ n = {n} (got {j})")]
    ThresholdTooLarge { j: usize, n: usize },
    #[error("a polytope needs at least one vertex matrix")]
    NoMatrices,
    #[error("vertex matrix {index} is {rows}x{cols}, expected {n}x{n}")]
    BadShape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("vertex matrix {0} has non-finite entries")]
    NonFinite(usize),
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReductionKind {
    MinRadius,
    MaxRadius,
    MMatrix,
    Hurwitz,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 4] = [Self::MinRadius, Self::MaxRadius, Self::MMatrix, Self::Hurwitz];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MinRadius => "MIN_RADIUS",
            Self::MaxRadius => "MAX_RADIUS",
            Self::MMatrix => "M_MATRIX",
            Self::Hurwitz => "HURWITZ",
        }
    }

    /// Whether the block form uses `I + C` (otherwise `C`).
    fn shifted(&self) -> bool {
        !matches!(self, Self::MaxRadius)
    }
}

/// The convex hull of `k` square `n×n` vertex matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolytope {
    n: usize,
    matrices: Vec<Matrix>,
}

impl MatrixPolytope {
    pub fn new(matrices: Vec<Matrix>) -> Result<Self, ReductionError> {
        let first = matrices.first().ok_or(ReductionError::NoMatrices)?;
        let n = first.rows();
        for (index, m) in matrices.iter().enumerate() {
            if m.rows() != n || m.cols() != n || n == 0 {
                return Err(ReductionError::BadShape {
                    index,
                    rows: m.rows(),
                    cols: m.cols(),
                    n,
                });
            }
            if !m.is_finite() {
                return Err(ReductionError::NonFinite(index));
            }
        }
        Ok(Self { n, matrices })
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertex matrices.
    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            matrices: self.matrices.iter().map(|m| m.scale(-1.0)).collect(),
        }
    }
}

/// `Σ_i π_i A_i`.
pub fn convex_combination(p: &MatrixPolytope, pi: &SimplexPoint) -> Result<Matrix, DimensionMismatch> {
    DimensionMismatch::check(p.k(), pi.len())?;
    let mut out = Matrix::zeros(p.n, p.n);
    for (w, m) in pi.weights().iter().zip(&p.matrices) {
        if *w != 0.0 {
            out.add_scaled(*w, m);
        }
    }
    Ok(out)
}

/// A polytope produced by one of the reductions, with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionInstance {
    pub polytope: MatrixPolytope,
    pub source: Graph,
    pub j: usize,
    /// The bottom-right scalar of the vertex matrices.
    pub r: f64,
    pub kind: ReductionKind,
}

impl ReductionInstance {
    /// The scalar `r` of the underlying nonnegative block matrix `B_π`.
    pub fn block_r(&self) -> f64 {
        block_scalar(self.kind, self.j)
    }

    /// Eigenvalues of the convex combination at `pi` from the closed form.
    pub fn closed_form_spectrum(&self, pi: &SimplexPoint) -> Result<BlockSpectrum, DimensionMismatch> {
        closed_form_spectrum(self, pi)
    }
}

/// Ratio of two small integers, rounded once.
fn ratio(num: usize, den: usize) -> f64 {
    num as f64 / den as f64
}

/// The scalar of `B_π` for each kind.
fn block_scalar(kind: ReductionKind, j: usize) -> f64 {
    match kind {
        ReductionKind::MaxRadius => ratio(1, j - 1),
        _ => ratio(j - 2, j - 1),
    }
}

fn check_threshold(g: &Graph, j: usize) -> Result<(), ReductionError> {
    if j < 2 {
        return Err(ReductionError::ThresholdTooSmall(j));
    }
    if j > g.n() {
        return Err(ReductionError::ThresholdTooLarge { j, n: g.n() });
    }
    Ok(())
}

/// Builds the reduction of `kind` for graph `g` and threshold `j`.
pub fn build_instance(g: &Graph, j: usize, kind: ReductionKind) -> Result<ReductionInstance, ReductionError> {
    check_threshold(g, j)?;
    let n = g.n();
    let (identity_sign, coupling_sign, corner) = match kind {
        ReductionKind::MinRadius => (0.0, 1.0, ratio(j - 2, j - 1)),
        ReductionKind::MaxRadius => (0.0, 1.0, ratio(1, j - 1)),
        ReductionKind::MMatrix => (1.0, -1.0, ratio(1, j - 1)),
        ReductionKind::Hurwitz => (-1.0, 1.0, -ratio(1, j - 1)),
    };
    let matrices = (0..n)
        .map(|i| {
            let mut a = Matrix::zeros(n + 1, n + 1);
            for d in 0..n {
                a[(d, d)] = identity_sign;
            }
            let mut column = g.adjacency_column(i);
            if kind.shifted() {
                column[i] += 1.0;
            }
            for (row, c) in column.into_iter().enumerate() {
                if c != 0.0 {
                    a[(row, n)] = coupling_sign * c;
                }
            }
            a[(n, i)] = coupling_sign;
            a[(n, n)] = corner;
            a
        })
        .collect();
    Ok(ReductionInstance {
        polytope: MatrixPolytope::new(matrices)?,
        source: g.clone(),
        j,
        r: instance_r(kind, j),
        kind,
    })
}

/// The recorded `r`: the block scalar, except for `Hurwitz` which keeps
/// its own corner entry.
fn instance_r(kind: ReductionKind, j: usize) -> f64 {
    match kind {
        ReductionKind::Hurwitz => -ratio(1, j - 1),
        _ => block_scalar(kind, j),
    }
}

pub fn build_min_radius_instance(g: &Graph, j: usize) -> Result<ReductionInstance, ReductionError> {
    build_instance(g, j, ReductionKind::MinRadius)
}

pub fn build_max_radius_instance(g: &Graph, j: usize) -> Result<ReductionInstance, ReductionError> {
    build_instance(g, j, ReductionKind::MaxRadius)
}

pub fn build_m_matrix_instance(g: &Graph, j: usize) -> Result<ReductionInstance, ReductionError> {
    build_instance(g, j, ReductionKind::MMatrix)
}

pub fn build_hurwitz_instance(g: &Graph, j: usize) -> Result<ReductionInstance, ReductionError> {
    build_instance(g, j, ReductionKind::Hurwitz)
}

/// Closed-form spectrum of a reduction's convex combination.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSpectrum {
    pub kind: ReductionKind,
    /// `πᵀ(I+C)π`, or `πᵀCπ` for `MaxRadius`.
    pub q: f64,
    /// Scalar of the nonnegative block matrix `B_π`.
    pub r: f64,
    /// Roots of `λ² − rλ − q` for `B_π`.
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub zero_multiplicity: usize,
}

impl BlockSpectrum {
    /// Eigenvalues of the instance's own convex combination in ascending
    /// order: `B_π` for the radius kinds, `I − B_π` for `MMatrix`,
    /// `B_π − I` for `Hurwitz`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let map = |x: f64| match self.kind {
            ReductionKind::MinRadius | ReductionKind::MaxRadius => x,
            ReductionKind::MMatrix => 1.0 - x,
            ReductionKind::Hurwitz => x - 1.0,
        };
        let mut out: Vec<f64> = std::iter::repeat_n(0.0, self.zero_multiplicity)
            .chain([self.lambda_plus, self.lambda_minus])
            .map(map)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Spectral radius of `B_π` (`r ≥ 0` makes `λ₊` dominant).
    pub fn block_radius(&self) -> f64 {
        self.lambda_plus.abs().max(self.lambda_minus.abs())
    }
}

pub fn closed_form_spectrum(inst: &ReductionInstance, pi: &SimplexPoint) -> Result<BlockSpectrum, DimensionMismatch> {
    let q = quadratic_form(&inst.source, pi, inst.kind.shifted())?;
    let r = inst.block_r();
    let root = (r * r + 4.0 * q).sqrt();
    let lambda_plus = (r + root) / 2.0;
    // product of the roots is −q
    let lambda_minus = if lambda_plus == 0.0 { 0.0 } else { -q / lambda_plus };
    Ok(BlockSpectrum {
        kind: inst.kind,
        q,
        r,
        lambda_plus,
        lambda_minus,
        zero_multiplicity: inst.source.n() - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Graph {
        Graph::empty(3).unwrap()
    }

    fn k3() -> Graph {
        Graph::complete(3).unwrap()
    }

    #[test]
    fn min_radius_edgeless() {
        let inst = build_min_radius_instance(&e3(), 2).unwrap();
        assert_eq!(inst.polytope.k(), 3);
        assert_eq!(inst.polytope.n(), 4);
        assert_eq!(inst.r, 0.0);
        let a1 = &inst.polytope.matrices()[0];
        let mut expected = Matrix::zeros(4, 4);
        expected[(0, 3)] = 1.0;
        expected[(3, 0)] = 1.0;
        assert_eq!(a1, &expected);
    }

    #[test]
    fn min_radius_triangle_scalar() {
        let inst = build_min_radius_instance(&k3(), 3).unwrap();
        assert_eq!(inst.r, 0.5);
        for a in inst.polytope.matrices() {
            assert_eq!(a[(3, 3)], 0.5);
            // e_i + c_i is all ones for K3
            assert_eq!((0..3).map(|i| a[(i, 3)]).collect::<Vec<_>>(), vec![1.0; 3]);
        }
    }

    #[test]
    fn threshold_errors() {
        assert_eq!(
            build_min_radius_instance(&e3(), 1),
            Err(ReductionError::ThresholdTooSmall(1))
        );
        assert_eq!(
            build_max_radius_instance(&e3(), 4),
            Err(ReductionError::ThresholdTooLarge { j: 4, n: 3 })
        );
        assert_eq!(
            ReductionError::ThresholdTooSmall(1).to_string(),
            "j must be ≥ 2 (got 1)"
        );
    }

    #[test]
    fn max_radius_blocks() {
        let inst = build_max_radius_instance(&k3(), 2).unwrap();
        assert_eq!(inst.r, 1.0);
        let a1 = &inst.polytope.matrices()[0];
        assert_eq!((0..3).map(|i| a1[(i, 3)]).collect::<Vec<_>>(), vec![0.0, 1.0, 1.0]);
        assert_eq!(a1.row(3), &[1.0, 0.0, 0.0, 1.0]);

        let inst = build_max_radius_instance(&e3(), 2).unwrap();
        for (i, a) in inst.polytope.matrices().iter().enumerate() {
            assert!((0..3).all(|row| a[(row, 3)] == 0.0));
            assert_eq!(a[(3, i)], 1.0);
            assert_eq!(a[(3, 3)], 1.0);
        }

        assert_eq!(build_max_radius_instance(&k3(), 3).unwrap().r, 0.5);
    }

    #[test]
    fn max_radius_threshold_separates_clique_numbers() {
        // K2 plus an isolated vertex: ω = 2
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let best = SimplexPoint::new(vec![0.5, 0.5, 0.0]).unwrap();
        let j2 = build_max_radius_instance(&g, 2).unwrap();
        let j3 = build_max_radius_instance(&g, 3).unwrap();
        assert!(j2.closed_form_spectrum(&best).unwrap().lambda_plus > 1.0);
        // at the optimum, the j = 3 family sits exactly on the boundary
        let s = j3.closed_form_spectrum(&best).unwrap();
        assert!((s.lambda_plus - 1.0).abs() < 1e-15);
    }

    #[test]
    fn m_matrix_edgeless() {
        let inst = build_m_matrix_instance(&e3(), 2).unwrap();
        let mut expected = Matrix::identity(4);
        expected[(0, 3)] = -1.0;
        expected[(3, 0)] = -1.0;
        assert_eq!(&inst.polytope.matrices()[0], &expected);
    }

    #[test]
    fn m_matrix_is_identity_minus_min_radius() {
        for g in [e3(), k3(), Graph::cycle(5).unwrap()] {
            for j in 2..=g.n() {
                let m = build_m_matrix_instance(&g, j).unwrap();
                let b = build_min_radius_instance(&g, j).unwrap();
                assert_eq!(m.r, b.r);
                for (am, ab) in m.polytope.matrices().iter().zip(b.polytope.matrices()) {
                    let id = Matrix::identity(g.n() + 1);
                    assert!(am.max_abs_diff(&id.sub(ab)) <= 1e-15);
                    assert!(crate::spectral::is_z_matrix(am));
                }
            }
        }
    }

    #[test]
    fn hurwitz_is_negated_m_matrix() {
        for g in [e3(), k3()] {
            for j in 2..=3 {
                let h = build_hurwitz_instance(&g, j).unwrap();
                let m = build_m_matrix_instance(&g, j).unwrap();
                assert_eq!(h.r, -1.0 / (j - 1) as f64);
                assert_eq!(h.polytope, m.polytope.negated());
                for a in h.polytope.matrices() {
                    assert!(crate::spectral::is_metzler(a));
                    assert!((0..4).all(|d| a[(d, d)] < 0.0));
                }
            }
        }
        let h = build_hurwitz_instance(&e3(), 2).unwrap();
        let a1 = &h.polytope.matrices()[0];
        assert_eq!((0..4).map(|d| a1[(d, d)]).collect::<Vec<_>>(), vec![-1.0; 4]);
        assert_eq!((a1[(0, 3)], a1[(3, 0)]), (1.0, 1.0));
    }

    #[test]
    fn convex_combination_examples() {
        let inst = build_min_radius_instance(&e3(), 2).unwrap();
        let p = &inst.polytope;
        let v = convex_combination(p, &SimplexPoint::vertex(3, 0).unwrap()).unwrap();
        assert_eq!(&v, &p.matrices()[0]);

        let b = convex_combination(p, &SimplexPoint::uniform(3)).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!((0..3).map(|i| b[(i, 3)]).collect::<Vec<_>>(), vec![third; 3]);
        assert_eq!(b.row(3), &[third, third, third, 0.0]);

        assert!(convex_combination(p, &SimplexPoint::uniform(2)).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let inst = build_min_radius_instance(&e3(), 2).unwrap();
        let s = inst.closed_form_spectrum(&SimplexPoint::uniform(3)).unwrap();
        assert!((s.q - 1.0 / 3.0).abs() < 1e-15);
        let root = 1.0 / 3f64.sqrt();
        assert!((s.lambda_plus - root).abs() < 1e-15);
        assert!((s.lambda_minus + root).abs() < 1e-15);
        assert_eq!(s.zero_multiplicity, 2);

        let inst = build_min_radius_instance(&k3(), 2).unwrap();
        let s = inst.closed_form_spectrum(&SimplexPoint::vertex(3, 0).unwrap()).unwrap();
        assert_eq!(s.eigenvalues(), vec![-1.0, 0.0, 0.0, 1.0]);

        let inst = build_max_radius_instance(&k3(), 2).unwrap();
        let s = inst.closed_form_spectrum(&SimplexPoint::uniform(3)).unwrap();
        assert!((s.q - 2.0 / 3.0).abs() < 1e-15);
        let expected = (1.0 + (1.0f64 + 8.0 / 3.0).sqrt()) / 2.0;
        assert!((s.lambda_plus - expected).abs() < 1e-15);
        assert!((s.lambda_plus - 1.4574).abs() < 1e-4);
    }

    #[test]
    fn polytope_validation() {
        assert_eq!(MatrixPolytope::new(vec![]), Err(ReductionError::NoMatrices));
        assert!(matches!(
            MatrixPolytope::new(vec![Matrix::identity(2), Matrix::identity(3)]),
            Err(ReductionError::BadShape { index: 1, .. })
        ));
        let mut bad = Matrix::identity(2);
        bad[(0, 0)] = f64::NAN;
        assert_eq!(MatrixPolytope::new(vec![bad]), Err(ReductionError::NonFinite(0)));
    }
}
