//! Local search over the simplex and the four existence questions.
//!
//! The searches are multistart heuristics: every simplex vertex, the
//! barycenter and `restarts` seeded Dirichlet(1) points. Starts run in
//! parallel; the winner is chosen deterministically, so results depend
//! only on the seed.

mod decide;
mod project;
mod quadratic;
mod search;

pub use decide::{
    decide_exists_hurwitz, decide_exists_m_matrix, decide_max_radius, decide_min_radius, Answer, DecideConfig,
    DecideError, Decision, Method, PolytopeRef,
};
pub use project::project_to_simplex;
pub use quadratic::optimize_quadratic_over_simplex;
pub use search::{optimize_spectral_over_simplex, SpectralObjective};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::simplex::SimplexPoint;

/// A local search stops once a full sweep improves the objective by less
/// than this.
pub const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    /// Multiplier turning the objective into one to minimize.
    fn sign(self) -> f64 {
        match self {
            Self::Min => 1.0,
            Self::Max => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub best_point: SimplexPoint,
    pub best_value: f64,
    /// Number of local searches run.
    pub restarts_used: usize,
    /// Whether the winning search met [`CONVERGENCE_TOL`].
    pub converged: bool,
    /// Objective evaluations that failed and were skipped.
    pub failed_evaluations: usize,
}

/// Outcome of one local search; `value` is in the minimized (signed) sense.
struct LocalResult {
    point: Vec<f64>,
    value: f64,
    converged: bool,
    failures: usize,
}

fn starting_points(k: usize, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut starts: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut v = vec![0.0; k];
            v[i] = 1.0;
            v
        })
        .collect();
    if k > 1 {
        starts.push(vec![1.0 / k as f64; k]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts.max(1) {
        let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let sum: f64 = w.iter().sum();
        starts.push(w.into_iter().map(|x| x / sum).collect());
    }
    starts
}

/// Lowest value wins; values within [`CONVERGENCE_TOL`] of the lowest are
/// tied and resolved by the lexicographically smallest point.
fn select_best(results: Vec<LocalResult>) -> Option<LocalResult> {
    let lowest = results
        .iter()
        .map(|r| r.value)
        .filter(|v| !v.is_nan())
        .fold(f64::INFINITY, f64::min);
    results
        .into_iter()
        .filter(|r| r.value <= lowest + CONVERGENCE_TOL)
        .min_by(|a, b| {
            a.point
                .iter()
                .zip(&b.point)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_cover_vertices_and_are_seeded() {
        let s = starting_points(3, 2, 9);
        assert_eq!(s.len(), 3 + 1 + 2);
        assert_eq!(s[1], vec![0.0, 1.0, 0.0]);
        for p in &s {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(s, starting_points(3, 2, 9));
        assert_ne!(s, starting_points(3, 2, 10));
        assert_eq!(starting_points(1, 3, 0).len(), 4);
    }

    #[test]
    fn ties_go_to_the_lexicographically_smallest_point() {
        let r = |point: Vec<f64>, value| LocalResult {
            point,
            value,
            converged: true,
            failures: 0,
        };
        let best = select_best(vec![
            r(vec![0.0, 1.0], 0.5),
            r(vec![1.0, 0.0], 0.5 + 1e-14),
            r(vec![0.5, 0.5], 0.7),
        ])
        .unwrap();
        assert_eq!(best.point, vec![0.0, 1.0]);
    }
}
