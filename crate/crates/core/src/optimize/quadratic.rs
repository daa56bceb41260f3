use rayon::prelude::*;

use super::project::project_weights;
use super::{select_best, starting_points, Direction, LocalResult, OptResult, CONVERGENCE_TOL};
use crate::graph::{quadratic_form, Graph};
use crate::matrix::Matrix;
use crate::simplex::SimplexPoint;

const GRADIENT_STEPS: usize = 200;
const MAX_SWEEPS: usize = 10_000;

/// Optimizes `yᵀ(I+C)y` (`shifted`) or `yᵀCy` over the simplex, where `C`
/// is the adjacency matrix of `g`.
///
/// Each start runs projected gradient with steps `η/√(t+1)`, then pairwise
/// transfers `y ← y + t(e_a − e_b)` with the exact 1-D minimizer, sweeping
/// until a sweep gains less than [`CONVERGENCE_TOL`]. `restarts` counts the
/// random starts on top of the vertices and barycenter (at least one).
pub fn optimize_quadratic_over_simplex(
    g: &Graph,
    shifted: bool,
    direction: Direction,
    restarts: usize,
    seed: u64,
) -> OptResult {
    let mut q = g.adjacency_matrix();
    if shifted {
        for i in 0..g.n() {
            q[(i, i)] += 1.0;
        }
    }
    let sign = direction.sign();
    let starts = starting_points(g.n(), restarts, seed);
    let restarts_used = starts.len();
    let results: Vec<LocalResult> = starts.into_par_iter().map(|y| local_search(&q, sign, y)).collect();
    let best = select_best(results).expect("at least one start");
    let best_point = SimplexPoint::normalized(best.point).expect("search stays on the simplex");
    let best_value = quadratic_form(g, &best_point, shifted).expect("dimensions match");
    OptResult {
        best_point,
        best_value,
        restarts_used,
        converged: best.converged,
        failed_evaluations: 0,
    }
}

fn local_search(q: &Matrix, sign: f64, start: Vec<f64>) -> LocalResult {
    let n = start.len();
    let f = |y: &[f64]| sign * q.quadratic_form(y);

    let step0 = 0.5 / q.max_abs().max(1.0);
    let mut y = start;
    let mut best = (f(&y), y.clone());
    for t in 0..GRADIENT_STEPS {
        let grad = q.mul_vec(&y);
        let eta = step0 / ((t + 1) as f64).sqrt();
        let moved: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| yi - eta * 2.0 * sign * gi).collect();
        y = project_weights(&moved);
        let value = f(&y);
        if value < best.0 {
            best = (value, y.clone());
        }
    }

    let mut y = best.1;
    let mut qy = q.mul_vec(&y);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut gain = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a == b || y[b] == 0.0 {
                    continue;
                }
                // f(y + t d) − f(y) = s(2t dᵀQy + t² dᵀQd), d = e_a − e_b, t ∈ (0, y_b]
                let curvature = sign * (q[(a, a)] + q[(b, b)] - 2.0 * q[(a, b)]);
                let slope = sign * 2.0 * (qy[a] - qy[b]);
                let delta = |t: f64| t * (slope + curvature * t);
                let mut t = y[b];
                if curvature > 0.0 {
                    let inner = -slope / (2.0 * curvature);
                    if inner > 0.0 && inner < t {
                        t = inner;
                    }
                }
                let change = delta(t);
                if change < 0.0 {
                    y[a] += t;
                    if t == y[b] {
                        y[b] = 0.0;
                    } else {
                        y[b] -= t;
                    }
                    for (i, v) in qy.iter_mut().enumerate() {
                        *v += t * (q[(i, a)] - q[(i, b)]);
                    }
                    gain -= change;
                }
            }
        }
        if gain < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    LocalResult {
        value: f(&y),
        point: y,
        converged,
        failures: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{max_clique, max_independent_set};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_examples() {
        let e3 = Graph::empty(3).unwrap();
        let r = optimize_quadratic_over_simplex(&e3, true, Direction::Min, 3, 0);
        assert!((r.best_value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.best_point.weights().iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-6));
        assert!(r.converged);

        let k3 = Graph::complete(3).unwrap();
        let r = optimize_quadratic_over_simplex(&k3, true, Direction::Min, 3, 0);
        assert!((r.best_value - 1.0).abs() < 1e-12);

        let c5 = Graph::cycle(5).unwrap();
        let r = optimize_quadratic_over_simplex(&c5, false, Direction::Max, 5, 0);
        assert!((r.best_value - 0.5).abs() < 1e-12);
        assert!((r.best_value / 2.0 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn value_matches_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = Graph::random(7, 0.4, &mut rng).unwrap();
            for (shifted, dir) in [(true, Direction::Min), (false, Direction::Max)] {
                let r = optimize_quadratic_over_simplex(&g, shifted, dir, 4, 1);
                let again = quadratic_form(&g, &r.best_point, shifted).unwrap();
                assert!((r.best_value - again).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn reaches_motzkin_straus_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..60 {
            let n = 1 + trial % 9;
            let g = Graph::random(n, 0.5, &mut rng).unwrap();
            let alpha = max_independent_set(&g).unwrap().size as f64;
            let omega = max_clique(&g).unwrap().size as f64;
            let lo = optimize_quadratic_over_simplex(&g, true, Direction::Min, n, trial as u64);
            let hi = optimize_quadratic_over_simplex(&g, false, Direction::Max, n, trial as u64);
            assert!((lo.best_value - 1.0 / alpha).abs() < 1e-6, "{g:?}");
            assert!((hi.best_value - (1.0 - 1.0 / omega)).abs() < 1e-6, "{g:?}");
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let g = Graph::random(8, 0.5, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let a = optimize_quadratic_over_simplex(&g, false, Direction::Max, 6, 42);
        let b = optimize_quadratic_over_simplex(&g, false, Direction::Max, 6, 42);
        assert_eq!(a, b);
    }
}
