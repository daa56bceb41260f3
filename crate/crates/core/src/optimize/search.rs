use rayon::prelude::*;
use serde::Serialize;

use super::{select_best, starting_points, Direction, LocalResult, OptResult, CONVERGENCE_TOL};
use crate::reductions::{convex_combination, MatrixPolytope};
use crate::simplex::SimplexPoint;
use crate::spectral::eigenvalues;

const MAX_SWEEPS: usize = 50;
/// Width at which golden-section search stops.
const LINE_TOL: f64 = 1e-9;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpectralObjective {
    Radius,
    Abscissa,
}

/// Spectral radius or abscissa of the convex combination at `pi`, `None`
/// when the eigensolver fails.
fn evaluate(p: &MatrixPolytope, objective: SpectralObjective, pi: &[f64]) -> Option<f64> {
    let pi = SimplexPoint::normalized(pi.to_vec()).ok()?;
    let m = convex_combination(p, &pi).ok()?;
    let s = eigenvalues(&m).ok()?;
    Some(match objective {
        SpectralObjective::Radius => s.radius(),
        SpectralObjective::Abscissa => s.abscissa(),
    })
}

/// Heuristic search for the extreme spectral radius or abscissa over the
/// convex hull of `p`.
///
/// Each start sweeps over ordered coordinate pairs, moving mass between
/// them with a golden-section line search (the objective is not smooth, so
/// no gradients are used). There is no global guarantee. Points where the
/// eigensolver fails are skipped and counted in `failed_evaluations`.
pub fn optimize_spectral_over_simplex(
    p: &MatrixPolytope,
    objective: SpectralObjective,
    direction: Direction,
    restarts: usize,
    seed: u64,
) -> OptResult {
    let sign = direction.sign();
    let starts = starting_points(p.k(), restarts, seed);
    let restarts_used = starts.len();
    let results: Vec<LocalResult> = starts
        .into_par_iter()
        .map(|start| local_search(p, objective, sign, start))
        .collect();
    let failed_evaluations = results.iter().map(|r| r.failures).sum();
    let best = select_best(results).expect("at least one start");
    let best_point = SimplexPoint::normalized(best.point).expect("search stays on the simplex");
    let best_value = evaluate(p, objective, best_point.weights()).unwrap_or(f64::NAN);
    OptResult {
        best_point,
        best_value,
        restarts_used,
        converged: best.converged,
        failed_evaluations,
    }
}

fn local_search(p: &MatrixPolytope, objective: SpectralObjective, sign: f64, start: Vec<f64>) -> LocalResult {
    let k = start.len();
    let mut failures = 0;
    let mut f = |pi: &[f64]| match evaluate(p, objective, pi) {
        Some(v) => sign * v,
        None => {
            failures += 1;
            f64::INFINITY
        }
    };

    let mut pi = start;
    let mut current = f(&pi);
    let mut converged = false;
    let mut trial = pi.clone();
    for _ in 0..MAX_SWEEPS {
        let mut gain = 0.0;
        for a in 0..k {
            for b in (a + 1)..k {
                // move t from b to a, t ∈ [−π_a, π_b]
                let (lo, hi) = (-pi[a], pi[b]);
                if hi - lo <= LINE_TOL {
                    continue;
                }
                let mut at = |t: f64| {
                    trial.copy_from_slice(&pi);
                    trial[a] = (pi[a] + t).max(0.0);
                    trial[b] = (pi[b] - t).max(0.0);
                    f(&trial)
                };
                let (mut x0, mut x1) = (lo, hi);
                let mut c = x1 - INV_PHI * (x1 - x0);
                let mut d = x0 + INV_PHI * (x1 - x0);
                let (mut fc, mut fd) = (at(c), at(d));
                while x1 - x0 > LINE_TOL {
                    if fc <= fd {
                        x1 = d;
                        d = c;
                        fd = fc;
                        c = x1 - INV_PHI * (x1 - x0);
                        fc = at(c);
                    } else {
                        x0 = c;
                        c = d;
                        fc = fd;
                        d = x0 + INV_PHI * (x1 - x0);
                        fd = at(d);
                    }
                }
                let mut best = (current, 0.0);
                for (value, t) in [(fc, c), (fd, d), (at(lo), lo), (at(hi), hi)] {
                    if value < best.0 {
                        best = (value, t);
                    }
                }
                if best.1 != 0.0 {
                    let t = best.1;
                    pi[a] = if t == lo { 0.0 } else { (pi[a] + t).max(0.0) };
                    pi[b] = if t == hi { 0.0 } else { (pi[b] - t).max(0.0) };
                    gain += current - best.0;
                    current = best.0;
                }
            }
        }
        if gain < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    LocalResult {
        point: pi,
        value: current,
        converged,
        failures,
    }
}
