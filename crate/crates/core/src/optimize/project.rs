use crate::simplex::SimplexPoint;

/// Euclidean projection onto the standard simplex (sort-and-threshold).
///
/// # Panics
/// If `v` is empty or contains a non-finite entry.
pub fn project_to_simplex(v: &[f64]) -> SimplexPoint {
    SimplexPoint::normalized(project_weights(v)).expect("projection of a finite vector is on the simplex")
}

pub(crate) fn project_weights(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    assert!(v.iter().all(|x| x.is_finite()), "cannot project a non-finite vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::grid_points;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &SimplexPoint, b: &[f64]) -> bool {
        a.weights().iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn examples() {
        assert!(close(&project_to_simplex(&[0.5, 0.7]), &[0.4, 0.6]));
        assert!(close(&project_to_simplex(&[1.0, 0.0, 0.0]), &[1.0, 0.0, 0.0]));
        assert!(close(&project_to_simplex(&[-1.0, -1.0]), &[0.5, 0.5]));
        assert!(close(&project_to_simplex(&[3.0]), &[1.0]));
    }

    fn dist2(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    #[test]
    fn no_grid_point_is_closer() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let k = 2 + trial % 3;
            let grid = grid_points(k, 16);
            let v: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
            let p = project_to_simplex(&v);
            let d = dist2(p.weights(), &v);
            for g in &grid {
                assert!(dist2(g, &v) >= d - 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_optimal(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let p = project_to_simplex(&v);
            let again = project_to_simplex(p.weights());
            prop_assert!(close(&again, p.weights()));
            // variational inequality: (v − p)ᵀ(y − p) ≤ 0 for all vertices y
            for i in 0..v.len() {
                let s: f64 = (0..v.len())
                    .map(|j| (v[j] - p.weights()[j]) * (f64::from(u8::from(i == j)) - p.weights()[j]))
                    .sum();
                prop_assert!(s <= 1e-9);
            }
        }
    }
}
