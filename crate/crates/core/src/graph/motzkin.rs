//! Motzkin–Straus quadratic forms.
//!
//! For a graph with adjacency matrix `C`:
//! `min_{y∈Δ} yᵀ(I+C)y = 1/α(G)` and `max_{y∈Δ} yᵀCy = 1 − 1/ω(G)`, both
//! attained by the uniform point on an optimal vertex set. The clique
//! identity is often quoted as `1/2 − 1/(2ω)`; that is the edge sum
//! `Σ_{uv∈E} y_u y_v = ½ yᵀCy`, not `yᵀCy`.

use crate::error::DimensionMismatch;
use crate::simplex::SimplexPoint;

use super::{max_clique, max_independent_set, Graph, OracleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateMode {
    IndependentSet,
    Clique,
}

/// `yᵀ(I+C)y` when `shifted`, otherwise `yᵀCy`.
pub fn quadratic_form(g: &Graph, y: &SimplexPoint, shifted: bool) -> Result<f64, DimensionMismatch> {
    let w = y.weights();
    DimensionMismatch::check(g.n(), w.len())?;
    let mut total = 0.0;
    for u in 0..g.n() {
        let mut row = if shifted { w[u] } else { 0.0 };
        for (v, &wv) in w.iter().enumerate() {
            if g.has_edge(u, v) {
                row += wv;
            }
        }
        total += w[u] * row;
    }
    Ok(total)
}

/// Uniform weights on a maximum independent set (resp. maximum clique),
/// which attains the optimum of the corresponding quadratic form.
pub fn motzkin_straus_certificate(g: &Graph, mode: CertificateMode) -> Result<SimplexPoint, OracleError> {
    let set = match mode {
        CertificateMode::IndependentSet => max_independent_set(g)?,
        CertificateMode::Clique => max_clique(g)?,
    };
    Ok(SimplexPoint::uniform_on(g.n(), &set.vertices).expect("oracle returns a nonempty in-range set"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::grid_points;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_values() {
        let k3 = Graph::complete(3).unwrap();
        let e3 = Graph::empty(3).unwrap();
        let u = SimplexPoint::uniform(3);
        assert!((quadratic_form(&k3, &u, true).unwrap() - 1.0).abs() < 1e-15);
        assert!((quadratic_form(&e3, &u, true).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((quadratic_form(&k3, &u, false).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(quadratic_form(&k3, &SimplexPoint::uniform(2), true).is_err());
    }

    #[test]
    fn certificates() {
        let k3 = Graph::complete(3).unwrap();
        let e3 = Graph::empty(3).unwrap();
        let p = motzkin_straus_certificate(&e3, CertificateMode::IndependentSet).unwrap();
        assert_eq!(p, SimplexPoint::uniform(3));
        assert!((quadratic_form(&e3, &p, true).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let p = motzkin_straus_certificate(&k3, CertificateMode::Clique).unwrap();
        assert_eq!(p, SimplexPoint::uniform(3));
        assert!((quadratic_form(&k3, &p, false).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let p = motzkin_straus_certificate(&k3, CertificateMode::IndependentSet).unwrap();
        assert_eq!(p.weights().iter().filter(|&&w| w == 1.0).count(), 1);
        assert_eq!(quadratic_form(&k3, &p, true).unwrap(), 1.0);
    }

    #[test]
    fn certificate_is_optimal_on_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..12 {
            let n = 2 + trial % 6;
            let g = Graph::random(n, 0.5, &mut rng).unwrap();
            let alpha = max_independent_set(&g).unwrap().size as f64;
            let omega = max_clique(&g).unwrap().size as f64;
            let min_cert = motzkin_straus_certificate(&g, CertificateMode::IndependentSet).unwrap();
            let max_cert = motzkin_straus_certificate(&g, CertificateMode::Clique).unwrap();
            let lo = quadratic_form(&g, &min_cert, true).unwrap();
            let hi = quadratic_form(&g, &max_cert, false).unwrap();
            assert!((lo - 1.0 / alpha).abs() < 1e-12);
            assert!((hi - (1.0 - 1.0 / omega)).abs() < 1e-12);
            for y in grid_points(n, 8) {
                let y = SimplexPoint::new(y).unwrap();
                assert!(quadratic_form(&g, &y, true).unwrap() >= lo - 1e-9);
                assert!(quadratic_form(&g, &y, false).unwrap() <= hi + 1e-9);
            }
        }
    }
}
