//! Exact maximum clique / maximum independent set by branch and bound.
//!
//! Candidate sets are `u128` bitsets. The bound is a greedy sequential
//! coloring of the candidate set: a clique can use at most one vertex per
//! color class, so branches whose color count cannot beat the incumbent are
//! cut.

use serde::Serialize;
use thiserror::Error;

use super::Graph;

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;
/// Hard limit imposed by the bitset width.
pub const MAX_BRUTE_FORCE_CAP: usize = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices, exact search is capped at {cap}")]
    CapExceeded { n: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SetKind {
    IndependentSet,
    Clique,
}

/// An optimal vertex subset: `size` is α(G) for independent sets and ω(G)
/// for cliques.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalSet {
    pub kind: SetKind,
    pub size: usize,
    /// Sorted, 0-based.
    pub vertices: Vec<usize>,
}

pub fn max_independent_set(g: &Graph) -> Result<ExtremalSet, OracleError> {
    max_independent_set_with_cap(g, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn max_clique(g: &Graph) -> Result<ExtremalSet, OracleError> {
    max_clique_with_cap(g, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn max_independent_set_with_cap(g: &Graph, cap: usize) -> Result<ExtremalSet, OracleError> {
    let vertices = search(&g.complement(), cap)?;
    Ok(ExtremalSet {
        kind: SetKind::IndependentSet,
        size: vertices.len(),
        vertices,
    })
}

pub fn max_clique_with_cap(g: &Graph, cap: usize) -> Result<ExtremalSet, OracleError> {
    let vertices = search(g, cap)?;
    Ok(ExtremalSet {
        kind: SetKind::Clique,
        size: vertices.len(),
        vertices,
    })
}

fn search(g: &Graph, cap: usize) -> Result<Vec<usize>, OracleError> {
    let cap = cap.min(MAX_BRUTE_FORCE_CAP);
    let n = g.n();
    if n > cap {
        return Err(OracleError::CapExceeded { n, cap });
    }
    let neighbors: Vec<u128> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| g.has_edge(u, v))
                .fold(0u128, |acc, v| acc | (1 << v))
        })
        .collect();
    let mut search = CliqueSearch {
        neighbors: &neighbors,
        current: Vec::with_capacity(n),
        // any single vertex is a clique
        best: vec![0],
    };
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    search.expand(all);
    let mut best = search.best;
    best.sort_unstable();
    Ok(best)
}

struct CliqueSearch<'a> {
    neighbors: &'a [u128],
    current: Vec<usize>,
    best: Vec<usize>,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut candidates: u128) {
        let (order, colors) = self.color_sort(candidates);
        for idx in (0..order.len()).rev() {
            if self.current.len() + colors[idx] <= self.best.len() {
                return;
            }
            let v = order[idx];
            self.current.push(v);
            let next = candidates & self.neighbors[v];
            if next == 0 {
                if self.current.len() > self.best.len() {
                    self.best.clone_from(&self.current);
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            candidates &= !(1u128 << v);
        }
    }

    /// Greedy sequential coloring. Returns vertices ordered by color and the
    /// color number (1-based) of each, nondecreasing.
    fn color_sort(&self, candidates: u128) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(candidates.count_ones() as usize);
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = candidates;
        let mut color = 0;
        while uncolored != 0 {
            color += 1;
            let mut available = uncolored;
            while available != 0 {
                let v = available.trailing_zeros() as usize;
                let bit = 1u128 << v;
                uncolored &= !bit;
                available &= !bit & !self.neighbors[v];
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive subset enumeration, independent of the branch and bound.
    fn brute_force_clique(g: &Graph) -> usize {
        let n = g.n();
        (0u32..(1 << n))
            .filter(|mask| {
                let vs: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
                g.is_clique(&vs)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_named_graphs() {
        let k3 = Graph::complete(3).unwrap();
        let e3 = Graph::empty(3).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(max_independent_set(&k3).unwrap().size, 1);
        assert_eq!(max_independent_set(&e3).unwrap().size, 3);
        assert_eq!(max_independent_set(&c5).unwrap().size, 2);
        assert_eq!(max_clique(&k3).unwrap().size, 3);
        assert_eq!(max_clique(&e3).unwrap().size, 1);
        assert_eq!(max_clique(&c5).unwrap().size, 2);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::empty(21).unwrap();
        assert_eq!(max_clique(&g), Err(OracleError::CapExceeded { n: 21, cap: 20 }));
        assert_eq!(max_independent_set_with_cap(&g, 30).unwrap().size, 21);
        let big = Graph::empty(129).unwrap();
        assert!(max_clique_with_cap(&big, 500).is_err());
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let n = 1 + trial % 12;
            let p = [0.2, 0.5, 0.8][trial % 3];
            let g = Graph::random(n, p, &mut rng).unwrap();
            let clique = max_clique(&g).unwrap();
            let indep = max_independent_set(&g).unwrap();
            assert_eq!(clique.size, brute_force_clique(&g), "{g:?}");
            assert_eq!(indep.size, brute_force_clique(&g.complement()), "{g:?}");
            assert!(g.is_clique(&clique.vertices));
            assert!(g.is_independent_set(&indep.vertices));
            assert_eq!(clique.vertices.len(), clique.size);
            assert_eq!(indep.size, max_clique(&g.complement()).unwrap().size);
        }
    }

    #[test]
    fn handles_full_width() {
        let g = Graph::complete(40).unwrap();
        assert_eq!(max_clique_with_cap(&g, 128).unwrap().size, 40);
    }
}
