//! Points of the standard simplex, i.e. convex-combination weights.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of the weight sum from one.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("simplex point must have at least one weight")]
    Empty,
    #[error("weight {index} is {value}, weights must be finite and nonnegative")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    BadSum(f64),
    #[error("index {index} out of range for {len} weights")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self, SimplexError> {
        if weights.is_empty() {
            return Err(SimplexError::Empty);
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(SimplexError::InvalidWeight { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(SimplexError::BadSum(sum));
        }
        Ok(Self(weights))
    }

    /// Clamps negatives to zero and rescales to unit sum. Returns an error
    /// only if nothing positive remains.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self, SimplexError> {
        for w in weights.iter_mut() {
            *w = w.max(0.0);
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(SimplexError::BadSum(sum));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Self::new(weights)
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "uniform point needs k >= 1");
        Self(vec![1.0 / k as f64; k])
    }

    /// The simplex vertex `e_index`.
    pub fn vertex(k: usize, index: usize) -> Result<Self, SimplexError> {
        if index >= k {
            return Err(SimplexError::IndexOutOfRange { index, len: k });
        }
        let mut w = vec![0.0; k];
        w[index] = 1.0;
        Ok(Self(w))
    }

    /// Uniform weights on `support`, zero elsewhere.
    pub fn uniform_on(k: usize, support: &[usize]) -> Result<Self, SimplexError> {
        if support.is_empty() {
            return Err(SimplexError::Empty);
        }
        let mut w = vec![0.0; k];
        let share = 1.0 / support.len() as f64;
        for &i in support {
            if i >= k {
                return Err(SimplexError::IndexOutOfRange { index: i, len: k });
            }
            w[i] = share;
        }
        Self::new(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = SimplexError;

    fn try_from(w: Vec<f64>) -> Result<Self, SimplexError> {
        Self::new(w)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for SimplexPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// All points of the simplex in `k` coordinates whose weights are multiples
/// of `1/denominator`. There are `C(denominator + k - 1, k - 1)` of them.
pub fn grid_points(k: usize, denominator: usize) -> Vec<Vec<f64>> {
    fn recurse(slot: usize, remaining: usize, current: &mut Vec<usize>, d: f64, out: &mut Vec<Vec<f64>>) {
        let k = current.len();
        if slot == k - 1 {
            current[slot] = remaining;
            out.push(current.iter().map(|&c| c as f64 / d).collect());
            return;
        }
        for c in 0..=remaining {
            current[slot] = c;
            recurse(slot + 1, remaining - c, current, d, out);
        }
    }

    assert!(k > 0 && denominator > 0);
    let mut out = Vec::new();
    let mut current = vec![0; k];
    recurse(0, denominator, &mut current, denominator as f64, &mut out);
    out
}
