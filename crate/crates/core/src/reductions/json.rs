//! Polytope JSON files.
//!
//! ```json
//! {"n": 4, "k": 3, "matrices": [[...16 row-major reals...], ...],
//!  "meta": {"kind": "MIN_RADIUS", "j": 2, "r": 0.0, "graph": "p edge 3 0\n"}}
//! ```
//!
//! `meta` is optional. When present, the instance is rebuilt from the
//! embedded graph and must reproduce the stored matrices. Matrices may also
//! be given as nested rows when hand-authored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{build_instance, MatrixPolytope, ReductionError, ReductionInstance, ReductionKind};
use crate::graph::{parse_dimacs, to_dimacs, DimacsError};
use crate::matrix::Matrix;

/// Largest entrywise deviation tolerated between stored and rebuilt matrices.
const META_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PolytopeJsonError {
    #[error("invalid polytope JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("header says k = {declared}, found {found} matrices")]
    CountMismatch { declared: usize, found: usize },
    #[error("matrix {index} has {len} entries, expected n² = {expected}")]
    EntryCount { index: usize, len: usize, expected: usize },
    #[error("matrix {index} is not {n}x{n}")]
    RowShape { index: usize, n: usize },
    #[error(transparent)]
    Polytope(#[from] ReductionError),
    #[error("meta graph: {0}")]
    Graph(#[from] DimacsError),
    #[error("meta does not match the stored matrices: {0}")]
    MetaMismatch(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixEntry {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeMeta {
    pub kind: ReductionKind,
    pub j: usize,
    pub r: f64,
    /// Source graph in DIMACS text.
    pub graph: String,
}

/// Serialized form of a polytope.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub n: usize,
    pub k: usize,
    matrices: Vec<MatrixEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<PolytopeMeta>,
}

impl PolytopeFile {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("polytope serialization cannot fail")
    }
}

impl From<&MatrixPolytope> for PolytopeFile {
    fn from(p: &MatrixPolytope) -> Self {
        Self {
            n: p.n(),
            k: p.k(),
            matrices: p
                .matrices()
                .iter()
                .map(|m| MatrixEntry::Flat(m.as_slice().to_vec()))
                .collect(),
            meta: None,
        }
    }
}

impl From<&ReductionInstance> for PolytopeFile {
    fn from(inst: &ReductionInstance) -> Self {
        let mut file = PolytopeFile::from(&inst.polytope);
        file.meta = Some(PolytopeMeta {
            kind: inst.kind,
            j: inst.j,
            r: inst.r,
            graph: to_dimacs(&inst.source),
        });
        file
    }
}

impl MatrixPolytope {
    pub fn to_json(&self) -> String {
        PolytopeFile::from(self).to_json_string()
    }
}

impl ReductionInstance {
    pub fn to_json(&self) -> String {
        PolytopeFile::from(self).to_json_string()
    }
}

/// A polytope read from JSON: either a recognised reduction or a raw hull.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedPolytope {
    Raw(MatrixPolytope),
    Reduction(ReductionInstance),
}

impl LoadedPolytope {
    pub fn polytope(&self) -> &MatrixPolytope {
        match self {
            Self::Raw(p) => p,
            Self::Reduction(inst) => &inst.polytope,
        }
    }

    pub fn instance(&self) -> Option<&ReductionInstance> {
        match self {
            Self::Raw(_) => None,
            Self::Reduction(inst) => Some(inst),
        }
    }
}

pub fn load_polytope_json(text: &str) -> Result<LoadedPolytope, PolytopeJsonError> {
    let file: PolytopeFile = serde_json::from_str(text)?;
    if file.matrices.len() != file.k {
        return Err(PolytopeJsonError::CountMismatch {
            declared: file.k,
            found: file.matrices.len(),
        });
    }
    let n = file.n;
    let matrices = file
        .matrices
        .into_iter()
        .enumerate()
        .map(|(index, entry)| match entry {
            MatrixEntry::Flat(data) => {
                let len = data.len();
                Matrix::from_row_major(n, n, data).ok_or(PolytopeJsonError::EntryCount {
                    index,
                    len,
                    expected: n * n,
                })
            }
            MatrixEntry::Rows(rows) => Matrix::from_rows(&rows)
                .filter(|m| m.rows() == n && m.cols() == n)
                .ok_or(PolytopeJsonError::RowShape { index, n }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let polytope = MatrixPolytope::new(matrices)?;

    let Some(meta) = file.meta else {
        return Ok(LoadedPolytope::Raw(polytope));
    };
    let graph = parse_dimacs(&meta.graph)?;
    let inst = build_instance(&graph, meta.j, meta.kind)?;
    if inst.polytope.k() != polytope.k() || inst.polytope.n() != polytope.n() {
        return Err(PolytopeJsonError::MetaMismatch(format!(
            "graph yields k = {}, n = {}",
            inst.polytope.k(),
            inst.polytope.n()
        )));
    }
    let deviation = inst
        .polytope
        .matrices()
        .iter()
        .zip(polytope.matrices())
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);
    if deviation > META_MATCH_TOL {
        return Err(PolytopeJsonError::MetaMismatch(format!(
            "matrices deviate by {deviation:e}"
        )));
    }
    if (inst.r - meta.r).abs() > META_MATCH_TOL {
        return Err(PolytopeJsonError::MetaMismatch(format!(
            "r = {} but the construction gives {}",
            meta.r, inst.r
        )));
    }
    Ok(LoadedPolytope::Reduction(inst))
}
