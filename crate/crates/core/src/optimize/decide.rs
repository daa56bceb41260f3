use serde::Serialize;
use thiserror::Error;

use super::{optimize_spectral_over_simplex, Direction, SpectralObjective};
use crate::graph::{max_clique_with_cap, max_independent_set_with_cap, ExtremalSet, DEFAULT_BRUTE_FORCE_CAP};
use crate::reductions::{
    build_m_matrix_instance, convex_combination, LoadedPolytope, MatrixPolytope, ReductionInstance, ReductionKind,
};
use crate::simplex::SimplexPoint;
use crate::spectral::{
    is_hurwitz, is_schur, is_z_matrix, m_matrix_check, spectral_radius, Certainty, MMatrixVariant, MarginCheck,
    SpectralError, DEFAULT_MARGIN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Answer {
    Yes,
    No,
    Unknown,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    GraphOracle,
    Numeric,
}

/// Answer to an existence question. `margin` is the distance of the
/// deciding quantity from its threshold; a `Yes` witness clears the
/// threshold by at least that much.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub answer: Answer,
    pub method: Method,
    pub margin: f64,
    pub witness: Option<SimplexPoint>,
}

impl Decision {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("decision serialization cannot fail")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DecideError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("oracle witness failed re-certification: {0}")]
    Certification(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecideConfig {
    /// Largest graph handed to the exact oracle.
    pub brute_force_cap: usize,
    pub restarts: usize,
    pub seed: u64,
    pub margin: f64,
    /// Skip the oracle even when it applies.
    pub force_numeric: bool,
}

impl Default for DecideConfig {
    fn default() -> Self {
        Self {
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
            restarts: 8,
            seed: 0,
            margin: DEFAULT_MARGIN,
            force_numeric: false,
        }
    }
}

/// Input to a decision: a reduction (eligible for the oracle) or a bare
/// polytope.
#[derive(Clone, Copy, Debug)]
pub enum PolytopeRef<'a> {
    Instance(&'a ReductionInstance),
    Raw(&'a MatrixPolytope),
}

impl PolytopeRef<'_> {
    fn polytope(&self) -> &MatrixPolytope {
        match self {
            Self::Instance(inst) => &inst.polytope,
            Self::Raw(p) => p,
        }
    }

    /// The instance, if it is of `kind` and its graph fits under the cap.
    fn oracle_instance(&self, kind: ReductionKind, config: &DecideConfig) -> Option<&ReductionInstance> {
        match self {
            Self::Instance(inst)
                if inst.kind == kind && !config.force_numeric && inst.source.n() <= config.brute_force_cap =>
            {
                Some(inst)
            }
            _ => None,
        }
    }
}

impl<'a> From<&'a ReductionInstance> for PolytopeRef<'a> {
    fn from(inst: &'a ReductionInstance) -> Self {
        Self::Instance(inst)
    }
}

impl<'a> From<&'a MatrixPolytope> for PolytopeRef<'a> {
    fn from(p: &'a MatrixPolytope) -> Self {
        Self::Raw(p)
    }
}

impl<'a> From<&'a LoadedPolytope> for PolytopeRef<'a> {
    fn from(loaded: &'a LoadedPolytope) -> Self {
        match loaded {
            LoadedPolytope::Raw(p) => Self::Raw(p),
            LoadedPolytope::Reduction(inst) => Self::Instance(inst),
        }
    }
}

/// `λ₊ = (r + √(r² + 4q))/2`, the dominant eigenvalue of `B_π`.
fn lambda_plus(r: f64, q: f64) -> f64 {
    (r + (r * r + 4.0 * q).sqrt()) / 2.0
}

fn independence(inst: &ReductionInstance, cap: usize) -> ExtremalSet {
    max_independent_set_with_cap(&inst.source, cap).expect("caller checked the cap")
}

fn uniform_on(inst: &ReductionInstance, set: &ExtremalSet) -> SimplexPoint {
    SimplexPoint::uniform_on(inst.source.n(), &set.vertices).expect("oracle sets are nonempty")
}

fn certified_yes(check: MarginCheck, witness: SimplexPoint, what: &str) -> Result<Decision, DecideError> {
    if check.certainty != Certainty::Yes {
        return Err(DecideError::Certification(format!("{what}: gap {:e}", check.gap)));
    }
    Ok(Decision {
        answer: Answer::Yes,
        method: Method::GraphOracle,
        margin: check.gap,
        witness: Some(witness),
    })
}

fn oracle_no(margin: f64) -> Decision {
    Decision {
        answer: Answer::No,
        method: Method::GraphOracle,
        margin: margin.max(0.0),
        witness: None,
    }
}

/// Re-certifies the best point of a numeric search. Never answers `No`.
fn numeric(check: MarginCheck, point: SimplexPoint) -> Decision {
    let answer = match check.certainty {
        Certainty::Yes => Answer::Yes,
        Certainty::Boundary => Answer::Boundary,
        Certainty::No => Answer::Unknown,
    };
    Decision {
        answer,
        method: Method::Numeric,
        margin: check.gap.abs(),
        witness: Some(point),
    }
}

/// Is some convex combination Schur stable (`ρ < 1`)?
///
/// On a `MinRadius` reduction the answer is `α(G) ≥ j`, witnessed by the
/// uniform point on a maximum independent set. The smallest achievable
/// radius is `λ₊` at `q = 1/α`, which gives the margin of a `No`.
pub fn decide_min_radius<'a>(
    input: impl Into<PolytopeRef<'a>>,
    config: &DecideConfig,
) -> Result<Decision, DecideError> {
    let input = input.into();
    if let Some(inst) = input.oracle_instance(ReductionKind::MinRadius, config) {
        let set = independence(inst, config.brute_force_cap);
        if set.size >= inst.j {
            let witness = uniform_on(inst, &set);
            let m = convex_combination(&inst.polytope, &witness).expect("dimensions match");
            return certified_yes(is_schur(&m, config.margin)?, witness, "is_schur");
        }
        let best = lambda_plus(inst.block_r(), 1.0 / set.size as f64);
        return Ok(oracle_no(best - 1.0));
    }
    let p = input.polytope();
    let r = optimize_spectral_over_simplex(
        p,
        SpectralObjective::Radius,
        Direction::Min,
        config.restarts,
        config.seed,
    );
    let m = convex_combination(p, &r.best_point).expect("dimensions match");
    Ok(numeric(is_schur(&m, config.margin)?, r.best_point))
}

/// Is some convex combination unstable (`ρ > 1`)?
///
/// On a `MaxRadius` reduction the answer is `ω(G) ≥ j`, witnessed by the
/// uniform point on a maximum clique. The largest achievable radius is
/// `λ₊` at `q = 1 − 1/ω`.
pub fn decide_max_radius<'a>(
    input: impl Into<PolytopeRef<'a>>,
    config: &DecideConfig,
) -> Result<Decision, DecideError> {
    let input = input.into();
    let exceeds =
        |m| -> Result<MarginCheck, DecideError> { Ok(MarginCheck::from_gap(spectral_radius(m)? - 1.0, config.margin)) };
    if let Some(inst) = input.oracle_instance(ReductionKind::MaxRadius, config) {
        let set = max_clique_with_cap(&inst.source, config.brute_force_cap).expect("caller checked the cap");
        if set.size >= inst.j {
            let witness = uniform_on(inst, &set);
            let m = convex_combination(&inst.polytope, &witness).expect("dimensions match");
            return certified_yes(exceeds(&m)?, witness, "spectral radius");
        }
        let best = lambda_plus(inst.block_r(), 1.0 - 1.0 / set.size as f64);
        return Ok(oracle_no(1.0 - best));
    }
    let p = input.polytope();
    let r = optimize_spectral_over_simplex(
        p,
        SpectralObjective::Radius,
        Direction::Max,
        config.restarts,
        config.seed,
    );
    let m = convex_combination(p, &r.best_point).expect("dimensions match");
    Ok(numeric(exceeds(&m)?, r.best_point))
}

/// Is some convex combination a nonsingular M-matrix?
///
/// An `MMatrix` reduction is `I − B_π` for the `MinRadius` family, so the
/// answer is again `α(G) ≥ j`; the witness must pass every
/// [`MMatrixVariant`], and the margin is its smallest eigenvalue real part.
/// Numerically only polytopes whose vertices are all Z-matrices are
/// searched (every combination is then a Z-matrix); others are `Unknown`.
pub fn decide_exists_m_matrix<'a>(
    input: impl Into<PolytopeRef<'a>>,
    config: &DecideConfig,
) -> Result<Decision, DecideError> {
    let input = input.into();
    if let Some(inst) = input.oracle_instance(ReductionKind::MMatrix, config) {
        let set = independence(inst, config.brute_force_cap);
        if set.size >= inst.j {
            let witness = uniform_on(inst, &set);
            let m = convex_combination(&inst.polytope, &witness).expect("dimensions match");
            let mut margin = f64::INFINITY;
            for variant in MMatrixVariant::ALL {
                let c = m_matrix_check(&m, variant, config.margin)?;
                if !c.holds {
                    return Err(DecideError::Certification(format!("{variant:?} fails")));
                }
                if variant == MMatrixVariant::PositiveStable {
                    margin = c.margin;
                }
            }
            return certified_yes(MarginCheck::from_gap(margin, config.margin), witness, "M-matrix");
        }
        let best = lambda_plus(inst.block_r(), 1.0 / set.size as f64);
        return Ok(oracle_no(best - 1.0));
    }
    let p = input.polytope();
    if !p.matrices().iter().all(is_z_matrix) {
        return Ok(Decision {
            answer: Answer::Unknown,
            method: Method::Numeric,
            margin: 0.0,
            witness: None,
        });
    }
    let negated = p.negated();
    let r = optimize_spectral_over_simplex(
        &negated,
        SpectralObjective::Abscissa,
        Direction::Min,
        config.restarts,
        config.seed,
    );
    let m = convex_combination(p, &r.best_point).expect("dimensions match");
    let check = is_hurwitz(&m.scale(-1.0), config.margin)?;
    if check.holds() {
        for variant in MMatrixVariant::ALL {
            if !m_matrix_check(&m, variant, config.margin)?.holds {
                return Ok(numeric(MarginCheck::from_gap(0.0, config.margin), r.best_point));
            }
        }
    }
    Ok(numeric(check, r.best_point))
}

/// Is some convex combination Hurwitz?
///
/// A `Hurwitz` reduction is the negation of the `MMatrix` reduction on the
/// same graph, so it is decided through [`decide_exists_m_matrix`] and the
/// witness re-certified as Hurwitz on the original family.
pub fn decide_exists_hurwitz<'a>(
    input: impl Into<PolytopeRef<'a>>,
    config: &DecideConfig,
) -> Result<Decision, DecideError> {
    let input = input.into();
    if let Some(inst) = input.oracle_instance(ReductionKind::Hurwitz, config) {
        let m_inst = build_m_matrix_instance(&inst.source, inst.j).expect("same graph and threshold");
        debug_assert_eq!(m_inst.polytope.negated(), inst.polytope);
        let d = decide_exists_m_matrix(&m_inst, config)?;
        let Some(witness) = d.witness else {
            return Ok(d);
        };
        let m = convex_combination(&inst.polytope, &witness).expect("dimensions match");
        return certified_yes(is_hurwitz(&m, config.margin)?, witness, "is_hurwitz");
    }
    let p = input.polytope();
    let r = optimize_spectral_over_simplex(
        p,
        SpectralObjective::Abscissa,
        Direction::Min,
        config.restarts,
        config.seed,
    );
    let m = convex_combination(p, &r.best_point).expect("dimensions match");
    Ok(numeric(is_hurwitz(&m, config.margin)?, r.best_point))
}
