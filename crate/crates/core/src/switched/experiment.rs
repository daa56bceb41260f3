//! Fixed versus switched stabilizability on `Hurwitz` reductions.
//!
//! For each graph and threshold the fixed answer comes from the exact
//! oracle. Switched evidence is gathered twice: with vertex-valued signals
//! (the min-projection law) and with the constant signal at a convex
//! combination (the oracle witness when one exists, otherwise the uniform
//! point on a maximum independent set, which minimizes the spectral
//! abscissa over the hull).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{assess_switched_stabilizability, AssessConfig, SwitchingPolicy, Verdict};
use crate::graph::{max_independent_set_with_cap, motzkin_straus_certificate, CertificateMode, Graph};
use crate::optimize::{decide_exists_hurwitz, Answer, DecideConfig};
use crate::reductions::build_hurwitz_instance;

pub const EXPERIMENT_CSV_HEADER: &str =
    "graph_id,n,j,alpha,fixed_answer,switched_vertex_verdict,switched_convex_verdict,worst_rate,flag";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    /// Fixed answer NO but switched evidence found.
    ConjectureCounterexampleCandidate,
    /// A simulation or certification failed.
    NumericFailure,
    /// Fixed answer YES but the constant witness signal showed no decay.
    SoundnessViolation,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ConjectureCounterexampleCandidate => "CONJECTURE_COUNTEREXAMPLE_CANDIDATE",
            Self::NumericFailure => "NUMERIC_FAILURE",
            Self::SoundnessViolation => "SOUNDNESS_VIOLATION",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("graph {id} has {n} vertices, above the oracle cap {cap}")]
    OverCap { id: String, n: usize, cap: usize },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub assess: AssessConfig,
    pub decide: DecideConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub graph_id: String,
    pub n: usize,
    pub j: usize,
    pub alpha: usize,
    pub fixed_answer: Option<Answer>,
    pub switched_vertex_verdict: Option<Verdict>,
    pub switched_convex_verdict: Option<Verdict>,
    /// The smaller of the two families' slowest rates.
    pub worst_rate: f64,
    pub flag: Option<Flag>,
    /// Why a row failed, when it did.
    pub error: Option<String>,
}

impl ExperimentRow {
    pub fn to_csv_line(&self) -> String {
        let answer = match self.fixed_answer {
            Some(Answer::Yes) => "YES",
            Some(Answer::No) => "NO",
            Some(Answer::Unknown) => "UNKNOWN",
            Some(Answer::Boundary) => "BOUNDARY",
            None => "",
        };
        format!(
            "{},{},{},{},{},{},{},{:.9e},{}",
            self.graph_id,
            self.n,
            self.j,
            self.alpha,
            answer,
            self.switched_vertex_verdict.map_or("", Verdict::as_str),
            self.switched_convex_verdict.map_or("", Verdict::as_str),
            self.worst_rate,
            self.flag.map_or("", Flag::as_str),
        )
    }
}

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = format!("{EXPERIMENT_CSV_HEADER}\n");
    for row in rows {
        writeln!(out, "{}", row.to_csv_line()).unwrap();
    }
    out
}

fn run_row(id: &str, g: &Graph, j: usize, config: &ExperimentConfig) -> ExperimentRow {
    let alpha = max_independent_set_with_cap(g, config.decide.brute_force_cap)
        .expect("checked against the cap")
        .size;
    let mut row = ExperimentRow {
        graph_id: id.to_string(),
        n: g.n(),
        j,
        alpha,
        fixed_answer: None,
        switched_vertex_verdict: None,
        switched_convex_verdict: None,
        worst_rate: f64::NAN,
        flag: None,
        error: None,
    };
    let fail = |mut row: ExperimentRow, e: String| {
        row.flag = Some(Flag::NumericFailure);
        row.error = Some(e);
        row
    };

    let inst = build_hurwitz_instance(g, j).expect("j within [2, n]");
    let fixed = match decide_exists_hurwitz(&inst, &config.decide) {
        Ok(d) => d,
        Err(e) => return fail(row, e.to_string()),
    };
    row.fixed_answer = Some(fixed.answer);

    let vertex = match assess_switched_stabilizability(&inst.polytope, &config.assess) {
        Ok(r) => r,
        Err(e) => return fail(row, e.to_string()),
    };
    let witness = match fixed.witness {
        Some(w) => w,
        None => motzkin_straus_certificate(g, CertificateMode::IndependentSet).expect("checked against the cap"),
    };
    let convex_config = AssessConfig {
        policies: vec![SwitchingPolicy::ConstantMix(witness)],
        ..config.assess.clone()
    };
    let convex = match assess_switched_stabilizability(&inst.polytope, &convex_config) {
        Ok(r) => r,
        Err(e) => return fail(row, e.to_string()),
    };
    row.switched_vertex_verdict = Some(vertex.verdict);
    row.switched_convex_verdict = Some(convex.verdict);
    row.worst_rate = vertex.decay_rate_estimate.min(convex.decay_rate_estimate);

    let evidence = vertex.verdict == Verdict::StabilizableEvidence || convex.verdict == Verdict::StabilizableEvidence;
    row.flag = match fixed.answer {
        Answer::Yes if convex.verdict == Verdict::NoEvidence => Some(Flag::SoundnessViolation),
        Answer::No if evidence => Some(Flag::ConjectureCounterexampleCandidate),
        _ => None,
    };
    row
}

/// One row per `(graph, j)` with `2 ≤ j ≤ n`, in input order; other `j`
/// values are skipped because the reduction is undefined for them.
pub fn conjecture_experiment(
    graphs: &[(String, Graph)],
    j_values: &[usize],
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentRow>, ExperimentError> {
    let cap = config.decide.brute_force_cap;
    if let Some((id, g)) = graphs.iter().find(|(_, g)| g.n() > cap) {
        return Err(ExperimentError::OverCap {
            id: id.clone(),
            n: g.n(),
            cap,
        });
    }
    let jobs: Vec<(&str, &Graph, usize)> = graphs
        .iter()
        .flat_map(|(id, g)| {
            j_values
                .iter()
                .filter(|&&j| j >= 2 && j <= g.n())
                .map(move |&j| (id.as_str(), g, j))
        })
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(id, g, j)| run_row(id, g, j, config))
        .collect())
}
