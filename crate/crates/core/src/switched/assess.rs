use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{norm, run_summary, SimError, SwitchingPolicy, Termination};
use crate::reductions::MatrixPolytope;

/// A run counts as decaying only if its rate estimate is below `−DECAY_MARGIN`.
pub const DECAY_MARGIN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    StabilizableEvidence,
    NoEvidence,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::StabilizableEvidence => "STABILIZABLE_EVIDENCE",
            Self::NoEvidence => "NO_EVIDENCE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssessConfig {
    /// Explicit initial conditions; when `None`, the canonical basis plus
    /// `random_initial_conditions` seeded unit vectors.
    pub initial_conditions: Option<Vec<Vec<f64>>>,
    pub random_initial_conditions: usize,
    pub seed: u64,
    pub horizon: f64,
    pub step: f64,
    /// Candidate policies, tried in order.
    pub policies: Vec<SwitchingPolicy>,
}

impl Default for AssessConfig {
    fn default() -> Self {
        Self {
            initial_conditions: None,
            random_initial_conditions: 20,
            seed: 0,
            horizon: 50.0,
            step: 1e-3,
            policies: vec![SwitchingPolicy::MinProjection { sample_period: 1e-2 }],
        }
    }
}

impl AssessConfig {
    fn initial_conditions(&self, n: usize) -> Vec<Vec<f64>> {
        if let Some(ics) = &self.initial_conditions {
            return ics.clone();
        }
        let mut ics: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        while ics.len() < n + self.random_initial_conditions {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let size = norm(&v);
            if size > 1e-8 {
                ics.push(v.into_iter().map(|x| x / size).collect());
            }
        }
        ics
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizabilityReport {
    /// Per initial condition, under `policy_used`.
    pub decayed: Vec<bool>,
    /// Per initial condition, under `policy_used`.
    pub rates: Vec<f64>,
    /// Largest (slowest) rate over the initial conditions.
    pub decay_rate_estimate: f64,
    pub policy_used: SwitchingPolicy,
    pub verdict: Verdict,
}

fn rate(summary: &super::RunSummary, x0_norm: f64) -> f64 {
    super::rate_estimate(
        summary.final_time,
        summary.final_norm,
        summary.midpoint,
        summary.termination,
        x0_norm,
    )
}

/// Simulates `p` from every initial condition under each configured policy
/// in turn. `StabilizableEvidence` iff, for some policy, every run
/// completes, ends below its starting norm and has rate `< −DECAY_MARGIN`.
/// The report describes the first such policy, or the last one tried.
pub fn assess_switched_stabilizability(
    p: &MatrixPolytope,
    config: &AssessConfig,
) -> Result<StabilizabilityReport, SimError> {
    let policies = if config.policies.is_empty() {
        AssessConfig::default().policies
    } else {
        config.policies.clone()
    };
    let ics = config.initial_conditions(p.n());
    let mut report = None;
    for policy in policies {
        let outcomes: Vec<(bool, f64)> = ics
            .par_iter()
            .map(|x0| {
                let s = run_summary(p, &policy, x0, config.horizon, config.step)?;
                let start = norm(x0);
                let r = rate(&s, start);
                let decayed = s.termination == Termination::Completed && s.final_norm < start && r < -DECAY_MARGIN;
                Ok((decayed, r))
            })
            .collect::<Result<_, SimError>>()?;
        let decayed: Vec<bool> = outcomes.iter().map(|o| o.0).collect();
        let rates: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
        let verdict = if decayed.iter().all(|&d| d) {
            Verdict::StabilizableEvidence
        } else {
            Verdict::NoEvidence
        };
        let r = StabilizabilityReport {
            decay_rate_estimate: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            decayed,
            rates,
            policy_used: policy,
            verdict,
        };
        let done = verdict == Verdict::StabilizableEvidence;
        report = Some(r);
        if done {
            break;
        }
    }
    Ok(report.expect("at least one policy"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn quick() -> AssessConfig {
        AssessConfig {
            horizon: 10.0,
            step: 1e-2,
            random_initial_conditions: 5,
            ..AssessConfig::default()
        }
    }

    #[test]
    fn stable_and_unstable_singletons() {
        let p = MatrixPolytope::new(vec![Matrix::identity(2).scale(-1.0)]).unwrap();
        let r = assess_switched_stabilizability(&p, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::StabilizableEvidence);
        assert!((r.decay_rate_estimate + 1.0).abs() < 1e-6);
        assert_eq!(r.decayed.len(), 2 + 5);

        let p = MatrixPolytope::new(vec![Matrix::identity(2)]).unwrap();
        let r = assess_switched_stabilizability(&p, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::NoEvidence);
        assert!(r.decayed.iter().all(|d| !d));
    }

    #[test]
    fn marginal_mode_is_not_evidence() {
        // one neutral direction: total decay is visible, the late rate is zero
        let m = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let p = MatrixPolytope::new(vec![m]).unwrap();
        let r = assess_switched_stabilizability(&p, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::NoEvidence);
    }

    #[test]
    fn falls_through_to_a_later_policy() {
        let p = MatrixPolytope::new(vec![Matrix::identity(1), Matrix::identity(1).scale(-1.0)]).unwrap();
        let mut cfg = quick();
        cfg.policies = vec![SwitchingPolicy::Constant(0), SwitchingPolicy::Constant(1)];
        let r = assess_switched_stabilizability(&p, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::StabilizableEvidence);
        assert_eq!(r.policy_used, SwitchingPolicy::Constant(1));
    }

    #[test]
    fn seeded_initial_conditions() {
        let cfg = quick();
        let a = cfg.initial_conditions(4);
        assert_eq!(a, cfg.initial_conditions(4));
        assert_eq!(a.len(), 9);
        for v in &a {
            assert!((norm(v) - 1.0).abs() < 1e-12);
        }
    }
}
