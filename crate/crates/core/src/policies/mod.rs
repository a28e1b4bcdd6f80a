//! Bandit policies behind a common select/observe contract.
//!
//! Arms are 0-indexed. Rounds are 1-indexed. The caller alternates
//! [`Policy::select_arm`] and [`Policy::observe`], passing back the arm that
//! was selected together with its raw reward. Truncation and privatisation
//! happen inside the policy.

pub mod audit;
mod dprucb;
mod rucb;
mod se;

use thiserror::Error;

use crate::mechanisms::{MechanismError, NoiseMode, NoiseSource};
use crate::rng::{Purpose, StreamKey};
use crate::schedules::{MomentParams, ScheduleError};

pub use audit::{
    audit_ledger, privacy_audit, AuditFailure, AuditReport, AuditViolation, NoiseLedger, NoiseRecord, NoiseSite,
};
pub use dprucb::DpRobustUcb;
pub use rucb::RobustUcb;
pub use se::{eliminate_by_gap, EpochRecord, SeVariant, SuccessiveElimination, DEFAULT_PARTIAL_EXPLORE_FRACTION};

/// Version of the [`TranscriptEntry`] layout.
pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("observed arm {got}, but arm {expected:?} was selected")]
    UnexpectedArm { expected: Option<usize>, got: usize },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("invalid policy configuration: {0}")]
    Config(String),
}

/// Parameters shared by every policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySettings {
    pub moment: MomentParams,
    pub eps: f64,
    pub horizon: u64,
    /// Confidence level of the elimination policies.
    pub beta: f64,
    pub noise: NoiseMode,
    pub base_seed: u64,
    pub rep: u64,
    /// Keep a per-draw ledger for [`audit::privacy_audit`].
    pub record_noise: bool,
    /// Share of the remaining budget an elimination policy spends exploring
    /// when its next epoch cannot finish before the horizon.
    pub partial_explore_fraction: f64,
}

impl PolicySettings {
    /// Settings with `beta = 1/T` and Laplace noise.
    pub fn new(moment: MomentParams, eps: f64, horizon: u64) -> Self {
        Self {
            moment,
            eps,
            horizon,
            beta: 1.0 / horizon as f64,
            noise: NoiseMode::Laplace,
            base_seed: 0,
            rep: 0,
            record_noise: false,
            partial_explore_fraction: DEFAULT_PARTIAL_EXPLORE_FRACTION,
        }
    }

    pub fn validate(&self, arms: usize) -> Result<(), PolicyError> {
        let bad = |m: String| Err(PolicyError::Config(m));
        if arms == 0 {
            return bad("no arms".into());
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.horizon < 2 {
            return bad(format!("horizon must be at least 2, got {}", self.horizon));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.partial_explore_fraction > 0.0 && self.partial_explore_fraction <= 1.0) {
            return bad(format!(
                "partial explore fraction must lie in (0, 1], got {}",
                self.partial_explore_fraction
            ));
        }
        Ok(())
    }

    pub(crate) fn noise_source(&self, arm: usize, purpose: Purpose) -> NoiseSource {
        NoiseSource::new(StreamKey::new(self.base_seed, self.rep, arm, purpose).rng(), self.noise)
    }

    pub(crate) fn ledger(&self) -> Option<NoiseLedger> {
        self.record_noise.then(|| NoiseLedger::new(self.eps, self.horizon))
    }
}

/// What the policy did with an observed reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// The truncated reward fed to the estimator, or `None` once the policy
    /// has committed and no longer uses rewards.
    pub truncated: Option<f64>,
}

/// One row of a run transcript.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranscriptEntry {
    pub round: u64,
    pub arm: usize,
    pub raw: f64,
    pub truncated: Option<f64>,
    pub committed: bool,
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn num_arms(&self) -> usize;

    /// Chooses the arm for round `t` (1-based).
    fn select_arm(&mut self, t: u64) -> usize;

    /// Feeds back the raw reward of the arm returned by the last `select_arm`.
    fn observe(&mut self, arm: usize, reward: f64) -> Result<Observation, PolicyError>;

    /// The arm the policy has locked in, if any. Never changes once set.
    fn committed_arm(&self) -> Option<usize> {
        None
    }

    fn viable_arms(&self) -> Vec<usize> {
        (0..self.num_arms()).collect()
    }

    /// Total number of Laplace draws so far.
    fn noise_draws(&self) -> u64;

    fn noise_ledger(&self) -> Option<&NoiseLedger>;

    /// Completed epochs, for elimination policies.
    fn epoch_log(&self) -> &[EpochRecord] {
        &[]
    }
}

/// Index of the largest value; ties go to the earliest entry.
pub(crate) fn argmax_first<I>(items: I) -> Option<(usize, f64)>
where
    I: IntoIterator<Item = (usize, f64)>,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in items {
        match best {
            Some((_, b)) if !(x > b) => {}
            _ => best = Some((i, x)),
        }
    }
    best
}

fn expect_pending(pending: &mut Option<usize>, arm: usize) -> Result<(), PolicyError> {
    match pending.take() {
        Some(p) if p == arm => Ok(()),
        other => Err(PolicyError::UnexpectedArm {
            expected: other,
            got: arm,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax_first([(0, 1.0), (1, 2.0), (2, 2.0)]), Some((1, 2.0)));
        assert_eq!(argmax_first([(3, 5.0), (4, 5.0)]), Some((3, 5.0)));
        assert_eq!(argmax_first(std::iter::empty()), None);
    }

    #[test]
    fn settings_validation() {
        let m = MomentParams::new(1.0, 1.0).unwrap();
        assert!(PolicySettings::new(m, 1.0, 100).validate(2).is_ok());
        assert!(PolicySettings::new(m, 0.0, 100).validate(2).is_err());
        assert!(PolicySettings::new(m, 1.0, 1).validate(2).is_err());
        assert!(PolicySettings::new(m, 1.0, 100).validate(0).is_err());
        let s = PolicySettings {
            partial_explore_fraction: 0.0,
            ..PolicySettings::new(m, 1.0, 100)
        };
        assert!(s.validate(2).is_err());
    }
}
