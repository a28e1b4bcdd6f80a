//! Noise-draw ledger and the structural privacy audit.
//!
//! Privacy cannot be measured from a single run, but the conditions the
//! guarantees rest on can: every draw used the scale its site requires, every
//! value entering a mechanism respected the declared bound, and every
//! mechanism only ever saw data from its own arm.

use std::fmt;

use thiserror::Error;

/// Where a Laplace draw happened. `arm` is the arm owning the mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseSite {
    /// A p-sum finalised in an arm's tree.
    Tree { arm: usize, step: u64 },
    /// The noisy epoch mean of the central elimination policy.
    CentralEpoch { arm: usize, epoch: u32, pulls: u64 },
    /// A single perturbed reward of the local elimination policy.
    LocalReward { arm: usize, epoch: u32 },
}

impl NoiseSite {
    pub fn arm(&self) -> usize {
        match *self {
            Self::Tree { arm, .. } | Self::CentralEpoch { arm, .. } | Self::LocalReward { arm, .. } => arm,
        }
    }
}

impl fmt::Display for NoiseSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tree { arm, step } => write!(f, "tree[arm={arm}, step={step}]"),
            Self::CentralEpoch { arm, epoch, pulls } => {
                write!(f, "central-epoch[arm={arm}, epoch={epoch}, pulls={pulls}]")
            }
            Self::LocalReward { arm, epoch } => write!(f, "local-reward[arm={arm}, epoch={epoch}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRecord {
    pub site: NoiseSite,
    /// Arm whose rewards produced the value being noised.
    pub source_arm: usize,
    /// Declared magnitude bound of each value entering the mechanism.
    pub bound: f64,
    /// Largest absolute value that entered the mechanism for this draw.
    pub input_abs: f64,
    pub scale: f64,
}

/// Every draw of a run, with the run-wide privacy parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseLedger {
    pub eps: f64,
    pub horizon: u64,
    pub records: Vec<NoiseRecord>,
}

impl NoiseLedger {
    pub fn new(eps: f64, horizon: u64) -> Self {
        Self {
            eps,
            horizon,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: NoiseRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Scale the site's mechanism must use for a value bounded by `bound`.
    pub fn required_scale(&self, site: &NoiseSite, bound: f64) -> f64 {
        match site {
            NoiseSite::Tree { .. } => 2.0 * bound / (self.eps / (self.horizon as f64).ln()),
            NoiseSite::CentralEpoch { pulls, .. } => 2.0 * bound / (*pulls as f64 * self.eps),
            NoiseSite::LocalReward { .. } => 2.0 * bound / self.eps,
        }
    }
}

/// Relative tolerance when comparing a recorded scale with the required one.
pub const SCALE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum AuditViolation {
    ScaleMismatch { required: f64, found: f64 },
    BoundExceeded { input_abs: f64, bound: f64 },
    CrossArm { source_arm: usize },
    LedgerMissing,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("privacy audit failed at draw {index} ({site}): {violation:?}")]
pub struct AuditFailure {
    pub index: usize,
    pub site: String,
    pub violation: AuditViolation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub tree_draws: u64,
    pub central_epoch_draws: u64,
    pub local_reward_draws: u64,
}

impl AuditReport {
    pub fn total(&self) -> u64 {
        self.tree_draws + self.central_epoch_draws + self.local_reward_draws
    }
}

/// Checks every record of the ledger; the first offending draw is reported.
pub fn audit_ledger(ledger: &NoiseLedger) -> Result<AuditReport, AuditFailure> {
    let mut report = AuditReport::default();
    for (index, rec) in ledger.records.iter().enumerate() {
        let fail = |violation| AuditFailure {
            index,
            site: rec.site.to_string(),
            violation,
        };
        if rec.source_arm != rec.site.arm() {
            return Err(fail(AuditViolation::CrossArm {
                source_arm: rec.source_arm,
            }));
        }
        if !(rec.input_abs <= rec.bound) {
            return Err(fail(AuditViolation::BoundExceeded {
                input_abs: rec.input_abs,
                bound: rec.bound,
            }));
        }
        let required = ledger.required_scale(&rec.site, rec.bound);
        if !((rec.scale - required).abs() <= SCALE_TOLERANCE * required) {
            return Err(fail(AuditViolation::ScaleMismatch {
                required,
                found: rec.scale,
            }));
        }
        match rec.site {
            NoiseSite::Tree { .. } => report.tree_draws += 1,
            NoiseSite::CentralEpoch { .. } => report.central_epoch_draws += 1,
            NoiseSite::LocalReward { .. } => report.local_reward_draws += 1,
        }
    }
    Ok(report)
}

/// Audits a policy run. The policy must have been built with ledger recording on.
pub fn privacy_audit(policy: &dyn super::Policy) -> Result<AuditReport, AuditFailure> {
    let ledger = policy.noise_ledger().ok_or(AuditFailure {
        index: 0,
        site: policy.name().to_string(),
        violation: AuditViolation::LedgerMissing,
    })?;
    let report = audit_ledger(ledger)?;
    if report.total() != policy.noise_draws() {
        // A draw that bypassed the ledger cannot be checked.
        return Err(AuditFailure {
            index: ledger.len(),
            site: policy.name().to_string(),
            violation: AuditViolation::LedgerMissing,
        });
    }
    Ok(report)
}
