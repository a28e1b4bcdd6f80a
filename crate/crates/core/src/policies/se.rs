use super::{
    argmax_first, expect_pending, NoiseLedger, NoiseRecord, NoiseSite, Observation, Policy, PolicyError, PolicySettings,
};
use crate::mechanisms::{LaplaceScale, NoiseSource};
use crate::rng::Purpose;
use crate::schedules::{
    dpse_bound, dpse_log_term, dpse_schedule_raw, ldpse_bound, ldpse_log_term, ldpse_schedule_raw, MomentParams,
    RawSchedule, MAX_EPOCH_PULLS,
};

pub const DEFAULT_PARTIAL_EXPLORE_FRACTION: f64 = 0.5;

/// Where privacy is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeVariant {
    /// Noise is added once per arm to each epoch mean; elimination width `12 err`.
    Central,
    /// Noise is added to every truncated reward; elimination width `14 err`.
    Local,
}

impl SeVariant {
    fn width_factor(&self) -> f64 {
        match self {
            Self::Central => 12.0,
            Self::Local => 14.0,
        }
    }

    fn schedule(&self, moment: MomentParams, eps: f64, beta: f64, tau: u32, viable: usize) -> RawSchedule {
        match self {
            Self::Central => dpse_schedule_raw(moment, eps, beta, tau, viable),
            Self::Local => ldpse_schedule_raw(moment, eps, beta, tau, viable),
        }
    }

    fn bound_for(&self, moment: MomentParams, eps: f64, beta: f64, tau: u32, viable: usize, pulls: u64) -> f64 {
        match self {
            Self::Central => dpse_bound(moment, eps, dpse_log_term(viable, tau, beta), pulls as f64),
            Self::Local => ldpse_bound(moment, eps, ldpse_log_term(viable, tau, beta), pulls as f64),
        }
    }
}

/// Summary of one epoch, complete or cut short by the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub tau: u32,
    /// Round count before the epoch's first pull.
    pub started_after: u64,
    /// Viable arms during the epoch.
    pub viable: Vec<usize>,
    pub pulls_per_arm: u64,
    pub bound: f64,
    /// Confidence width; `None` for a shortened final epoch.
    pub err: Option<f64>,
    /// Private mean estimate of each viable arm at the end of the epoch.
    pub estimates: Vec<(usize, f64)>,
    pub eliminated: Vec<usize>,
}

impl EpochRecord {
    pub fn is_full(&self) -> bool {
        self.err.is_some()
    }
}

#[derive(Debug, Clone, Copy)]
struct Epoch {
    pulls: u64,
    bound: f64,
    err: Option<f64>,
    round: u64,
    cursor: usize,
    started_after: u64,
}

/// Arms whose estimate trails the best by more than `width`, given `(arm, estimate)` pairs.
///
/// The best arm (lowest index among ties) is never removed.
pub fn eliminate_by_gap(estimates: &[(usize, f64)], width: f64) -> Vec<usize> {
    let Some((_, best)) = argmax_first(estimates.iter().copied()) else {
        return Vec::new();
    };
    estimates
        .iter()
        .filter(|&&(_, m)| best - m > width)
        .map(|&(a, _)| a)
        .collect()
}

/// Epoch-based successive elimination with truncated rewards.
///
/// Every viable arm is pulled `R` times per epoch in index order, then the
/// private epoch means are compared and trailing arms dropped. When the next
/// epoch cannot finish within the horizon the policy instead explores for a
/// fraction of the remaining budget with a shortened epoch and commits to the
/// arm with the best private mean.
#[derive(Debug, Clone)]
pub struct SuccessiveElimination {
    variant: SeVariant,
    moment: MomentParams,
    eps: f64,
    beta: f64,
    horizon: u64,
    explore_fraction: f64,
    viable: Vec<usize>,
    tau: u32,
    epoch: Option<Epoch>,
    sums: Vec<f64>,
    max_abs: Vec<f64>,
    pulls: Vec<u64>,
    used: u64,
    committed: Option<usize>,
    pending: Option<usize>,
    noise: Vec<NoiseSource>,
    ledger: Option<NoiseLedger>,
    log: Vec<EpochRecord>,
}

impl SuccessiveElimination {
    pub fn new(variant: SeVariant, arms: usize, settings: &PolicySettings) -> Result<Self, PolicyError> {
        settings.validate(arms)?;
        let purpose = match variant {
            SeVariant::Central => Purpose::EliminationNoise,
            SeVariant::Local => Purpose::LocalNoise,
        };
        Ok(Self {
            variant,
            moment: settings.moment,
            eps: settings.eps,
            beta: settings.beta,
            horizon: settings.horizon,
            explore_fraction: settings.partial_explore_fraction,
            viable: (0..arms).collect(),
            tau: 0,
            epoch: None,
            sums: vec![0.0; arms],
            max_abs: vec![0.0; arms],
            pulls: vec![0; arms],
            used: 0,
            committed: None,
            pending: None,
            noise: (0..arms).map(|a| settings.noise_source(a, purpose)).collect(),
            ledger: settings.ledger(),
            log: Vec::new(),
        })
    }

    pub fn central(arms: usize, settings: &PolicySettings) -> Result<Self, PolicyError> {
        Self::new(SeVariant::Central, arms, settings)
    }

    pub fn local(arms: usize, settings: &PolicySettings) -> Result<Self, PolicyError> {
        Self::new(SeVariant::Local, arms, settings)
    }

    pub fn variant(&self) -> SeVariant {
        self.variant
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    /// Current epoch index (0 before the first pull).
    pub fn epoch_index(&self) -> u32 {
        self.tau
    }

    fn start_epoch(&mut self) {
        self.tau += 1;
        let k = self.viable.len();
        let remaining = self.horizon.saturating_sub(self.used);
        let raw = self.variant.schedule(self.moment, self.eps, self.beta, self.tau, k);
        let fits =
            raw.pulls.is_finite() && raw.pulls <= MAX_EPOCH_PULLS as f64 && raw.pulls * k as f64 <= remaining as f64;
        if fits {
            self.epoch = Some(Epoch {
                pulls: raw.pulls as u64,
                bound: raw.bound,
                err: Some(raw.err),
                round: 0,
                cursor: 0,
                started_after: self.used,
            });
            return;
        }
        let pulls = ((remaining as f64 * self.explore_fraction) / k as f64).floor() as u64;
        if pulls == 0 {
            let arm = self.best_known_arm();
            self.committed = Some(arm);
            return;
        }
        let bound = self
            .variant
            .bound_for(self.moment, self.eps, self.beta, self.tau, k, pulls);
        self.epoch = Some(Epoch {
            pulls,
            bound,
            err: None,
            round: 0,
            cursor: 0,
            started_after: self.used,
        });
    }

    fn best_known_arm(&self) -> usize {
        self.log
            .last()
            .and_then(|rec| {
                argmax_first(rec.estimates.iter().copied().filter(|(a, _)| self.viable.contains(a))).map(|(a, _)| a)
            })
            .unwrap_or(self.viable[0])
    }

    fn finish_epoch(&mut self, epoch: Epoch) {
        let r = epoch.pulls as f64;
        let estimates: Vec<(usize, f64)> = match self.variant {
            SeVariant::Central => {
                let scale = LaplaceScale::new(2.0 * epoch.bound / (r * self.eps))
                    .expect("epoch bound and pull count are positive");
                let mut out = Vec::with_capacity(self.viable.len());
                for &a in &self.viable {
                    let noisy = self.sums[a] / r + self.noise[a].draw(scale);
                    if let Some(ledger) = self.ledger.as_mut() {
                        ledger.push(NoiseRecord {
                            site: NoiseSite::CentralEpoch {
                                arm: a,
                                epoch: self.tau,
                                pulls: epoch.pulls,
                            },
                            source_arm: a,
                            bound: epoch.bound,
                            input_abs: self.max_abs[a],
                            scale: scale.get(),
                        });
                    }
                    out.push((a, noisy));
                }
                out
            }
            // rewards were perturbed on arrival; no further noise here
            SeVariant::Local => self.viable.iter().map(|&a| (a, self.sums[a] / r)).collect(),
        };

        let eliminated = match epoch.err {
            Some(err) => eliminate_by_gap(&estimates, self.variant.width_factor() * err),
            None => Vec::new(),
        };
        let record = EpochRecord {
            tau: self.tau,
            started_after: epoch.started_after,
            viable: self.viable.clone(),
            pulls_per_arm: epoch.pulls,
            bound: epoch.bound,
            err: epoch.err,
            estimates: estimates.clone(),
            eliminated: eliminated.clone(),
        };
        self.log.push(record);
        self.viable.retain(|a| !eliminated.contains(a));
        for &a in &self.viable {
            self.sums[a] = 0.0;
            self.max_abs[a] = 0.0;
        }
        self.epoch = None;

        if epoch.err.is_none() {
            let arm = argmax_first(estimates).map(|(a, _)| a).unwrap_or(self.viable[0]);
            self.committed = Some(arm);
        } else if self.viable.len() == 1 {
            self.committed = Some(self.viable[0]);
        }
    }
}

impl Policy for SuccessiveElimination {
    fn name(&self) -> &'static str {
        match self.variant {
            SeVariant::Central => "dprse",
            SeVariant::Local => "ldprse",
        }
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn select_arm(&mut self, _t: u64) -> usize {
        if self.committed.is_none() && self.epoch.is_none() {
            self.start_epoch();
        }
        let arm = match (self.committed, &self.epoch) {
            (Some(a), _) => a,
            (None, Some(e)) => self.viable[e.cursor],
            (None, None) => unreachable!("start_epoch either opens an epoch or commits"),
        };
        self.pending = Some(arm);
        arm
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<Observation, PolicyError> {
        expect_pending(&mut self.pending, arm)?;
        self.used += 1;
        self.pulls[arm] += 1;
        let Some(mut epoch) = self.epoch.filter(|_| self.committed.is_none()) else {
            return Ok(Observation { truncated: None });
        };

        let truncated = if reward.abs() <= epoch.bound { reward } else { 0.0 };
        match self.variant {
            SeVariant::Central => {
                self.sums[arm] += truncated;
                self.max_abs[arm] = self.max_abs[arm].max(truncated.abs());
            }
            SeVariant::Local => {
                let scale = LaplaceScale::new(2.0 * epoch.bound / self.eps)?;
                let perturbed = truncated + self.noise[arm].draw(scale);
                if let Some(ledger) = self.ledger.as_mut() {
                    ledger.push(NoiseRecord {
                        site: NoiseSite::LocalReward { arm, epoch: self.tau },
                        source_arm: arm,
                        bound: epoch.bound,
                        input_abs: truncated.abs(),
                        scale: scale.get(),
                    });
                }
                self.sums[arm] += perturbed;
            }
        }

        epoch.cursor += 1;
        if epoch.cursor == self.viable.len() {
            epoch.cursor = 0;
            epoch.round += 1;
        }
        if epoch.round == epoch.pulls {
            self.finish_epoch(epoch);
        } else {
            self.epoch = Some(epoch);
        }
        Ok(Observation {
            truncated: Some(truncated),
        })
    }

    fn committed_arm(&self) -> Option<usize> {
        self.committed
    }

    fn viable_arms(&self) -> Vec<usize> {
        self.viable.clone()
    }

    fn noise_draws(&self) -> u64 {
        self.noise.iter().map(NoiseSource::draws).sum()
    }

    fn noise_ledger(&self) -> Option<&NoiseLedger> {
        self.ledger.as_ref()
    }

    fn epoch_log(&self) -> &[EpochRecord] {
        &self.log
    }
}
