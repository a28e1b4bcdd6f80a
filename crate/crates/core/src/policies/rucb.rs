use super::{argmax_first, expect_pending, NoiseLedger, Observation, Policy, PolicyError, PolicySettings};
use crate::schedules::{nonprivate_ucb_radius, nonprivate_ucb_threshold, MomentParams};

/// Non-private truncated-mean robust UCB, used as a comparison baseline.
///
/// Each reward is truncated once, when it arrives, at
/// `(u n / ln t^2)^(1/(1+v))` with the arm's new pull count `n` and the
/// current round `t`. The index adds `4 u^(1/(1+v)) (ln t^2 / n)^(v/(1+v))`.
#[derive(Debug, Clone)]
pub struct RobustUcb {
    moment: MomentParams,
    sums: Vec<f64>,
    pulls: Vec<u64>,
    round: u64,
    pending: Option<usize>,
}

impl RobustUcb {
    pub fn new(arms: usize, settings: &PolicySettings) -> Result<Self, PolicyError> {
        settings.validate(arms)?;
        Ok(Self {
            moment: settings.moment,
            sums: vec![0.0; arms],
            pulls: vec![0; arms],
            round: 0,
            pending: None,
        })
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }
}

impl Policy for RobustUcb {
    fn name(&self) -> &'static str {
        "rucb"
    }

    fn num_arms(&self) -> usize {
        self.sums.len()
    }

    fn select_arm(&mut self, t: u64) -> usize {
        self.round = t;
        let arm = match self.pulls.iter().position(|&n| n == 0) {
            Some(a) => a,
            None => {
                let tf = t.max(2) as f64;
                argmax_first((0..self.sums.len()).map(|a| {
                    let n = self.pulls[a] as f64;
                    (a, self.sums[a] / n + nonprivate_ucb_radius(self.moment, n, tf))
                }))
                .map(|(a, _)| a)
                .unwrap_or(0)
            }
        };
        self.pending = Some(arm);
        arm
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<Observation, PolicyError> {
        expect_pending(&mut self.pending, arm)?;
        self.pulls[arm] += 1;
        let bound = nonprivate_ucb_threshold(self.moment, self.pulls[arm] as f64, self.round.max(2) as f64);
        let truncated = if reward.abs() <= bound { reward } else { 0.0 };
        self.sums[arm] += truncated;
        Ok(Observation {
            truncated: Some(truncated),
        })
    }

    fn noise_draws(&self) -> u64 {
        0
    }

    fn noise_ledger(&self) -> Option<&NoiseLedger> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_better_arm() {
        let s = PolicySettings::new(MomentParams::new(1.0, 1.0).unwrap(), 1.0, 10_000);
        let mut p = RobustUcb::new(2, &s).unwrap();
        for t in 1..=5000 {
            let a = p.select_arm(t);
            p.observe(a, if a == 0 { 0.9 } else { 0.1 }).unwrap();
        }
        assert!(p.pulls()[0] > 4 * p.pulls()[1]);
    }
}
