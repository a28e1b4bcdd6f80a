use super::{
    argmax_first, expect_pending, NoiseLedger, NoiseRecord, NoiseSite, Observation, Policy, PolicyError, PolicySettings,
};
use crate::mechanisms::AdaptiveTree;
use crate::rng::Purpose;
use crate::schedules::{ucb_radius, ucb_trunc_threshold, MomentParams};

/// Private robust UCB: one adaptive tree per arm holds the truncated reward sum.
///
/// After `n` pulls an arm's rewards are truncated at
/// [`ucb_trunc_threshold`]`(n)`, which is non-decreasing in `n` and therefore a
/// valid bound sequence for the tree. Each tree has `T` leaves.
#[derive(Debug, Clone)]
pub struct DpRobustUcb {
    moment: MomentParams,
    eps: f64,
    horizon: u64,
    trees: Vec<AdaptiveTree>,
    pulls: Vec<u64>,
    pending: Option<usize>,
    ledger: Option<NoiseLedger>,
}

impl DpRobustUcb {
    pub fn new(arms: usize, settings: &PolicySettings) -> Result<Self, PolicyError> {
        settings.validate(arms)?;
        let trees = (0..arms)
            .map(|a| {
                AdaptiveTree::new(
                    settings.horizon,
                    settings.eps,
                    settings.noise_source(a, Purpose::TreeNoise),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            moment: settings.moment,
            eps: settings.eps,
            horizon: settings.horizon,
            trees,
            pulls: vec![0; arms],
            pending: None,
            ledger: settings.ledger(),
        })
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn trees(&self) -> &[AdaptiveTree] {
        &self.trees
    }

    /// Private mean estimate `S_a(t) / n_a`.
    pub fn estimate(&self, arm: usize) -> f64 {
        self.trees[arm].estimate() / self.pulls[arm] as f64
    }

    /// UCB index of `arm` at round `t`.
    pub fn index(&self, arm: usize, t: u64) -> f64 {
        let n = self.pulls[arm] as f64;
        self.estimate(arm) + ucb_radius(self.moment, self.eps, n, t as f64, self.horizon as f64)
    }
}

impl Policy for DpRobustUcb {
    fn name(&self) -> &'static str {
        "dprucb"
    }

    fn num_arms(&self) -> usize {
        self.trees.len()
    }

    fn select_arm(&mut self, t: u64) -> usize {
        // Rounds 1..=K pull each arm once; an unpulled arm always goes first.
        let arm = match self.pulls.iter().position(|&n| n == 0) {
            Some(a) => a,
            None => argmax_first((0..self.trees.len()).map(|a| (a, self.index(a, t))))
                .map(|(a, _)| a)
                .unwrap_or(0),
        };
        self.pending = Some(arm);
        arm
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<Observation, PolicyError> {
        expect_pending(&mut self.pending, arm)?;
        self.pulls[arm] += 1;
        let bound = ucb_trunc_threshold(self.moment, self.eps, self.pulls[arm] as f64, self.horizon as f64);
        let truncated = if reward.abs() <= bound { reward } else { 0.0 };
        let tree = &mut self.trees[arm];
        tree.insert(truncated, bound)?;
        if let (Some(ledger), Some(draw)) = (self.ledger.as_mut(), tree.last_draw()) {
            ledger.push(NoiseRecord {
                site: NoiseSite::Tree { arm, step: draw.step },
                source_arm: arm,
                bound: draw.bound,
                input_abs: draw.input_abs,
                scale: draw.scale,
            });
        }
        Ok(Observation {
            truncated: Some(truncated),
        })
    }

    fn noise_draws(&self) -> u64 {
        self.trees.iter().map(AdaptiveTree::noise_draws).sum()
    }

    fn noise_ledger(&self) -> Option<&NoiseLedger> {
        self.ledger.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::NoiseMode;

    fn settings(horizon: u64) -> PolicySettings {
        PolicySettings {
            noise: NoiseMode::Zero,
            record_noise: true,
            ..PolicySettings::new(MomentParams::new(1.0, 1.0).unwrap(), 1.0, horizon)
        }
    }

    #[test]
    fn initial_rounds_are_round_robin() {
        let mut p = DpRobustUcb::new(3, &settings(100)).unwrap();
        for t in 1..=3 {
            let a = p.select_arm(t);
            assert_eq!(a, (t - 1) as usize);
            p.observe(a, 0.5).unwrap();
        }
    }

    #[test]
    fn higher_mean_wins_with_equal_counts() {
        let s = PolicySettings {
            moment: MomentParams::new(1000.0, 1.0).unwrap(),
            ..settings(1000)
        };
        let mut p = DpRobustUcb::new(2, &s).unwrap();
        // equal pull counts, rewards 5 and 1 stay below every threshold
        for t in 1..=20u64 {
            let arm = ((t - 1) % 2) as usize;
            p.pending = Some(arm);
            let r = if arm == 0 { 5.0 } else { 1.0 };
            p.observe(arm, r).unwrap();
        }
        assert_eq!(p.pulls(), &[10, 10]);
        assert!(ucb_trunc_threshold(p.moment, 1.0, 1.0, 1000.0) > 5.0);
        assert_eq!(p.select_arm(21), 0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let mut p = DpRobustUcb::new(3, &settings(1000)).unwrap();
        for t in 1..=3 {
            let a = p.select_arm(t);
            p.observe(a, 0.0).unwrap();
        }
        assert_eq!(p.select_arm(4), 0);
    }

    #[test]
    fn truncation_zeroes_large_rewards() {
        let mut p = DpRobustUcb::new(1, &settings(1000)).unwrap();
        let bound = ucb_trunc_threshold(p.moment, 1.0, 1.0, 1000.0);
        p.select_arm(1);
        assert_eq!(p.observe(0, bound * 3.0).unwrap().truncated, Some(0.0));
        let bound2 = ucb_trunc_threshold(p.moment, 1.0, 2.0, 1000.0);
        p.select_arm(2);
        assert_eq!(p.observe(0, bound2 * 0.5).unwrap().truncated, Some(bound2 * 0.5));
        assert_eq!(p.trees()[0].len(), 2);
    }

    #[test]
    fn pull_counter_semantics() {
        let mut p = DpRobustUcb::new(2, &settings(1000)).unwrap();
        for t in 1..=2 {
            let a = p.select_arm(t);
            p.observe(a, 0.1).unwrap();
        }
        for _ in 0..7 {
            p.pending = Some(1);
            p.observe(1, 0.1).unwrap();
        }
        assert_eq!(p.pulls()[1], 1 + 7);
    }

    #[test]
    fn observe_requires_selected_arm() {
        let mut p = DpRobustUcb::new(2, &settings(100)).unwrap();
        assert!(matches!(
            p.observe(0, 1.0),
            Err(PolicyError::UnexpectedArm { expected: None, got: 0 })
        ));
        p.select_arm(1);
        assert!(p.observe(1, 1.0).is_err());
    }
}
