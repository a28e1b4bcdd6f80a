use privbandit::distributions::{BanditInstance, FiniteSupportModel, RewardModel};
use privbandit::mechanisms::NoiseMode;
use privbandit::policies::{privacy_audit, DpRobustUcb, Policy, PolicySettings, SeVariant, SuccessiveElimination};
use privbandit::rng::{stream, Purpose};
use privbandit::schedules::{dpse_schedule, ldpse_schedule, MomentParams};
use proptest::prelude::*;

fn point_instance(means: &[f64], v: f64) -> BanditInstance {
    let arms = means
        .iter()
        .map(|&m| RewardModel::from(FiniteSupportModel::point_mass(m).unwrap()))
        .collect();
    BanditInstance::new("points", arms, v).unwrap()
}

fn two_point_instance(means: &[f64], v: f64) -> BanditInstance {
    // rewards in {0, 1} with the given means
    let arms = means
        .iter()
        .map(|&m| RewardModel::from(FiniteSupportModel::new([(0.0, 1.0 - m), (1.0, m)]).unwrap()))
        .collect();
    BanditInstance::new("bernoulli", arms, v).unwrap()
}

fn settings(inst: &BanditInstance, eps: f64, horizon: u64, seed: u64) -> PolicySettings {
    PolicySettings {
        base_seed: seed,
        record_noise: true,
        ..PolicySettings::new(MomentParams::new(inst.u(), inst.v()).unwrap(), eps, horizon)
    }
}

/// Drives a policy for `horizon` rounds and returns the arm sequence.
fn drive(policy: &mut dyn Policy, inst: &BanditInstance, horizon: u64, seed: u64) -> Vec<usize> {
    let mut rngs: Vec<_> = (0..inst.num_arms())
        .map(|a| stream(seed, 0, a, Purpose::Reward))
        .collect();
    let mut committed = None;
    (1..=horizon)
        .map(|t| {
            let a = policy.select_arm(t);
            let x = inst.arms()[a].sample(&mut rngs[a]);
            policy.observe(a, x).unwrap();
            if let Some(c) = committed {
                assert_eq!(policy.committed_arm(), Some(c), "commitment changed at round {t}");
                assert_eq!(a, c);
            }
            committed = policy.committed_arm();
            assert!(!policy.viable_arms().is_empty());
            a
        })
        .collect()
}

#[test]
fn central_epoch_accounting() {
    let inst = two_point_instance(&[0.9, 0.8, 0.5, 0.1], 1.0);
    let s = settings(&inst, 20.0, 1_000_000, 7);
    let mut p = SuccessiveElimination::central(inst.num_arms(), &s).unwrap();
    let arms = drive(&mut p, &inst, s.horizon, 7);
    let log = p.epoch_log().to_vec();
    assert!(log.iter().filter(|e| e.is_full()).count() >= 2, "{log:?}");

    let mut cumulative = 0u64;
    for e in log.iter().filter(|e| e.is_full()) {
        let sched = dpse_schedule(s.moment, s.eps, s.beta, e.tau, e.viable.len()).unwrap();
        assert_eq!(e.pulls_per_arm, sched.pulls);
        cumulative += e.pulls_per_arm;
        for &gone in &e.eliminated {
            let n = arms.iter().filter(|&&a| a == gone).count() as u64;
            assert_eq!(n, cumulative, "arm {gone} eliminated in epoch {}", e.tau);
        }
    }
    assert!(!log.iter().flat_map(|e| &e.eliminated).any(|&a| a == 0));
    assert_eq!(privacy_audit(&p).unwrap().total(), p.noise_draws());
}

#[test]
fn local_draws_match_epoch_log() {
    let inst = two_point_instance(&[0.9, 0.2], 1.0);
    let s = settings(&inst, 200.0, 300_000, 8);
    let mut p = SuccessiveElimination::local(2, &s).unwrap();
    let arms = drive(&mut p, &inst, s.horizon, 8);
    let log = p.epoch_log();
    assert!(log.iter().any(|e| e.is_full()));
    let expected: u64 = log.iter().map(|e| e.viable.len() as u64 * e.pulls_per_arm).sum();
    // every epoch, shortened or not, finishes before the horizon
    assert_eq!(p.noise_draws(), expected);
    assert_eq!(arms.len() as u64, s.horizon);
    for e in log.iter().filter(|e| e.is_full()) {
        let sched = ldpse_schedule(s.moment, s.eps, s.beta, e.tau, e.viable.len()).unwrap();
        assert_eq!(e.pulls_per_arm, sched.pulls);
    }
    let report = privacy_audit(&p).unwrap();
    assert_eq!(report.local_reward_draws, p.noise_draws());
    assert_eq!(report.central_epoch_draws, 0);
}

#[test]
fn hand_stepped_short_run() {
    // T=100, K=2, point masses at 0.75 and 0.25: the first epoch cannot finish,
    // so 25 pulls each are explored round-robin, then arm 0 is played.
    let inst = point_instance(&[0.75, 0.25], 1.0);
    let s = PolicySettings {
        noise: NoiseMode::Zero,
        ..settings(&inst, 1.0, 100, 0)
    };
    let mut p = SuccessiveElimination::new(SeVariant::Central, 2, &s).unwrap();
    let arms = drive(&mut p, &inst, 100, 0);
    let expected: Vec<usize> = (0..50).map(|i| i % 2).chain(std::iter::repeat_n(0, 50)).collect();
    assert_eq!(arms, expected);
    assert_eq!(p.committed_arm(), Some(0));
    let e = &p.epoch_log()[0];
    assert_eq!((e.pulls_per_arm, e.err), (25, None));
    assert_eq!(e.estimates, vec![(0, 0.75), (1, 0.25)]);
}

#[test]
fn dprucb_trees_track_pulls() {
    let inst = two_point_instance(&[0.7, 0.5, 0.3], 0.5);
    let s = settings(&inst, 1.0, 5000, 9);
    let mut p = DpRobustUcb::new(3, &s).unwrap();
    let arms = drive(&mut p, &inst, 5000, 9);
    assert_eq!(&arms[..3], &[0, 1, 2]);
    for a in 0..3 {
        assert_eq!(p.trees()[a].len(), p.pulls()[a]);
        assert_eq!(p.pulls()[a], arms.iter().filter(|&&x| x == a).count() as u64);
    }
    let report = privacy_audit(&p).unwrap();
    assert_eq!(report.tree_draws, 5000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn replay_is_identical(seed in any::<u64>(), which in 0usize..3) {
        let inst = two_point_instance(&[0.6, 0.4, 0.35], 0.75);
        let s = settings(&inst, 2.0, 3000, seed);
        let build = || -> Box<dyn Policy> {
            match which {
                0 => Box::new(DpRobustUcb::new(3, &s).unwrap()),
                1 => Box::new(SuccessiveElimination::central(3, &s).unwrap()),
                _ => Box::new(SuccessiveElimination::local(3, &s).unwrap()),
            }
        };
        let (mut a, mut b) = (build(), build());
        prop_assert_eq!(drive(a.as_mut(), &inst, 3000, seed), drive(b.as_mut(), &inst, 3000, seed));
        prop_assert!(privacy_audit(a.as_ref()).is_ok());
    }

    #[test]
    fn elimination_never_empties_viable_set(seed in any::<u64>(), eps in 1.0f64..500.0) {
        let inst = two_point_instance(&[0.5, 0.5, 0.45], 1.0);
        let s = settings(&inst, eps, 20_000, seed);
        let mut p = SuccessiveElimination::central(3, &s).unwrap();
        drive(&mut p, &inst, 20_000, seed);
        prop_assert!(!p.viable_arms().is_empty());
    }
}
