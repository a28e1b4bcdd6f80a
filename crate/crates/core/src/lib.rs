//! Differentially private algorithms for heavy-tailed multi-armed bandits.
//!
//! All logarithms are natural. Rewards are only assumed to have a bounded
//! `(1+v)`-th raw moment `E|X|^(1+v) <= u` for some `v` in `(0, 1]`.

// Range checks are written as `!(x <= b)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod harness;
pub mod mechanisms;
pub mod policies;
pub mod rng;
pub mod schedules;

pub use distributions::{
    BanditInstance, DistributionError, FiniteSupportModel, ParetoModel, ParetoSetting, RewardModel,
};
pub use harness::{
    run_experiment, run_single, Algorithm, Checkpoints, ExperimentConfig, ExperimentResult, HarnessError, RegretTrace,
    Setting, SummaryStats,
};
pub use mechanisms::{AdaptiveTree, LaplaceScale, MechanismError, NoiseMode, NoiseSource};
pub use policies::{DpRobustUcb, Policy, PolicyError, PolicySettings, RobustUcb, SeVariant, SuccessiveElimination};
pub use schedules::{MomentParams, ScheduleError};
