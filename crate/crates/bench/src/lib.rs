//! Shared fixtures for the benchmarks.

use privbandit::distributions::ParetoSetting;
use privbandit::harness::{Algorithm, Checkpoints, ExperimentConfig, Setting};
use privbandit::mechanisms::{AdaptiveTree, NoiseMode, NoiseSource};
use privbandit::rng::{stream, Purpose};

/// One repetition on S1 with a single checkpoint, so the benchmark measures the policy loop.
pub fn s1_config(algorithm: Algorithm, horizon: u64) -> ExperimentConfig {
    ExperimentConfig::new(algorithm, Setting::Pareto(ParetoSetting::S1), 0.9, 1.0, horizon)
        .with_seed(1)
        .with_checkpoints(Checkpoints::Geometric(1))
}

pub fn laplace_tree(horizon: u64) -> AdaptiveTree {
    AdaptiveTree::new(
        horizon,
        1.0,
        NoiseSource::new(stream(1, 0, 0, Purpose::Test), NoiseMode::Laplace),
    )
    .expect("valid tree parameters")
}
