//! Simulation driver: runs a policy against an instance and records regret.

mod config;
mod output;
mod stats;

use rayon::prelude::*;
use thiserror::Error;

use crate::distributions::{BanditInstance, DistributionError};
use crate::policies::{privacy_audit, AuditFailure, AuditReport, PolicyError, TranscriptEntry};
use crate::rng::{Purpose, StreamKey, StreamRng};

pub use config::{
    Algorithm, Checkpoints, ExperimentConfig, Setting, DEFAULT_CHECKPOINTS, DEFAULT_K_ARM_MEANS, DEFAULT_TWO_ARM_DELTA,
};
pub use output::{
    format_float, read_runs_csv, read_summary_csv, write_csv, CsvPaths, RunRow, RUNS_HEADER, SUMMARY_HEADER,
};
pub use stats::{compensated_sum, mean_std, SummaryRow, SummaryStats};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("repetition {rep}: {source}")]
    Run {
        rep: u64,
        #[source]
        source: PolicyError,
    },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Cumulative pseudo-regret at each checkpoint round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegretTrace {
    pub points: Vec<(u64, f64)>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

/// Extra recording for a single run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub transcript: bool,
    pub record_noise: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rep: u64,
    pub trace: RegretTrace,
    pub pulls: Vec<u64>,
    pub committed: Option<usize>,
    pub viable: Vec<usize>,
    pub noise_draws: u64,
    pub transcript: Option<Vec<TranscriptEntry>>,
    /// Set when noise recording was requested.
    pub audit: Option<Result<AuditReport, AuditFailure>>,
}

/// Pseudo-regret `sum_a gap_a * N_a`.
pub fn pseudo_regret(gaps: &[f64], pulls: &[u64]) -> f64 {
    let terms: Vec<f64> = gaps.iter().zip(pulls).map(|(g, &n)| g * n as f64).collect();
    compensated_sum(&terms)
}

pub fn run_single(config: &ExperimentConfig, rep: u64) -> Result<RunOutcome, HarnessError> {
    run_single_with(config, rep, RunOptions::default())
}

pub fn run_single_with(config: &ExperimentConfig, rep: u64, options: RunOptions) -> Result<RunOutcome, HarnessError> {
    let instance = config.instance()?;
    run_on_instance(config, &instance, rep, options)
}

/// Runs one repetition on an already built instance.
pub fn run_on_instance(
    config: &ExperimentConfig,
    instance: &BanditInstance,
    rep: u64,
    options: RunOptions,
) -> Result<RunOutcome, HarnessError> {
    let mut settings = config.policy_settings(instance, rep)?;
    settings.record_noise = options.record_noise;
    let k = instance.num_arms();
    let mut policy = config.build_policy(k, &settings)?;
    let mut reward_rngs: Vec<StreamRng> = (0..k)
        .map(|a| StreamKey::new(config.base_seed, rep, a, Purpose::Reward).rng())
        .collect();
    let checkpoints = config.checkpoints.rounds(config.horizon);
    let gaps = instance.gaps();
    let mut pulls = vec![0u64; k];
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().peekable();
    let mut transcript = options.transcript.then(|| Vec::with_capacity(config.horizon as usize));
    let run_err = |source| HarnessError::Run { rep, source };

    for t in 1..=config.horizon {
        let arm = policy.select_arm(t);
        if arm >= k {
            return Err(run_err(PolicyError::UnexpectedArm {
                expected: None,
                got: arm,
            }));
        }
        let raw = instance.arms()[arm].sample(&mut reward_rngs[arm]);
        let obs = policy.observe(arm, raw).map_err(run_err)?;
        pulls[arm] += 1;
        if let Some(tr) = transcript.as_mut() {
            tr.push(TranscriptEntry {
                round: t,
                arm,
                raw,
                truncated: obs.truncated,
                committed: policy.committed_arm().is_some(),
            });
        }
        if next.peek() == Some(&t) {
            next.next();
            points.push((t, pseudo_regret(gaps, &pulls)));
        }
    }

    let audit = options.record_noise.then(|| privacy_audit(policy.as_ref()));
    Ok(RunOutcome {
        rep,
        trace: RegretTrace { points },
        pulls,
        committed: policy.committed_arm(),
        viable: policy.viable_arms(),
        noise_draws: policy.noise_draws(),
        transcript,
        audit,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub instance: BanditInstance,
    /// Outcomes in repetition order.
    pub outcomes: Vec<RunOutcome>,
    pub summary: SummaryStats,
}

impl ExperimentResult {
    pub fn traces(&self) -> Vec<RegretTrace> {
        self.outcomes.iter().map(|o| o.trace.clone()).collect()
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    run_experiment_with(config, Execution::Parallel)
}

/// Runs every repetition; results do not depend on `execution`.
pub fn run_experiment_with(config: &ExperimentConfig, execution: Execution) -> Result<ExperimentResult, HarnessError> {
    let instance = config.instance()?;
    let one = |rep| run_on_instance(config, &instance, rep, RunOptions::default());
    let outcomes: Vec<RunOutcome> = match execution {
        Execution::Parallel => (0..config.repetitions)
            .into_par_iter()
            .map(one)
            .collect::<Result<_, _>>()?,
        Execution::Sequential => (0..config.repetitions).map(one).collect::<Result<_, _>>()?,
    };
    let traces: Vec<RegretTrace> = outcomes.iter().map(|o| o.trace.clone()).collect();
    let summary = SummaryStats::from_traces(&traces)?;
    Ok(ExperimentResult {
        config: config.clone(),
        instance,
        outcomes,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ParetoSetting;

    fn cfg(algo: Algorithm) -> ExperimentConfig {
        ExperimentConfig::new(algo, Setting::Pareto(ParetoSetting::S1), 0.9, 1.0, 2000)
            .with_reps(3)
            .with_seed(11)
            .with_checkpoints(Checkpoints::Stride(500))
    }

    #[test]
    fn regret_is_sum_of_gaps() {
        assert_eq!(pseudo_regret(&[0.0, 0.5, 1.0], &[10, 2, 3]), 4.0);
    }

    #[test]
    fn pulls_add_up_to_horizon() {
        for algo in Algorithm::ALL {
            let out = run_single(&cfg(algo), 0).unwrap();
            assert_eq!(out.pulls.iter().sum::<u64>(), 2000, "{algo}");
            assert_eq!(
                out.trace.points.iter().map(|p| p.0).collect::<Vec<_>>(),
                vec![500, 1000, 1500, 2000]
            );
        }
    }

    #[test]
    fn trace_is_nondecreasing() {
        let out = run_single(&cfg(Algorithm::Dprucb), 1).unwrap();
        assert!(out.trace.points.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn repetitions_differ_and_repeat() {
        let c = cfg(Algorithm::Dprucb);
        let a = run_single(&c, 0).unwrap();
        let b = run_single(&c, 0).unwrap();
        let d = run_single(&c, 1).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_ne!(a.pulls, d.pulls);
    }

    #[test]
    fn transcript_and_audit_on_request() {
        let opts = RunOptions {
            transcript: true,
            record_noise: true,
        };
        let out = run_single_with(&cfg(Algorithm::Dprucb), 0, opts).unwrap();
        assert_eq!(out.transcript.as_ref().map(Vec::len), Some(2000));
        let report = out.audit.unwrap().unwrap();
        assert_eq!(report.total(), out.noise_draws);
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = cfg(Algorithm::Dprse);
        let p = run_experiment_with(&c, Execution::Parallel).unwrap();
        let s = run_experiment_with(&c, Execution::Sequential).unwrap();
        assert_eq!(p.traces(), s.traces());
        assert_eq!(p.summary, s.summary);
    }
}
