use std::fmt;
use std::str::FromStr;

use super::HarnessError;
use crate::distributions::{
    make_central_hard_instance, make_pareto_instance, make_two_arm_hard_instance, BanditInstance, HardFlavor,
    ParetoSetting,
};
use crate::mechanisms::NoiseMode;
use crate::policies::{
    DpRobustUcb, Policy, PolicySettings, RobustUcb, SuccessiveElimination, DEFAULT_PARTIAL_EXPLORE_FRACTION,
};
use crate::schedules::MomentParams;

/// Default gap of the two-armed hard instance.
pub const DEFAULT_TWO_ARM_DELTA: f64 = 0.1;
/// Default means of the K-armed hard instance.
pub const DEFAULT_K_ARM_MEANS: [f64; 5] = [0.5, 0.4, 0.3, 0.2, 0.1];
/// Default number of geometric checkpoints.
pub const DEFAULT_CHECKPOINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dprucb,
    Dprse,
    Ldprse,
    Rucb,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::Dprucb, Self::Dprse, Self::Ldprse, Self::Rucb];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dprucb => "dprucb",
            Self::Dprse => "dprse",
            Self::Ldprse => "ldprse",
            Self::Rucb => "rucb",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown algorithm {s:?} (expected dprucb, dprse, ldprse or rucb)"
                ))
            })
    }
}

/// The reward environment of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Setting {
    Pareto(ParetoSetting),
    TwoArmHard { delta: f64, flavor: HardFlavor },
    KArmHard { means: Vec<f64> },
}

impl Setting {
    pub fn label(&self) -> String {
        match self {
            Self::Pareto(s) => s.to_string(),
            Self::TwoArmHard { .. } => "two_arm_hard".into(),
            Self::KArmHard { .. } => "k_arm_hard".into(),
        }
    }

    pub fn build(&self, v: f64) -> Result<BanditInstance, HarnessError> {
        Ok(match self {
            Self::Pareto(s) => make_pareto_instance(*s, v)?,
            Self::TwoArmHard { delta, flavor } => make_two_arm_hard_instance(*delta, v, *flavor)?,
            Self::KArmHard { means } => make_central_hard_instance(means, v)?,
        })
    }
}

impl FromStr for Setting {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "s1" => Self::Pareto(ParetoSetting::S1),
            "s2" => Self::Pareto(ParetoSetting::S2),
            "s3" => Self::Pareto(ParetoSetting::S3),
            "two_arm_hard" => Self::TwoArmHard {
                delta: DEFAULT_TWO_ARM_DELTA,
                flavor: HardFlavor::PBar,
            },
            "k_arm_hard" => Self::KArmHard {
                means: DEFAULT_K_ARM_MEANS.to_vec(),
            },
            _ => {
                return Err(HarnessError::Config(format!(
                    "unknown setting {s:?} (expected s1, s2, s3, two_arm_hard or k_arm_hard)"
                )))
            }
        })
    }
}

/// Rounds at which cumulative regret is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checkpoints {
    /// About `n` log-spaced rounds from 1 to T, deduplicated, always ending at T.
    Geometric(usize),
    /// Every `s` rounds, plus T.
    Stride(u64),
}

impl Default for Checkpoints {
    fn default() -> Self {
        Self::Geometric(DEFAULT_CHECKPOINTS)
    }
}

impl Checkpoints {
    pub fn rounds(&self, horizon: u64) -> Vec<u64> {
        let mut out: Vec<u64> = match *self {
            Self::Geometric(0) | Self::Stride(0) => Vec::new(),
            Self::Geometric(1) => vec![horizon],
            Self::Geometric(n) => {
                let top = (horizon as f64).ln();
                (0..n)
                    .map(|i| (top * i as f64 / (n - 1) as f64).exp().round() as u64)
                    .map(|t| t.clamp(1, horizon))
                    .collect()
            }
            Self::Stride(s) => (1..=horizon / s).map(|i| i * s).collect(),
        };
        if horizon > 0 && !out.is_empty() {
            out.push(horizon);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl fmt::Display for Checkpoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Geometric(n) => write!(f, "geo:{n}"),
            Self::Stride(s) => write!(f, "every:{s}"),
        }
    }
}

impl FromStr for Checkpoints {
    type Err = HarnessError;

    /// Accepts `N`, `geo:N` or `every:S`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config(format!("bad checkpoint spec {s:?} (expected N, geo:N or every:S)"));
        if let Some(rest) = s.strip_prefix("every:") {
            let stride: u64 = rest.parse().map_err(|_| bad())?;
            if stride == 0 {
                return Err(bad());
            }
            return Ok(Self::Stride(stride));
        }
        let n = s.strip_prefix("geo:").unwrap_or(s);
        n.parse().map(Self::Geometric).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub setting: Setting,
    pub v: f64,
    pub eps: f64,
    pub horizon: u64,
    pub repetitions: u64,
    pub base_seed: u64,
    pub checkpoints: Checkpoints,
    /// Confidence level of the elimination policies; `None` means `1/T`.
    pub beta: Option<f64>,
    pub noise: NoiseMode,
    pub partial_explore_fraction: f64,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, setting: Setting, v: f64, eps: f64, horizon: u64) -> Self {
        Self {
            algorithm,
            setting,
            v,
            eps,
            horizon,
            repetitions: 1,
            base_seed: 0,
            checkpoints: Checkpoints::default(),
            beta: None,
            noise: NoiseMode::Laplace,
            partial_explore_fraction: DEFAULT_PARTIAL_EXPLORE_FRACTION,
        }
    }

    pub fn with_reps(mut self, repetitions: u64) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Checkpoints) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_noise(mut self, noise: NoiseMode) -> Self {
        self.noise = noise;
        self
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(1.0 / self.horizon as f64)
    }

    /// Builds and checks the instance the config describes.
    pub fn instance(&self) -> Result<BanditInstance, HarnessError> {
        if !(self.v > 0.0 && self.v <= 1.0) {
            return Err(HarnessError::Config(format!("v must lie in (0, 1], got {}", self.v)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(HarnessError::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.repetitions == 0 {
            return Err(HarnessError::Config("at least one repetition is required".into()));
        }
        let instance = self.setting.build(self.v)?;
        if self.horizon < instance.num_arms() as u64 || self.horizon < 2 {
            return Err(HarnessError::Config(format!(
                "horizon {} is shorter than the {} arms",
                self.horizon,
                instance.num_arms()
            )));
        }
        Ok(instance)
    }

    pub fn policy_settings(&self, instance: &BanditInstance, rep: u64) -> Result<PolicySettings, HarnessError> {
        let moment = MomentParams::new(instance.u(), instance.v()).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(PolicySettings {
            beta: self.beta(),
            noise: self.noise,
            base_seed: self.base_seed,
            rep,
            partial_explore_fraction: self.partial_explore_fraction,
            ..PolicySettings::new(moment, self.eps, self.horizon)
        })
    }

    pub fn build_policy(&self, arms: usize, settings: &PolicySettings) -> Result<Box<dyn Policy>, HarnessError> {
        let policy: Box<dyn Policy> = match self.algorithm {
            Algorithm::Dprucb => Box::new(DpRobustUcb::new(arms, settings)?),
            Algorithm::Dprse => Box::new(SuccessiveElimination::central(arms, settings)?),
            Algorithm::Ldprse => Box::new(SuccessiveElimination::local(arms, settings)?),
            Algorithm::Rucb => Box::new(RobustUcb::new(arms, settings)?),
        };
        Ok(policy)
    }
}
