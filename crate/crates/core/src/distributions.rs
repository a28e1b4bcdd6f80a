//! Reward models and bandit instances.
//!
//! Two families are supported: Pareto laws (the experiment environments) and
//! finite-support laws (the hard instances used in the lower-bound
//! constructions). Means and `(1+v)`-moments are always computed analytically
//! from the model parameters.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::rng::open_uniform;

/// Tolerance on the total mass of a finite-support law.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("pareto shape must exceed 1, got {0}")]
    ParetoShape(f64),
    #[error("pareto scale must be positive and finite, got {0}")]
    ParetoScale(f64),
    #[error("moment of order 1+v={order} is infinite for pareto shape {alpha}")]
    InfiniteMoment { alpha: f64, order: f64 },
    #[error("finite-support law has no atoms")]
    EmptySupport,
    #[error("atom ({value}, {prob}) is not a finite value with nonnegative probability")]
    InvalidAtom { value: f64, prob: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    MassNotOne(f64),
    #[error("moment order parameter v must lie in (0, 1], got {0}")]
    MomentOrder(f64),
    #[error("instance needs at least one arm")]
    NoArms,
    #[error("invalid hard-instance parameters: {0}")]
    HardInstance(String),
    #[error("cannot parse instance description: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, DistributionError>;

fn check_v(v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(DistributionError::MomentOrder(v))
    }
}

/// Pareto law with density `alpha * lam^alpha / x^(alpha+1)` on `x >= lam`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoModel {
    alpha: f64,
    lam: f64,
}

impl ParetoModel {
    pub fn new(alpha: f64, lam: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(DistributionError::ParetoShape(alpha));
        }
        if !(lam > 0.0 && lam.is_finite()) {
            return Err(DistributionError::ParetoScale(lam));
        }
        Ok(Self { alpha, lam })
    }

    /// Parameterise by mean: `lam = (alpha - 1) * mean / alpha`.
    pub fn with_mean(alpha: f64, mean: f64) -> Result<Self> {
        Self::new(alpha, (alpha - 1.0) * mean / alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.lam / (self.alpha - 1.0)
    }

    /// `E|X|^(1+v) = alpha * lam^(1+v) / (alpha - (1+v))`.
    pub fn moment_bound(&self, v: f64) -> Result<f64> {
        let order = 1.0 + v;
        if self.alpha <= order {
            return Err(DistributionError::InfiniteMoment {
                alpha: self.alpha,
                order,
            });
        }
        Ok(self.alpha * self.lam.powf(order) / (self.alpha - order))
    }

    /// Inverse CDF: `lam * (1 - u)^(-1/alpha)`.
    pub fn quantile(&self, u: f64) -> f64 {
        self.lam * (1.0 - u).powf(-1.0 / self.alpha)
    }

    /// `E[X 1{X > b}]` in closed form.
    pub fn tail_mean(&self, b: f64) -> f64 {
        let b = b.max(self.lam);
        self.alpha * self.lam.powf(self.alpha) * b.powf(1.0 - self.alpha) / (self.alpha - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Discrete law on finitely many points.
///
/// Atoms are kept sorted by value with duplicates merged and zero-mass atoms
/// dropped, so two models describing the same law compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSupportModel {
    atoms: Vec<Atom>,
    cumulative: Vec<f64>,
}

impl FiniteSupportModel {
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<Atom> = Vec::new();
        for (value, prob) in atoms {
            if !value.is_finite() || !(prob >= 0.0) || !prob.is_finite() {
                return Err(DistributionError::InvalidAtom { value, prob });
            }
            raw.push(Atom { value, prob });
        }
        if raw.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        let total: f64 = raw.iter().map(|a| a.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(DistributionError::MassNotOne(total));
        }
        raw.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
        for atom in raw {
            match merged.last_mut() {
                Some(last) if last.value == atom.value => last.prob += atom.prob,
                _ => merged.push(atom),
            }
        }
        merged.retain(|a| a.prob > 0.0);
        if merged.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        let mut acc = 0.0;
        let cumulative = merged
            .iter()
            .map(|a| {
                acc += a.prob;
                acc
            })
            .collect();
        Ok(Self {
            atoms: merged,
            cumulative,
        })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob * a.value).sum()
    }

    pub fn moment_bound(&self, v: f64) -> f64 {
        self.atoms.iter().map(|a| a.prob * a.value.abs().powf(1.0 + v)).sum()
    }

    /// Smallest atom whose cumulative probability exceeds `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.atoms[idx.min(self.atoms.len() - 1)].value
    }
}

/// A samplable reward law.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardModel {
    Pareto(ParetoModel),
    Finite(FiniteSupportModel),
}

impl RewardModel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open_uniform(rng))
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Pareto(m) => m.quantile(u),
            Self::Finite(m) => m.quantile(u),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Pareto(m) => m.mean(),
            Self::Finite(m) => m.mean(),
        }
    }

    pub fn moment_bound(&self, v: f64) -> Result<f64> {
        match self {
            Self::Pareto(m) => m.moment_bound(v),
            Self::Finite(m) => Ok(m.moment_bound(v)),
        }
    }
}

impl From<ParetoModel> for RewardModel {
    fn from(m: ParetoModel) -> Self {
        Self::Pareto(m)
    }
}

impl From<FiniteSupportModel> for RewardModel {
    fn from(m: FiniteSupportModel) -> Self {
        Self::Finite(m)
    }
}

/// An ordered set of arms together with the moment parameters `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    label: String,
    arms: Vec<RewardModel>,
    v: f64,
    u: f64,
    means: Vec<f64>,
    gaps: Vec<f64>,
}

impl BanditInstance {
    /// Builds an instance whose `u` is the largest analytic `(1+v)`-moment.
    pub fn new(label: impl Into<String>, arms: Vec<RewardModel>, v: f64) -> Result<Self> {
        check_v(v)?;
        if arms.is_empty() {
            return Err(DistributionError::NoArms);
        }
        let mut u: f64 = 0.0;
        for arm in &arms {
            u = u.max(arm.moment_bound(v)?);
        }
        let means: Vec<f64> = arms.iter().map(RewardModel::mean).collect();
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps = means.iter().map(|m| best - m).collect();
        Ok(Self {
            label: label.into(),
            arms,
            v,
            u,
            means,
            gaps,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arms(&self) -> &[RewardModel] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Lowest-index arm with zero gap.
    pub fn best_arm(&self) -> usize {
        self.gaps.iter().position(|&g| g == 0.0).unwrap_or(0)
    }

    /// Line-based `key=value` description used for provenance files.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("setting={}\n", self.label));
        out.push_str(&format!("v={}\n", self.v));
        out.push_str(&format!("u={}\n", self.u));
        out.push_str(&format!("k={}\n", self.arms.len()));
        for (i, arm) in self.arms.iter().enumerate() {
            match arm {
                RewardModel::Pareto(m) => out.push_str(&format!("arm.{i}=pareto alpha={} lambda={}\n", m.alpha, m.lam)),
                RewardModel::Finite(m) => {
                    let atoms: Vec<String> = m.atoms.iter().map(|a| format!("{}:{}", a.value, a.prob)).collect();
                    out.push_str(&format!("arm.{i}=finite atoms={}\n", atoms.join(";")));
                }
            }
        }
        out
    }

    /// Inverse of [`BanditInstance::to_kv`]. `u` is recomputed and must agree.
    pub fn from_kv(text: &str) -> Result<Self> {
        let perr = |m: String| DistributionError::Parse(m);
        let mut map = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, val) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("no '=' in {line:?}")))?;
            map.insert(k.to_string(), val.to_string());
        }
        let get = |k: &str| map.get(k).ok_or_else(|| perr(format!("missing key {k}")));
        let num = |s: &str| s.parse::<f64>().map_err(|e| perr(format!("{s:?}: {e}")));
        let label = get("setting")?.clone();
        let v = num(get("v")?)?;
        let k: usize = get("k")?.parse().map_err(|e| perr(format!("k: {e}")))?;
        let mut arms = Vec::with_capacity(k);
        for i in 0..k {
            let spec = get(&format!("arm.{i}"))?;
            let mut parts = spec.split_whitespace();
            let kind = parts.next().unwrap_or_default();
            let fields: BTreeMap<&str, &str> = parts.filter_map(|p| p.split_once('=')).collect();
            let field = |f: &str| {
                fields
                    .get(f)
                    .copied()
                    .ok_or_else(|| perr(format!("arm.{i}: missing {f}")))
            };
            match kind {
                "pareto" => arms.push(ParetoModel::new(num(field("alpha")?)?, num(field("lambda")?)?)?.into()),
                "finite" => {
                    let mut atoms = Vec::new();
                    for pair in field("atoms")?.split(';') {
                        let (x, p) = pair.split_once(':').ok_or_else(|| perr(format!("atom {pair:?}")))?;
                        atoms.push((num(x)?, num(p)?));
                    }
                    arms.push(FiniteSupportModel::new(atoms)?.into());
                }
                other => return Err(perr(format!("arm.{i}: unknown kind {other:?}"))),
            }
        }
        let inst = Self::new(label, arms, v)?;
        if let Some(u) = map.get("u") {
            let u = num(u)?;
            if u != inst.u {
                return Err(perr(format!("recorded u={u} differs from recomputed {}", inst.u)));
            }
        }
        Ok(inst)
    }
}

/// The three Pareto environments of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParetoSetting {
    S1,
    S2,
    S3,
}

impl ParetoSetting {
    pub const ALL: [ParetoSetting; 3] = [Self::S1, Self::S2, Self::S3];

    /// Arm means, best first.
    pub fn means(&self) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (i, m) in out.iter_mut().enumerate() {
            let a = (i + 1) as f64;
            *m = match self {
                Self::S1 => [0.9, 0.7, 0.5, 0.3, 0.1][i],
                Self::S2 => 0.05 * (a - 5.0).powi(2) + 0.1,
                Self::S3 => -0.05 * (a - 1.0).powi(2) + 0.9,
            };
        }
        out
    }
}

impl fmt::Display for ParetoSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::S3 => "S3",
        })
    }
}

/// Pareto shape used by the experiments for a given `v`.
pub fn experiment_shape(v: f64) -> f64 {
    1.05 + v
}

/// Five Pareto arms with shape `1.05 + v` and scales chosen to hit the setting's means.
pub fn make_pareto_instance(setting: ParetoSetting, v: f64) -> Result<BanditInstance> {
    check_v(v)?;
    let alpha = experiment_shape(v);
    let arms = setting
        .means()
        .iter()
        .map(|&mu| ParetoModel::with_mean(alpha, mu).map(RewardModel::from))
        .collect::<Result<Vec<_>>>()?;
    BanditInstance::new(setting.to_string(), arms, v)
}

fn hard_err(msg: String) -> DistributionError {
    DistributionError::HardInstance(msg)
}

/// `(1 - s^(1+v)/2) δ_0 + (s^(1+v)/2) δ_{1/s}` with `s = (2 mu)^(1/v)`.
pub fn central_hard_arm(mu: f64, v: f64) -> Result<FiniteSupportModel> {
    check_v(v)?;
    if !(mu > 0.0 && mu <= 0.5) {
        return Err(hard_err(format!("mean {mu} outside (0, 1/2]")));
    }
    let s = (2.0 * mu).powf(1.0 / v);
    let p = s.powf(1.0 + v) / 2.0;
    FiniteSupportModel::new([(0.0, 1.0 - p), (1.0 / s, p)])
}

/// K-armed instance for the central lower bound. Means must be nonincreasing in `(0, 1/2]`.
pub fn make_central_hard_instance(means: &[f64], v: f64) -> Result<BanditInstance> {
    check_v(v)?;
    if means.is_empty() {
        return Err(DistributionError::NoArms);
    }
    if means.windows(2).any(|w| w[1] > w[0]) {
        return Err(hard_err(format!("means {means:?} are not nonincreasing")));
    }
    let arms = means
        .iter()
        .map(|&mu| central_hard_arm(mu, v).map(RewardModel::from))
        .collect::<Result<Vec<_>>>()?;
    BanditInstance::new("k_arm_hard", arms, v)
}

/// The alternative law for arm `a`, whose mean is raised by `2 * delta`.
///
/// Requires `mu^(1+v) <= 1/6` and `delta^(1+v) <= 1/12` so that all masses are valid.
pub fn make_central_shifted_arm(mu: f64, delta: f64, v: f64) -> Result<FiniteSupportModel> {
    check_v(v)?;
    if !(mu > 0.0 && mu <= 0.5) {
        return Err(hard_err(format!("mean {mu} outside (0, 1/2]")));
    }
    let order = 1.0 + v;
    if !(delta >= 0.0) || mu.powf(order) > 1.0 / 6.0 || delta.powf(order) > 1.0 / 12.0 {
        return Err(hard_err(format!(
            "need mu^(1+v) <= 1/6 and 0 <= delta^(1+v) <= 1/12, got mu={mu}, delta={delta}, v={v}"
        )));
    }
    if delta == 0.0 {
        return central_hard_arm(mu, v);
    }
    let s = (2.0 * mu).powf(1.0 / v);
    let gamma = (4.0 * delta).powf(1.0 / v);
    let p_s = s.powf(order) / 2.0;
    let p_g = 2.0 * delta * gamma;
    FiniteSupportModel::new([(0.0, 1.0 - p_s - p_g), (1.0 / s, p_s), (1.0 / gamma, p_g)])
}

/// Which member of the two-arm lower-bound pair to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardFlavor {
    /// Arm 2 has mean `1.5 * delta`.
    PBar,
    /// Arm 2 has mean `3.5 * delta`.
    QBar,
}

impl fmt::Display for HardFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PBar => "P_bar",
            Self::QBar => "Q_bar",
        })
    }
}

/// Two-armed instance with `gamma = (5 delta)^(1/v)`; arm 1 has mean `2.5 * delta`.
pub fn make_two_arm_hard_instance(delta: f64, v: f64, flavor: HardFlavor) -> Result<BanditInstance> {
    check_v(v)?;
    if !(delta > 0.0 && delta < 0.2) {
        return Err(hard_err(format!("delta {delta} outside (0, 1/5)")));
    }
    let gamma = (5.0 * delta).powf(1.0 / v);
    let base = gamma.powf(1.0 + v) / 2.0;
    let top = 1.0 / gamma;
    let arm1 = FiniteSupportModel::new([(0.0, 1.0 - base), (top, base)])?;
    let p2 = match flavor {
        HardFlavor::PBar => base - delta * gamma,
        HardFlavor::QBar => base + delta * gamma,
    };
    let arm2 = FiniteSupportModel::new([(0.0, 1.0 - p2), (top, p2)])?;
    BanditInstance::new("two_arm_hard", vec![arm1.into(), arm2.into()], v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn point_mass_at_zero_samples_zero() {
        let m: RewardModel = FiniteSupportModel::point_mass(0.0).unwrap().into();
        let mut rng = stream(99, 0, 0, Purpose::Test);
        for _ in 0..100 {
            assert_eq!(m.sample(&mut rng), 0.0);
        }
        assert_eq!(m.moment_bound(0.3).unwrap(), 0.0);
    }

    #[test]
    fn pareto_quantile_by_hand() {
        let m = ParetoModel::new(2.0, 1.0).unwrap();
        assert!(close(m.quantile(0.75), 2.0, 1e-15));
    }

    #[test]
    fn finite_quantile_cumulative_lookup() {
        let m = FiniteSupportModel::new([(0.0, 0.82), (5.0 / 3.0, 0.18)]).unwrap();
        assert_eq!(m.quantile(0.9), 5.0 / 3.0);
        assert_eq!(m.quantile(0.5), 0.0);
        assert_eq!(m.quantile(0.82), 5.0 / 3.0);
    }

    #[test]
    fn pareto_moment_bound_formula() {
        let alpha: f64 = 1.95;
        let lam = (alpha - 1.0) * 0.9 / alpha;
        let m = ParetoModel::new(alpha, lam).unwrap();
        let expect = 1.95 * lam.powf(1.9) / 0.05;
        assert!(close(m.moment_bound(0.9).unwrap(), expect, 1e-12));
        // alpha <= 1+v has no finite moment
        assert!(matches!(
            ParetoModel::new(1.5, 1.0).unwrap().moment_bound(0.5),
            Err(DistributionError::InfiniteMoment { .. })
        ));
    }

    #[test]
    fn finite_moment_direct_sum() {
        let m = FiniteSupportModel::new([(0.0, 0.875), (2.0, 0.125)]).unwrap();
        assert_eq!(m.moment_bound(1.0), 0.5);
    }

    #[test]
    fn pareto_setting_means() {
        let s2 = ParetoSetting::S2.means();
        let s3 = ParetoSetting::S3.means();
        for (got, want) in s2.iter().zip([0.9, 0.55, 0.3, 0.15, 0.1]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        for (got, want) in s3.iter().zip([0.9, 0.85, 0.7, 0.45, 0.1]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn pareto_instance_scales_and_u() {
        let inst = make_pareto_instance(ParetoSetting::S1, 0.5).unwrap();
        let RewardModel::Pareto(first) = &inst.arms()[0] else {
            panic!()
        };
        assert!((first.alpha() - 1.55).abs() < 1e-15);
        assert!((first.lam() - 0.319_354_838_709_677_4).abs() < 1e-12);
        let max_moment = inst
            .arms()
            .iter()
            .map(|a| a.moment_bound(0.5).unwrap())
            .fold(0.0, f64::max);
        assert_eq!(inst.u(), max_moment);
        for (m, want) in inst.means().iter().zip(ParetoSetting::S1.means()) {
            assert!((m - want).abs() < 1e-12);
        }
        assert_eq!(inst.gaps()[0], 0.0);
        assert!(inst.gaps().iter().all(|&g| g >= 0.0));
    }

    #[test]
    fn central_hard_arm_examples() {
        let a = central_hard_arm(0.25, 1.0).unwrap();
        assert_eq!(a, FiniteSupportModel::new([(0.0, 0.875), (2.0, 0.125)]).unwrap());
        assert!(close(a.mean(), 0.25, 1e-12));
        assert!(close(a.moment_bound(1.0), 0.5, 1e-12));

        let b = central_hard_arm(0.3, 1.0).unwrap();
        assert!(close(b.atoms()[0].prob, 0.82, 1e-12));
        assert!(close(b.atoms()[1].value, 5.0 / 3.0, 1e-12));
        assert!(close(b.mean(), 0.3, 1e-12));

        let tiny = central_hard_arm(1e-9, 0.5).unwrap();
        assert!(tiny.atoms()[0].prob > 1.0 - 1e-12);
    }

    #[test]
    fn central_hard_instance_preconditions() {
        assert!(make_central_hard_instance(&[0.3, 0.4], 1.0).is_err());
        assert!(make_central_hard_instance(&[0.6, 0.4], 1.0).is_err());
        assert!(make_central_hard_instance(&[0.4, 0.0], 1.0).is_err());
        let inst = make_central_hard_instance(&[0.5, 0.4, 0.1], 0.7).unwrap();
        assert!((inst.u() - 0.5).abs() < 1e-12);
        assert!(inst.u() <= 1.0);
    }

    #[test]
    fn shifted_arm_merges_and_hits_mean() {
        let m = make_central_shifted_arm(0.1, 0.05, 1.0).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!(close(m.atoms()[0].prob, 0.96, 1e-12));
        assert!(close(m.atoms()[1].value, 5.0, 1e-12));
        assert!(close(m.atoms()[1].prob, 0.04, 1e-12));
        assert!(close(m.mean(), 0.2, 1e-12));
        let total: f64 = m.atoms().iter().map(|a| a.prob).sum();
        assert!((total - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn shifted_arm_zero_delta_is_base_arm() {
        assert_eq!(
            make_central_shifted_arm(0.2, 0.0, 0.6).unwrap(),
            central_hard_arm(0.2, 0.6).unwrap()
        );
    }

    #[test]
    fn shifted_arm_rejects_infeasible() {
        // 0.45^2 > 1/6
        assert!(make_central_shifted_arm(0.45, 0.01, 1.0).is_err());
        // 0.3^2 > 1/12
        assert!(make_central_shifted_arm(0.1, 0.3, 1.0).is_err());
        assert!(make_central_shifted_arm(0.1, -0.01, 1.0).is_err());
    }

    #[test]
    fn two_arm_instance_examples() {
        let p = make_two_arm_hard_instance(0.1, 1.0, HardFlavor::PBar).unwrap();
        let RewardModel::Finite(a1) = &p.arms()[0] else {
            panic!()
        };
        let RewardModel::Finite(a2) = &p.arms()[1] else {
            panic!()
        };
        assert!(close(a1.atoms()[1].value, 2.0, 1e-12));
        assert!(close(a1.atoms()[1].prob, 0.125, 1e-12));
        assert!(close(a2.atoms()[1].prob, 0.075, 1e-12));
        assert!(close(p.means()[0], 0.25, 1e-12));
        assert!(close(p.means()[1], 0.15, 1e-12));
        assert!(close(a1.moment_bound(1.0), 0.5, 1e-12));

        let q = make_two_arm_hard_instance(0.1, 1.0, HardFlavor::QBar).unwrap();
        let RewardModel::Finite(b2) = &q.arms()[1] else {
            panic!()
        };
        assert!(close(b2.atoms()[1].prob, 0.175, 1e-12));
        assert!(close(q.means()[1], 0.35, 1e-12));
        assert_eq!(q.best_arm(), 1);
        assert!(q.u() <= 1.0);

        assert!(make_two_arm_hard_instance(0.2, 1.0, HardFlavor::PBar).is_err());
        assert!(make_two_arm_hard_instance(0.0, 1.0, HardFlavor::PBar).is_err());
    }

    #[test]
    fn finite_support_validation() {
        assert!(FiniteSupportModel::new([(0.0, 0.5), (1.0, 0.4)]).is_err());
        assert!(FiniteSupportModel::new([(f64::NAN, 1.0)]).is_err());
        assert!(FiniteSupportModel::new([(0.0, -0.1), (1.0, 1.1)]).is_err());
        assert!(FiniteSupportModel::new(Vec::<(f64, f64)>::new()).is_err());
    }

    #[test]
    fn kv_round_trip() {
        for inst in [
            make_pareto_instance(ParetoSetting::S3, 0.9).unwrap(),
            make_two_arm_hard_instance(0.07, 0.4, HardFlavor::QBar).unwrap(),
        ] {
            let back = BanditInstance::from_kv(&inst.to_kv()).unwrap();
            assert_eq!(back, inst);
        }
        assert!(BanditInstance::from_kv("setting=x\nv=0.5\nk=1\narm.0=cauchy loc=0\n").is_err());
    }
}
