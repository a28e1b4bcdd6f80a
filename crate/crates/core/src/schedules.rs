//! Closed-form thresholds, radii and epoch schedules.
//!
//! Every function here is pure. Logarithms are natural throughout.

use thiserror::Error;

/// Largest epoch length representable as an exact integer in an `f64`.
pub const MAX_EPOCH_PULLS: u64 = 1 << 53;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("moment parameters need u > 0 and 0 < v <= 1, got u={u}, v={v}")]
    MomentParams { u: f64, v: f64 },
    #[error("epoch {tau} needs {required:e} pulls per arm, above the maximum of {max}")]
    EpochOverflow { tau: u32, required: f64, max: u64 },
    #[error("{0}")]
    InvalidParameter(String),
}

/// Moment bound `u` on `E|X|^(1+v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentParams {
    u: f64,
    v: f64,
}

impl MomentParams {
    pub fn new(u: f64, v: f64) -> Result<Self, ScheduleError> {
        if u > 0.0 && u.is_finite() && v > 0.0 && v <= 1.0 {
            Ok(Self { u, v })
        } else {
            Err(ScheduleError::MomentParams { u, v })
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    fn order(&self) -> f64 {
        1.0 + self.v
    }
}

/// Per-epoch plan: target gap, pulls per viable arm, truncation bound, confidence width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochSchedule {
    pub gap: f64,
    pub pulls: u64,
    pub bound: f64,
    pub err: f64,
}

/// The same quantities before the pull count is narrowed to an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawSchedule {
    pub gap: f64,
    /// Already rounded up, but possibly beyond [`MAX_EPOCH_PULLS`].
    pub pulls: f64,
    pub bound: f64,
    pub err: f64,
    /// The confidence log term the formulas share.
    pub log_term: f64,
}

impl RawSchedule {
    fn checked(self, tau: u32) -> Result<EpochSchedule, ScheduleError> {
        if !(self.pulls.is_finite() && self.pulls <= MAX_EPOCH_PULLS as f64) {
            return Err(ScheduleError::EpochOverflow {
                tau,
                required: self.pulls,
                max: MAX_EPOCH_PULLS,
            });
        }
        Ok(EpochSchedule {
            gap: self.gap,
            pulls: self.pulls as u64,
            bound: self.bound,
            err: self.err,
        })
    }
}

/// Truncation threshold of the private UCB after `n` pulls: `(eps u n / ln^1.5 T)^(1/(1+v))`.
pub fn ucb_trunc_threshold(params: MomentParams, eps: f64, n: f64, horizon: f64) -> f64 {
    (eps * params.u * n / horizon.ln().powf(1.5)).powf(1.0 / params.order())
}

/// Exploration bonus of the private UCB index.
pub fn ucb_radius(params: MomentParams, eps: f64, n: f64, t: f64, horizon: f64) -> f64 {
    let v = params.v;
    let inner = (2.0 * t.powi(4)).ln() * horizon.ln().powf(1.5 + 1.0 / v) / (n * eps);
    18.0 * params.u.powf(1.0 / params.order()) * inner.powf(v / params.order())
}

/// Truncation threshold of the non-private robust UCB: `(u n / ln t^2)^(1/(1+v))`.
pub fn nonprivate_ucb_threshold(params: MomentParams, n: f64, t: f64) -> f64 {
    (params.u * n / (t * t).ln()).powf(1.0 / params.order())
}

/// Bonus of the non-private truncated-mean UCB: `4 u^(1/(1+v)) (ln t^2 / n)^(v/(1+v))`.
pub fn nonprivate_ucb_radius(params: MomentParams, n: f64, t: f64) -> f64 {
    4.0 * params.u.powf(1.0 / params.order()) * ((t * t).ln() / n).powf(params.v / params.order())
}

fn check_epoch(eps: f64, beta: f64, tau: u32, viable: usize) -> Result<(), ScheduleError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(ScheduleError::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ScheduleError::InvalidParameter(format!(
            "beta must lie in (0, 1), got {beta}"
        )));
    }
    if tau == 0 || viable == 0 {
        return Err(ScheduleError::InvalidParameter(format!(
            "epoch index and viable-set size start at 1, got tau={tau}, |S|={viable}"
        )));
    }
    Ok(())
}

/// `ln(4 |S| tau^2 / beta)`.
pub fn dpse_log_term(viable: usize, tau: u32, beta: f64) -> f64 {
    (4.0 * viable as f64 * f64::from(tau).powi(2) / beta).ln()
}

/// Central truncation bound for an epoch of `pulls` rewards per arm.
pub fn dpse_bound(params: MomentParams, eps: f64, log_term: f64, pulls: f64) -> f64 {
    (params.u * pulls * eps / log_term).powf(1.0 / params.order())
}

pub fn dpse_err(params: MomentParams, eps: f64, log_term: f64, pulls: f64) -> f64 {
    params.u.powf(1.0 / params.order()) * (log_term / (pulls * eps)).powf(params.v / params.order())
}

/// Smallest integer count at or above `pulls` whose computed width fits in `gap / 2`.
///
/// The formulas keep a margin of one pull, which disappears in double
/// precision once the count nears 1e15; a few extra pulls restore it.
fn restore_margin(pulls: f64, factor: f64, gap: f64, err: impl Fn(f64) -> f64) -> f64 {
    let mut r = pulls;
    let mut step = (r.next_up() - r).max(1.0);
    for _ in 0..128 {
        if factor * err(r) <= gap / 2.0 {
            break;
        }
        r += step;
        step *= 2.0;
    }
    r
}

pub fn dpse_schedule_raw(params: MomentParams, eps: f64, beta: f64, tau: u32, viable: usize) -> RawSchedule {
    let MomentParams { u, v } = params;
    let gap = 0.5f64.powi(tau as i32);
    let log_term = dpse_log_term(viable, tau, beta);
    let ratio = (1.0 + v) / v;
    let pulls = (u.powf(1.0 / v) * 24f64.powf(ratio) * log_term / (eps * gap.powf(ratio)) + 1.0).ceil();
    let pulls = restore_margin(pulls, 12.0, gap, |r| dpse_err(params, eps, log_term, r));
    RawSchedule {
        gap,
        pulls,
        bound: dpse_bound(params, eps, log_term, pulls),
        err: dpse_err(params, eps, log_term, pulls),
        log_term,
    }
}

/// Epoch `tau` of the central successive-elimination policy, `Delta = 2^-tau`.
pub fn dpse_schedule(
    params: MomentParams,
    eps: f64,
    beta: f64,
    tau: u32,
    viable: usize,
) -> Result<EpochSchedule, ScheduleError> {
    check_epoch(eps, beta, tau, viable)?;
    dpse_schedule_raw(params, eps, beta, tau, viable).checked(tau)
}

/// `ln(8 |S| tau^2 / beta)`.
pub fn ldpse_log_term(viable: usize, tau: u32, beta: f64) -> f64 {
    (8.0 * viable as f64 * f64::from(tau).powi(2) / beta).ln()
}

/// Local truncation bound for an epoch of `pulls` rewards per arm.
pub fn ldpse_bound(params: MomentParams, eps: f64, log_term: f64, pulls: f64) -> f64 {
    (params.u * pulls.sqrt() * eps / log_term.sqrt()).powf(1.0 / params.order())
}

pub fn ldpse_err(params: MomentParams, eps: f64, log_term: f64, pulls: f64) -> f64 {
    params.u.powf(1.0 / params.order()) * (log_term.sqrt() / (pulls * eps)).powf(params.v / params.order())
}

pub fn ldpse_schedule_raw(params: MomentParams, eps: f64, beta: f64, tau: u32, viable: usize) -> RawSchedule {
    let MomentParams { u, v } = params;
    let gap = 0.25f64.powi(tau as i32);
    let log_term = ldpse_log_term(viable, tau, beta);
    let ratio = 2.0 * (1.0 + v) / v;
    let pulls = (u.powf(2.0 / v) * 28f64.powf(ratio) * log_term / (eps * eps * gap.powf(ratio)) + log_term).ceil();
    let pulls = restore_margin(pulls, 14.0, gap, |r| ldpse_err(params, eps, log_term, r));
    RawSchedule {
        gap,
        pulls,
        bound: ldpse_bound(params, eps, log_term, pulls),
        err: ldpse_err(params, eps, log_term, pulls),
        log_term,
    }
}

/// Epoch `tau` of the local successive-elimination policy, `Delta = 4^-tau`.
pub fn ldpse_schedule(
    params: MomentParams,
    eps: f64,
    beta: f64,
    tau: u32,
    viable: usize,
) -> Result<EpochSchedule, ScheduleError> {
    check_epoch(eps, beta, tau, viable)?;
    ldpse_schedule_raw(params, eps, beta, tau, viable).checked(tau)
}
