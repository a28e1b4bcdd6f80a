use super::{LaplaceScale, MechanismError, NoiseSource};

/// Record of the noise injected by the most recent insertion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeDraw {
    /// 1-based index of the inserted item.
    pub step: u64,
    /// Level of the p-sum that was finalised.
    pub level: u32,
    /// Magnitude bound declared for the item.
    pub bound: f64,
    /// Absolute value of the item.
    pub input_abs: f64,
    pub scale: f64,
}

/// Tree-based continual-release mechanism with a non-decreasing item bound.
///
/// Level `i` holds the p-sum of the last `2^i` items ending at the most
/// recent multiple of `2^i`. Inserting item `t` finalises level
/// `trailing_zeros(t)`, folding every lower level into it, and draws fresh
/// noise for that level only. The released sum is the sum of the noisy
/// p-sums at the set bits of `t`, so it aggregates `popcount(t)` draws.
#[derive(Debug, Clone)]
pub struct AdaptiveTree {
    horizon: u64,
    eps: f64,
    eps_prime: f64,
    t: u64,
    psums: Vec<f64>,
    noisy: Vec<f64>,
    estimate: f64,
    last_bound: f64,
    noise: NoiseSource,
    last_draw: Option<TreeDraw>,
}

impl AdaptiveTree {
    /// A tree with `horizon` leaves. The per-level budget is `eps / ln(horizon)`.
    pub fn new(horizon: u64, eps: f64, noise: NoiseSource) -> Result<Self, MechanismError> {
        if horizon < 2 {
            return Err(MechanismError::InvalidParameter(format!(
                "tree horizon must be >= 2, got {horizon}"
            )));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(MechanismError::InvalidParameter(format!(
                "privacy budget must be positive, got {eps}"
            )));
        }
        let levels = (u64::BITS - horizon.leading_zeros()) as usize;
        Ok(Self {
            horizon,
            eps,
            eps_prime: eps / (horizon as f64).ln(),
            t: 0,
            psums: vec![0.0; levels],
            noisy: vec![0.0; levels],
            estimate: 0.0,
            last_bound: 0.0,
            noise,
            last_draw: None,
        })
    }

    /// Appends `value` (with `|value| <= bound`) and returns the new noisy running sum.
    pub fn insert(&mut self, value: f64, bound: f64) -> Result<f64, MechanismError> {
        if self.t >= self.horizon {
            return Err(MechanismError::HorizonExceeded { horizon: self.horizon });
        }
        if !(bound.is_finite() && bound > 0.0) {
            return Err(MechanismError::InvalidParameter(format!(
                "bound must be positive and finite, got {bound}"
            )));
        }
        if bound < self.last_bound {
            return Err(MechanismError::DecreasingBound {
                previous: self.last_bound,
                next: bound,
            });
        }
        if !(value.abs() <= bound) {
            return Err(MechanismError::BoundViolation { value, bound });
        }
        let scale = LaplaceScale::new(2.0 * bound / self.eps_prime)?;

        self.t += 1;
        self.last_bound = bound;
        let level = self.t.trailing_zeros() as usize;
        let mut psum = value;
        for j in 0..level {
            psum += self.psums[j];
            self.psums[j] = 0.0;
            self.noisy[j] = 0.0;
        }
        self.psums[level] = psum;
        self.noisy[level] = psum + self.noise.draw(scale);
        self.estimate = self.sum_over_bits(&self.noisy);
        self.last_draw = Some(TreeDraw {
            step: self.t,
            level: level as u32,
            bound,
            input_abs: value.abs(),
            scale: scale.get(),
        });
        Ok(self.estimate)
    }

    fn sum_over_bits(&self, levels: &[f64]) -> f64 {
        let mut bits = self.t;
        let mut total = 0.0;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            total += levels[j];
            bits &= bits - 1;
        }
        total
    }

    /// Current noisy running sum. Repeated reads do not draw noise.
    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    /// Exact running sum recomposed from the finalised p-sums.
    pub fn exact_sum(&self) -> f64 {
        self.sum_over_bits(&self.psums)
    }

    /// Bitmask of the finalised levels that make up the current release.
    pub fn active_levels(&self) -> u64 {
        self.t
    }

    pub fn len(&self) -> u64 {
        self.t
    }

    pub fn is_empty(&self) -> bool {
        self.t == 0
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn last_draw(&self) -> Option<TreeDraw> {
        self.last_draw
    }

    pub fn noise_draws(&self) -> u64 {
        self.noise.draws()
    }
}

/// High-probability envelope `(2B/eps) ln^1.5(T) ln(1/delta)` on `|S_hat(t) - S(t)|`.
pub fn tree_noise_bound(bound: f64, eps: f64, horizon: f64, delta: f64) -> f64 {
    2.0 * bound / eps * horizon.ln().powf(1.5) * (1.0 / delta).ln()
}
