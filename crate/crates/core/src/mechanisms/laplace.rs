use rand::Rng;

use super::MechanismError;
use crate::rng::{open_uniform, StreamRng};

/// Scale `b` of a centred Laplace law, density `exp(-|x|/b) / 2b`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LaplaceScale(f64);

impl LaplaceScale {
    pub fn new(b: f64) -> Result<Self, MechanismError> {
        if b > 0.0 && b.is_finite() {
            Ok(Self(b))
        } else {
            Err(MechanismError::InvalidScale(b))
        }
    }

    /// Scale for a query with L1 sensitivity `sensitivity` under budget `eps`.
    pub fn calibrated(sensitivity: f64, eps: f64) -> Result<Self, MechanismError> {
        Self::new(sensitivity / eps)
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Inverse CDF of the Laplace law at `u` in (0, 1).
#[inline]
pub fn laplace_quantile(b: f64, u: f64) -> f64 {
    if u < 0.5 {
        b * (2.0 * u).ln()
    } else {
        -b * (2.0 * (1.0 - u)).ln()
    }
}

/// One Laplace draw, a deterministic function of one open-interval uniform.
pub fn lap_sample<R: Rng + ?Sized>(scale: LaplaceScale, rng: &mut R) -> f64 {
    laplace_quantile(scale.0, open_uniform(rng))
}

/// How a [`NoiseSource`] produces its draws.
///
/// The deterministic modes exist only with the `noise-hooks` feature and are
/// meant for structural tests: `Zero` returns 0 and `Unit` returns 1 for every
/// draw, so the number of injections is visible in the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum NoiseMode {
    #[default]
    Laplace,
    #[cfg(feature = "noise-hooks")]
    Zero,
    #[cfg(feature = "noise-hooks")]
    Unit,
}

impl NoiseMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Laplace => "laplace",
            #[cfg(feature = "noise-hooks")]
            Self::Zero => "zero",
            #[cfg(feature = "noise-hooks")]
            Self::Unit => "unit",
        }
    }
}

/// A private random stream that hands out Laplace noise and counts draws.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: StreamRng,
    mode: NoiseMode,
    draws: u64,
}

impl NoiseSource {
    pub fn new(rng: StreamRng, mode: NoiseMode) -> Self {
        Self { rng, mode, draws: 0 }
    }

    pub fn draw(&mut self, scale: LaplaceScale) -> f64 {
        self.draws += 1;
        match self.mode {
            NoiseMode::Laplace => lap_sample(scale, &mut self.rng),
            #[cfg(feature = "noise-hooks")]
            NoiseMode::Zero => 0.0,
            #[cfg(feature = "noise-hooks")]
            NoiseMode::Unit => 1.0,
        }
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }
}
