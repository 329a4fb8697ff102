//! Generators of per-qubit dephasing angles.
//!
//! Every model is expressed as a phase accumulated over a wait time in ms.
//! Deterministic kinds are rates per millisecond (`θ` after 1 ms), so a
//! `Homogeneous { theta: 0.2 }` model yields `0.2` rad on every qubit at
//! `wait = 1` and `0.4` rad at `wait = 2`.
//!
//! Stochastic draws come from a ChaCha stream keyed by `(seed, shot)`, so a
//! given shot sees the same draw regardless of thread scheduling or the order
//! in which shots are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference time for rate-style parameters.
pub const T_REF_MS: f64 = 1.0;

/// Second-order Zeeman coefficient of the clock transition, Hz/G².
pub const ZEEMAN_COEFFICIENT_HZ_PER_G2: f64 = 310.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    /// Same angle on every qubit.
    Homogeneous { theta: f64 },
    /// `θ_x = θ₀ + x·δ` for ion position `x`.
    Gradient { theta0: f64, delta: f64 },
    /// Shot-to-shot Gaussian frequency offset shared by all qubits, plus a
    /// static gradient. Phase std-dev grows as `σ·t`.
    QuasiStatic {
        sigma: f64,
        #[serde(default)]
        gradient_delta: f64,
    },
    /// Two independent Ornstein-Uhlenbeck frequency noises (std-dev `σ`
    /// rad/ms, correlation time `τ` ms), integrated over the wait.
    TwoTimescale { sigma_fast: f64, tau_fast: f64, sigma_slow: f64, tau_slow: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(flatten)]
    pub kind: NoiseKind,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, seed: u64) -> Result<Self> {
        let model = Self { kind, seed };
        model.validate()?;
        Ok(model)
    }

    pub fn noiseless() -> Self {
        Self { kind: NoiseKind::Homogeneous { theta: 0.0 }, seed: 0 }
    }

    /// Default used for logical Ramsey runs: a fast correlated component
    /// (2 ms) that dominates the first tens of ms and a slow drift.
    ///
    /// Tuned so the fitted corrected-curve T₂* of the FM distance-3 code comes
    /// out near 115 ms on the default time grid.
    pub fn default_logical(seed: u64) -> Self {
        Self {
            kind: NoiseKind::TwoTimescale { sigma_fast: 0.0234, tau_fast: 2.0, sigma_slow: 0.001, tau_slow: 500.0 },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::OutOfRange(format!("noise parameter {what} must be finite and non-negative")));
        let finite = |x: f64| x.is_finite();
        match self.kind {
            NoiseKind::Homogeneous { theta } if !finite(theta) => bad("theta"),
            NoiseKind::Gradient { theta0, delta } if !finite(theta0) || !finite(delta) => bad("theta0/delta"),
            NoiseKind::QuasiStatic { sigma, gradient_delta } if !(sigma >= 0.0) || !finite(sigma) || !finite(gradient_delta) => {
                bad("sigma")
            }
            NoiseKind::TwoTimescale { sigma_fast, tau_fast, sigma_slow, tau_slow } => {
                for (name, v) in [("sigma_fast", sigma_fast), ("tau_fast", tau_fast), ("sigma_slow", sigma_slow), ("tau_slow", tau_slow)] {
                    if !(v >= 0.0) || !finite(v) {
                        return bad(name);
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self.kind, NoiseKind::QuasiStatic { .. } | NoiseKind::TwoTimescale { .. })
    }

    /// Standard deviation of the shared random phase after `wait` ms.
    pub fn phase_std(&self, wait: f64) -> f64 {
        match self.kind {
            NoiseKind::QuasiStatic { sigma, .. } => sigma * wait / T_REF_MS,
            NoiseKind::TwoTimescale { sigma_fast, tau_fast, sigma_slow, tau_slow } => {
                (integrated_ou_variance(sigma_fast, tau_fast, wait) + integrated_ou_variance(sigma_slow, tau_slow, wait))
                    .sqrt()
            }
            _ => 0.0,
        }
    }

    /// Per-qubit angles for ion `positions` after `wait` ms on shot `shot`.
    pub fn sample_angles(&self, positions: &[i32], wait: f64, shot: u64) -> Result<Vec<f64>> {
        if !(wait >= 0.0) {
            return Err(Error::OutOfRange(format!("wait time {wait} ms is negative")));
        }
        let scale = wait / T_REF_MS;
        let angles = match self.kind {
            NoiseKind::Homogeneous { theta } => vec![theta * scale; positions.len()],
            NoiseKind::Gradient { theta0, delta } => {
                positions.iter().map(|&x| (theta0 + f64::from(x) * delta) * scale).collect()
            }
            NoiseKind::QuasiStatic { gradient_delta, .. } => {
                let common = self.standard_normal(shot) * self.phase_std(wait);
                positions.iter().map(|&x| common + f64::from(x) * gradient_delta * scale).collect()
            }
            NoiseKind::TwoTimescale { .. } => {
                let common = self.standard_normal(shot) * self.phase_std(wait);
                vec![common; positions.len()]
            }
        };
        Ok(angles)
    }

    fn standard_normal(&self, shot: u64) -> f64 {
        let mut rng = shot_rng(self.seed, shot, 0);
        StandardNormal.sample(&mut rng)
    }
}

/// Variance of `∫₀ᵗ ω(s) ds` for a stationary OU process with std-dev `σ` and
/// correlation time `τ`: `2σ²τ²(t/τ − 1 + e^{−t/τ})`. Quadratic in `t` for
/// `t ≪ τ`, linear for `t ≫ τ`.
pub fn integrated_ou_variance(sigma: f64, tau: f64, t: f64) -> f64 {
    if sigma == 0.0 || t == 0.0 {
        return 0.0;
    }
    if tau == 0.0 {
        return 0.0;
    }
    let x = t / tau;
    // expm1 keeps the small-x regime accurate
    2.0 * sigma * sigma * tau * tau * (x + (-x).exp_m1())
}

/// Deterministic RNG for work item `(seed, shot)`; `salt` separates
/// independent uses within one shot.
pub fn shot_rng(seed: u64, shot: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(shot);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    /// Magnetic field in gauss.
    pub b_gauss: f64,
}

/// Second-order Zeeman shift `310.8·B²` Hz.
pub fn zeeman_shift(field: FieldParams) -> Result<f64> {
    if !(field.b_gauss >= 0.0) {
        return Err(Error::OutOfRange(format!("field {} G is negative", field.b_gauss)));
    }
    Ok(ZEEMAN_COEFFICIENT_HZ_PER_G2 * field.b_gauss * field.b_gauss)
}
