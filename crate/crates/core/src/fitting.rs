//! Least-squares fits for `A·exp(−Γt)` and `A·cos(kφ + φ₀)`.
//!
//! Times are in ms, so `Γ` is in 1/ms and `T₂* = 1/Γ` in ms.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::wrap_angle;

pub const MAX_ITERATIONS: usize = 200;
pub const STEP_TOLERANCE: f64 = 1e-10;
const GRADIENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitModel {
    ExpDecay,
    Cosine { k: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: BTreeMap<String, f64>,
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn amplitude(&self) -> f64 {
        self.params["A"]
    }

    /// `1/Γ` for an exponential fit; `None` when `Γ = 0` or for cosine fits.
    pub fn t2_star(&self) -> Option<f64> {
        match self.param("gamma") {
            Some(g) if g > 0.0 => Some(1.0 / g),
            _ => None,
        }
    }
}

fn check_inputs(x: &[f64], y: &[f64], weights: Option<&[f64]>, min_points: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if let Some(w) = weights {
        if w.len() != x.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: w.len() });
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Fit("weights must be finite and non-negative".into()));
        }
    }
    if x.len() < min_points {
        return Err(Error::Fit(format!("need at least {min_points} points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite input".into()));
    }
    Ok(())
}

/// Converts point-wise standard errors into least-squares weights `1/σ²`.
/// Zero errors get the largest finite weight present (or 1 if none).
pub fn weights_from_stderr(stderr: &[f64]) -> Vec<f64> {
    let max_w = stderr
        .iter()
        .filter(|s| **s > 0.0)
        .map(|s| 1.0 / (s * s))
        .fold(0.0, f64::max);
    let fallback = if max_w > 0.0 { max_w } else { 1.0 };
    stderr.iter().map(|s| if *s > 0.0 { 1.0 / (s * s) } else { fallback }).collect()
}

pub fn fit_exp_decay(times: &[f64], values: &[f64]) -> Result<FitResult> {
    fit_exp_decay_weighted(times, values, None)
}

/// Gauss-Newton fit of `A·exp(−Γt)` with `Γ ≥ 0`, started from a log-linear
/// regression on the positive samples.
pub fn fit_exp_decay_weighted(times: &[f64], values: &[f64], weights: Option<&[f64]>) -> Result<FitResult> {
    check_inputs(times, values, weights, 3)?;
    if values.iter().any(|v| v.abs() > 1.05) {
        return Err(Error::OutOfRange("decay values must lie in [-1.05, 1.05]".into()));
    }
    if values.iter().all(|v| *v <= 0.0) {
        return Err(Error::Fit("all values are non-positive".into()));
    }
    let w: Vec<f64> = weights.map_or_else(|| vec![1.0; times.len()], <[f64]>::to_vec);

    let (mut a, mut gamma) = log_linear_start(times, values);
    let cost = |a: f64, g: f64| -> f64 {
        times.iter().zip(values).zip(&w).map(|((t, y), w)| w * (y - a * (-g * t).exp()).powi(2)).sum()
    };
    let mut current = cost(a, gamma);

    for iteration in 1..=MAX_ITERATIONS {
        // normal equations for (ΔA, ΔΓ)
        let (mut jj, mut jr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for ((t, y), w) in times.iter().zip(values).zip(&w) {
            let e = (-gamma * t).exp();
            let r = y - a * e;
            let j = [e, -a * t * e];
            for p in 0..2 {
                jr[p] += w * j[p] * r;
                for q in 0..2 {
                    jj[p][q] += w * j[p] * j[q];
                }
            }
        }
        // Γ pinned at its bound with the gradient pushing it negative
        let pinned = gamma == 0.0 && jr[1] < 0.0;
        let grad_norm = if pinned { jr[0].abs() } else { jr[0].hypot(jr[1]) };
        let scale = (jj[0][0] + jj[1][1]).sqrt().max(1.0);
        if grad_norm <= GRADIENT_TOLERANCE * scale {
            return Ok(exp_result(a, gamma, current, times.len(), w.iter().sum(), true, iteration - 1));
        }

        let step = if pinned {
            if jj[0][0] > 0.0 { [jr[0] / jj[0][0], 0.0] } else { [0.0, 0.0] }
        } else {
            solve2(jj, jr).ok_or_else(|| Error::Fit("singular normal equations".into()))?
        };

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let na = a + lambda * step[0];
            let ng = (gamma + lambda * step[1]).max(0.0);
            let c = cost(na, ng);
            if c <= current {
                accepted = Some((na, ng, c));
                break;
            }
            lambda *= 0.5;
        }
        let Some((na, ng, c)) = accepted else {
            // no descent along the Gauss-Newton direction: stationary to rounding
            return Ok(exp_result(a, gamma, current, times.len(), w.iter().sum(), true, iteration));
        };
        let small = (na - a).abs() <= STEP_TOLERANCE * (1.0 + a.abs())
            && (ng - gamma).abs() <= STEP_TOLERANCE * (1.0 + gamma.abs());
        a = na;
        gamma = ng;
        current = c;
        if small {
            return Ok(exp_result(a, gamma, current, times.len(), w.iter().sum(), true, iteration));
        }
    }
    Err(Error::Fit(format!("exponential fit did not converge in {MAX_ITERATIONS} iterations")))
}

fn log_linear_start(times: &[f64], values: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, y)| **y > 0.0)
        .map(|(t, y)| (*t, y.ln()))
        .collect();
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let lm = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    if stt == 0.0 {
        return (lm.exp(), 0.0);
    }
    let slope = pts.iter().map(|p| (p.0 - tm) * (p.1 - lm)).sum::<f64>() / stt;
    let gamma = (-slope).max(0.0);
    let intercept = if gamma == 0.0 { lm } else { lm - slope * tm };
    (intercept.exp(), gamma)
}

fn exp_result(a: f64, gamma: f64, cost: f64, n: usize, w_sum: f64, converged: bool, iterations: usize) -> FitResult {
    let mut params = BTreeMap::new();
    params.insert("A".to_string(), a);
    params.insert("gamma".to_string(), gamma);
    let denom = if w_sum > 0.0 { w_sum } else { n as f64 };
    FitResult {
        model: FitModel::ExpDecay,
        params,
        residual_rms: (cost / denom).sqrt(),
        converged,
        iterations,
    }
}

fn solve2(m: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[1][1].abs());
    if scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some([(b[0] * m[1][1] - b[1] * m[0][1]) / det, (m[0][0] * b[1] - m[1][0] * b[0]) / det])
}

pub fn fit_cosine(phases: &[f64], values: &[f64], k: u32) -> Result<FitResult> {
    fit_cosine_weighted(phases, values, k, None)
}

/// `A·cos(kφ + φ₀)` by linear projection onto `cos kφ`, `sin kφ`.
/// `A ≥ 0`, `φ₀ ∈ (−π, π]`; all-zero data gives `A = 0, φ₀ = 0`.
pub fn fit_cosine_weighted(phases: &[f64], values: &[f64], k: u32, weights: Option<&[f64]>) -> Result<FitResult> {
    check_inputs(phases, values, weights, 4)?;
    if k == 0 {
        return Err(Error::OutOfRange("harmonic k must be positive".into()));
    }
    let w: Vec<f64> = weights.map_or_else(|| vec![1.0; phases.len()], <[f64]>::to_vec);
    let kf = f64::from(k);
    let (mut g, mut rhs) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
    for ((phi, y), w) in phases.iter().zip(values).zip(&w) {
        let basis = [(kf * phi).cos(), (kf * phi).sin()];
        for p in 0..2 {
            rhs[p] += w * basis[p] * y;
            for q in 0..2 {
                g[p][q] += w * basis[p] * basis[q];
            }
        }
    }
    let [c, s] = solve2(g, rhs).ok_or_else(|| Error::Fit("phase grid is degenerate for this harmonic".into()))?;
    let amplitude = c.hypot(s);
    let phi0 = if amplitude == 0.0 { 0.0 } else { wrap_angle((-s).atan2(c)) };

    let cost: f64 = phases
        .iter()
        .zip(values)
        .zip(&w)
        .map(|((phi, y), w)| w * (y - amplitude * (kf * phi + phi0).cos()).powi(2))
        .sum();
    let w_sum: f64 = w.iter().sum();
    let mut params = BTreeMap::new();
    params.insert("A".to_string(), amplitude);
    params.insert("phi0".to_string(), phi0);
    Ok(FitResult {
        model: FitModel::Cosine { k },
        params,
        residual_rms: (cost / if w_sum > 0.0 { w_sum } else { phases.len() as f64 }).sqrt(),
        converged: true,
        iterations: 1,
    })
}
