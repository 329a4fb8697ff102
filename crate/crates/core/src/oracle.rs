//! Brute-force reference for the logical channel of one correction round.
//!
//! Both codewords are rotated, every syndrome branch is projected out, the
//! min-weight correction is applied, and the corrected branch is written as
//! `α_s I + β_s Z̄` on the codespace. Nothing here relies on the closed forms in
//! [`crate::channels`].

use num_complex::Complex;
use serde::Serialize;

use crate::channels::LogicalChannel;
use crate::codes::{measure_syndrome, project_syndrome, CodeSpec, MinWeightDecoder, Syndrome};
use crate::error::{Error, Result};
use crate::quantum::SignedPauli;
use crate::real::Real;

#[derive(Debug, Clone, Serialize)]
pub struct SyndromeBranch<T> {
    pub syndrome: Syndrome,
    pub probability: T,
    /// Identity coefficient, gauge-fixed real and non-negative.
    pub alpha: Complex<T>,
    /// Logical-Z coefficient in the same gauge.
    pub beta: Complex<T>,
    pub logical_angle: T,
    pub correction: SignedPauli,
}

/// `2·arctan(iβ/α)` evaluated with a two-argument arctangent, landing in
/// `(−π, π]`. `α = 0` gives `π`.
pub fn logical_angle<T: Real>(alpha: Complex<T>, beta: Complex<T>) -> T {
    // gauge-invariant form: iβ·conj(α) = |α|² tan(θ/2) when the map is a rotation
    let num = (Complex::new(T::zero(), T::one()) * beta * alpha.conj()).re;
    let den = alpha.norm_sqr();
    if den == T::zero() {
        return T::PI();
    }
    let a = T::lit(2.0) * num.atan2(den);
    if a <= -T::PI() {
        T::PI()
    } else {
        a
    }
}

/// Simulator bound to one code; holds the decoder table.
#[derive(Debug, Clone)]
pub struct Oracle<'a, T> {
    code: &'a CodeSpec<T>,
    decoder: MinWeightDecoder,
}

impl<'a, T: Real> Oracle<'a, T> {
    pub fn new(code: &'a CodeSpec<T>) -> Self {
        Self { code, decoder: MinWeightDecoder::new(code) }
    }

    pub fn code(&self) -> &CodeSpec<T> {
        self.code
    }

    pub fn decoder(&self) -> &MinWeightDecoder {
        &self.decoder
    }

    /// Every syndrome branch of one round under per-qubit Z-rotation `angles`.
    pub fn simulate_round(&self, angles: &[T]) -> Result<Vec<SyndromeBranch<T>>> {
        let code = self.code;
        let rotated0 = code.codeword_zero.apply_z_rotations(angles)?;
        let rotated1 = code.codeword_one.apply_z_rotations(angles)?;
        let tol = T::codespace_tolerance();
        let mut branches = Vec::new();
        for outcome in measure_syndrome(&rotated0, code)? {
            let correction = self.decoder.decode(&outcome.syndrome)?;
            let out0 = outcome.state.apply_pauli(&correction)?;
            let out1 = project_syndrome(&rotated1, code, &outcome.syndrome)?.apply_pauli(&correction)?;

            let alpha = code.codeword_zero.inner(&out0);
            let beta = code.codeword_one.inner(&out0);
            let fit0 = code.codeword_zero.scaled(alpha).add(&code.codeword_one.scaled(beta))?;
            let fit1 = code.codeword_one.scaled(alpha).add(&code.codeword_zero.scaled(beta))?;
            let residual = out0.max_abs_diff(&fit0).max(out1.max_abs_diff(&fit1));
            if residual > tol {
                return Err(Error::LeftCodespace(residual.to_f64_lossy()));
            }

            let (alpha, beta) = fix_gauge(alpha, beta);
            let logical_angle = logical_angle(alpha, beta);
            branches.push(SyndromeBranch {
                syndrome: outcome.syndrome,
                probability: outcome.probability,
                alpha,
                beta,
                logical_angle,
                correction,
            });
        }
        Ok(branches)
    }

    pub fn channel(&self, angles: &[T]) -> Result<LogicalChannel<T>> {
        channel_from_branches(&self.simulate_round(angles)?)
    }

    /// Acceptance probability of the trivial syndrome and the channel
    /// conditioned on it.
    pub fn simulate_round_detected(&self, angles: &[T]) -> Result<(T, LogicalChannel<T>)> {
        let branches = self.simulate_round(angles)?;
        let trivial = branches
            .iter()
            .find(|b| b.syndrome.is_trivial())
            .ok_or(Error::NothingAccepted)?;
        Ok((
            trivial.probability,
            LogicalChannel::from_terms([(T::one(), trivial.logical_angle)]),
        ))
    }
}

fn fix_gauge<T: Real>(alpha: Complex<T>, beta: Complex<T>) -> (Complex<T>, Complex<T>) {
    let norm = alpha.norm();
    if norm > T::zero() {
        let phase = alpha.conj() / norm;
        (Complex::new(norm, T::zero()), beta * phase)
    } else {
        (alpha, beta)
    }
}

pub fn simulate_round<T: Real>(code: &CodeSpec<T>, angles: &[T]) -> Result<Vec<SyndromeBranch<T>>> {
    Oracle::new(code).simulate_round(angles)
}

pub fn simulate_round_detected<T: Real>(code: &CodeSpec<T>, angles: &[T]) -> Result<(T, LogicalChannel<T>)> {
    Oracle::new(code).simulate_round_detected(angles)
}

/// Folds branches into a canonical channel; probabilities must sum to 1 within 1e-9.
pub fn channel_from_branches<T: Real>(branches: &[SyndromeBranch<T>]) -> Result<LogicalChannel<T>> {
    let total = branches.iter().fold(T::zero(), |acc, b| acc + b.probability);
    let tol = T::lit(1e-9).max(T::lit(1e3) * T::epsilon());
    if (total - T::one()).abs() > tol {
        return Err(Error::NotNormalized(total.to_f64_lossy()));
    }
    Ok(LogicalChannel::from_terms(branches.iter().map(|b| (b.probability, b.logical_angle))))
}
