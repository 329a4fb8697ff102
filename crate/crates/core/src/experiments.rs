//! Ramsey-style experiments driven by a [`NoiseModel`].
//!
//! Each shot samples one set of angles and evaluates the quantity of interest
//! exactly (state vector or oracle channel). Shots run in parallel; results
//! are collected in shot order and summed serially, so output does not depend
//! on the thread count. Shot `s` of time point `i` uses noise stream
//! `i·shots + s`, which keeps time points statistically independent.
//!
//! With `sample_readout` set, every shot is additionally reduced to single
//! `±1` readouts drawn from the exact expectations.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{gradient_phases, shor_variant_channel, LogicalChannel};
use crate::codes::{build_shor_code, CodeSpec, IonMapping, ShorVariant};
use crate::error::{Error, Result};
use crate::fitting::{fit_exp_decay_weighted, weights_from_stderr, FitResult};
use crate::noise::{shot_rng, NoiseModel};
use crate::oracle::Oracle;
use crate::quantum::{ghz_from_bits, ghz_relative_phase, GhzOrder, SignedPauli, StateVector};

type C64 = Complex<f64>;

/// Wait times of the logical Ramsey grid: 0 to 300 ms in 15 ms steps.
pub fn fig3_times() -> Vec<f64> {
    (0..=20).map(|i| 15.0 * f64::from(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    TimeMs,
    PhaseRad,
    ThetaRad,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::TimeMs => "time_ms",
            Axis::PhaseRad => "phase_rad",
            Axis::ThetaRad => "theta_rad",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamseyCurve {
    pub series: String,
    pub axis: Axis,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Shots contributing to each point (accepted shots for sampled detection).
    pub shots: Vec<usize>,
}

impl RamseyCurve {
    fn new(series: impl Into<String>, axis: Axis, x: Vec<f64>) -> Self {
        let n = x.len();
        Self {
            series: series.into(),
            axis,
            x,
            values: Vec::with_capacity(n),
            stderr: Vec::with_capacity(n),
            shots: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `A·exp(−Γt)` fit, weighted by the point-wise errors when they are not all zero.
    pub fn fit_exp(&self) -> Result<FitResult> {
        let weights = if self.stderr.iter().any(|s| *s > 0.0) { Some(weights_from_stderr(&self.stderr)) } else { None };
        fit_exp_decay_weighted(&self.x, &self.values, weights.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunOptions {
    pub shots: usize,
    pub sample_readout: bool,
}

impl RunOptions {
    pub fn exact(shots: usize) -> Self {
        Self { shots, sample_readout: false }
    }

    fn check(&self, model: &NoiseModel) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::OutOfRange("shots must be at least 1".into()));
        }
        model.validate()
    }
}

/// Weighted mean phasor and its standard error. Means are clamped to the
/// physical range, which rounding and `±1` sampling can overshoot.
#[derive(Default)]
struct PhasorSum {
    w: f64,
    w2: f64,
    z: C64,
    z2: f64,
    count: usize,
}

impl PhasorSum {
    fn push(&mut self, z: C64, w: f64) {
        self.w += w;
        self.w2 += w * w;
        self.z += z * w;
        self.z2 += w * z.norm_sqr();
        if w > 0.0 {
            self.count += 1;
        }
    }

    fn contrast(&self) -> (f64, f64) {
        if self.w <= 0.0 {
            return (0.0, 0.0);
        }
        let m = self.z / self.w;
        let var = (self.z2 / self.w - m.norm_sqr()).max(0.0);
        let n_eff = self.w * self.w / self.w2;
        (m.norm().min(1.0), (var / n_eff).sqrt())
    }

    fn real_mean(&self) -> (f64, f64) {
        if self.w <= 0.0 {
            return (0.0, 0.0);
        }
        let m = self.z.re / self.w;
        let var = (self.z2 / self.w - m * m).max(0.0);
        (m.clamp(-1.0, 1.0), (var * self.w2 / (self.w * self.w)).sqrt())
    }
}

fn pm_one(rng: &mut impl Rng, expectation: f64) -> f64 {
    if rng.random::<f64>() < 0.5 * (1.0 + expectation) {
        1.0
    } else {
        -1.0
    }
}

fn sampled_phasor(rng: &mut impl Rng, z: C64) -> C64 {
    C64::new(pm_one(rng, z.re), pm_one(rng, z.im))
}

fn centered_positions(n: usize) -> Vec<i32> {
    let half = (n / 2) as i32;
    (0..n as i32).map(|i| i - half).collect()
}

fn salt(time_index: usize, purpose: u64) -> u64 {
    1 + 4 * time_index as u64 + purpose
}

fn shot_id(time_index: usize, shots: usize, shot: usize) -> u64 {
    (time_index * shots + shot) as u64
}

/// Contrast `|E[e^{iΔ}]|` of an `n`-qubit GHZ state after each wait in `times`,
/// where `Δ` is the relative phase between its two branches.
pub fn ghz_ramsey(n: usize, order: GhzOrder, model: &NoiseModel, times: &[f64], opts: RunOptions) -> Result<RamseyCurve> {
    opts.check(model)?;
    let pattern = order.pattern(n);
    let ghz = ghz_from_bits::<f64>(&pattern)?;
    let positions = centered_positions(n);
    let label = match order {
        GhzOrder::Fm => format!("fm-ghz-{n}"),
        GhzOrder::Afm => format!("afm-ghz-{n}"),
    };
    let mut curve = RamseyCurve::new(label, Axis::TimeMs, times.to_vec());
    for (ti, &t) in times.iter().enumerate() {
        let phasors = (0..opts.shots)
            .into_par_iter()
            .map(|s| {
                let id = shot_id(ti, opts.shots, s);
                let angles = model.sample_angles(&positions, t, id)?;
                let c = C64::from_polar(1.0, ghz_relative_phase(&ghz.apply_z_rotations(&angles)?, &pattern));
                Ok(if opts.sample_readout { sampled_phasor(&mut shot_rng(model.seed, id, salt(ti, 0)), c) } else { c })
            })
            .collect::<Result<Vec<C64>>>()?;
        let mut acc = PhasorSum::default();
        for z in phasors {
            acc.push(z, 1.0);
        }
        let (v, e) = acc.contrast();
        curve.values.push(v);
        curve.stderr.push(e);
        curve.shots.push(acc.count);
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalRamsey {
    pub raw: RamseyCurve,
    pub corrected: RamseyCurve,
    pub detected: RamseyCurve,
    /// Fraction of shots with a trivial syndrome.
    pub accept: RamseyCurve,
}

impl LogicalRamsey {
    pub fn curves(&self) -> [&RamseyCurve; 4] {
        [&self.raw, &self.corrected, &self.detected, &self.accept]
    }
}

/// Physical parity operators whose expectations give the uncorrected logical
/// phasor: `X^⊗N` when it anticommutes with logical Z (else logical X itself),
/// and `i·X̄·Z̄` for the quadrature.
fn raw_readout<T: crate::Real>(code: &CodeSpec<T>) -> Result<(SignedPauli, SignedPauli)> {
    let all_x = SignedPauli::x_on(code.n_qubits, &(0..code.n_qubits).collect::<Vec<_>>());
    let x_bar = if all_x.commutes_with(&code.logical_z) { code.logical_x.clone() } else { all_x };
    let x_bar = match code.codeword_zero.expectation(&x_bar)? {
        e if e > T::zero() => x_bar,
        _ => x_bar.negated(),
    };
    let y_bar = x_bar.mul(&code.logical_z)?.times_i();
    Ok((x_bar, y_bar))
}

struct LogicalShot {
    raw: C64,
    corrected: C64,
    detected: C64,
    accept: f64,
}

/// Raw, corrected and post-selected logical coherence of `code` after each
/// wait in `times`, starting from the `+1` eigenstate of logical X.
///
/// Raw is the physical parity phasor `⟨X̄⟩ + i⟨Ȳ⟩`, corrected is
/// `Σ_s P_s e^{iθ_s}` after one round, and detected keeps only the trivial
/// syndrome. Values are the magnitudes of the shot-averaged phasors.
pub fn logical_ramsey(code: &CodeSpec<f64>, model: &NoiseModel, times: &[f64], opts: RunOptions) -> Result<LogicalRamsey> {
    opts.check(model)?;
    let oracle = Oracle::new(code);
    let (x_bar, y_bar) = raw_readout(code)?;
    let label = code.label();
    let mut out = LogicalRamsey {
        raw: RamseyCurve::new(format!("{label}-raw"), Axis::TimeMs, times.to_vec()),
        corrected: RamseyCurve::new(format!("{label}-corrected"), Axis::TimeMs, times.to_vec()),
        detected: RamseyCurve::new(format!("{label}-detected"), Axis::TimeMs, times.to_vec()),
        accept: RamseyCurve::new(format!("{label}-accept"), Axis::TimeMs, times.to_vec()),
    };
    for (ti, &t) in times.iter().enumerate() {
        let shots = (0..opts.shots)
            .into_par_iter()
            .map(|s| {
                let id = shot_id(ti, opts.shots, s);
                let angles = model.sample_angles(&code.positions, t, id)?;
                let rotated = code.codeword_zero.apply_z_rotations(&angles)?;
                let raw = C64::new(rotated.expectation(&x_bar)?, rotated.expectation(&y_bar)?);
                let branches = oracle.simulate_round(&angles)?;
                if !opts.sample_readout {
                    let corrected = branches.iter().map(|b| C64::from_polar(b.probability, b.logical_angle)).sum();
                    let (accept, detected) = branches
                        .iter()
                        .find(|b| b.syndrome.is_trivial())
                        .map_or((0.0, C64::new(0.0, 0.0)), |b| (b.probability, C64::from_polar(1.0, b.logical_angle)));
                    return Ok(LogicalShot { raw, corrected, detected, accept });
                }
                let mut rng = shot_rng(model.seed, id, salt(ti, 1));
                let raw = sampled_phasor(&mut rng, raw);
                let u: f64 = rng.random();
                let mut cumulative = 0.0;
                let branch = branches
                    .iter()
                    .find(|b| {
                        cumulative += b.probability;
                        u < cumulative
                    })
                    .unwrap_or_else(|| branches.last().expect("at least one syndrome branch"));
                let corrected = sampled_phasor(&mut rng, C64::from_polar(1.0, branch.logical_angle));
                let accept = if branch.syndrome.is_trivial() { 1.0 } else { 0.0 };
                Ok(LogicalShot { raw, corrected, detected: corrected, accept })
            })
            .collect::<Result<Vec<LogicalShot>>>()?;

        let (mut raw, mut corrected, mut detected, mut accept) =
            (PhasorSum::default(), PhasorSum::default(), PhasorSum::default(), PhasorSum::default());
        for shot in &shots {
            raw.push(shot.raw, 1.0);
            corrected.push(shot.corrected, 1.0);
            detected.push(shot.detected, shot.accept);
            accept.push(C64::new(shot.accept, 0.0), 1.0);
        }
        for (curve, (v, e), n) in [
            (&mut out.raw, raw.contrast(), raw.count),
            (&mut out.corrected, corrected.contrast(), corrected.count),
            (&mut out.detected, detected.contrast(), detected.count),
            (&mut out.accept, accept.real_mean(), opts.shots),
        ] {
            curve.values.push(v);
            curve.stderr.push(e);
            curve.shots.push(n);
        }
    }
    Ok(out)
}

/// Per-row Ramsey fringes of an FM/AFM Shor code after `wait` ms.
///
/// Row `r` reads `A_r·cos(kφ + Δ_r)` at analysis phase `φ`, with `k` the row
/// length and `Δ_r` the row's accumulated branch phase. `amplitudes` scales
/// each row (preparation fidelity); `None` means 1 for every row.
pub fn ghz_fringe(
    code: &CodeSpec<f64>,
    model: &NoiseModel,
    wait: f64,
    phases: &[f64],
    opts: RunOptions,
    amplitudes: Option<&[f64]>,
) -> Result<Vec<RamseyCurve>> {
    opts.check(model)?;
    if code.rows.is_empty() {
        return Err(Error::NoRowStructure);
    }
    if let Some(a) = amplitudes {
        if a.len() != code.rows.len() {
            return Err(Error::LengthMismatch { expected: code.rows.len(), got: a.len() });
        }
        if a.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutOfRange("row amplitudes must lie in [0, 1]".into()));
        }
    }
    let rows: Vec<(StateVector<f64>, &[bool], Vec<usize>)> = code
        .rows
        .iter()
        .map(|r| Ok((ghz_from_bits(&r.pattern)?, r.pattern.as_slice(), r.qubits.clone())))
        .collect::<Result<_>>()?;

    let coherences = (0..opts.shots)
        .into_par_iter()
        .map(|s| {
            let angles = model.sample_angles(&code.positions, wait, s as u64)?;
            rows.iter()
                .map(|(ghz, pattern, qubits)| {
                    let local: Vec<f64> = qubits.iter().map(|&q| angles[q]).collect();
                    Ok(C64::from_polar(1.0, ghz_relative_phase(&ghz.apply_z_rotations(&local)?, pattern)))
                })
                .collect::<Result<Vec<C64>>>()
        })
        .collect::<Result<Vec<Vec<C64>>>>()?;

    let names = row_names(code.rows.len());
    let mut curves = Vec::with_capacity(rows.len());
    for (r, (_, pattern, _)) in rows.iter().enumerate() {
        let k = pattern.len() as f64;
        let amp = amplitudes.map_or(1.0, |a| a[r]);
        let mut curve = RamseyCurve::new(format!("{}-{}", code.label(), names[r]), Axis::PhaseRad, phases.to_vec());
        for (pi, &phi) in phases.iter().enumerate() {
            let rotate = C64::from_polar(1.0, k * phi);
            let mut acc = PhasorSum::default();
            for (s, shot) in coherences.iter().enumerate() {
                let value = amp * (shot[r] * rotate).re;
                let value = if opts.sample_readout {
                    let purpose = (pi * rows.len() + r) as u64;
                    pm_one(&mut shot_rng(model.seed, s as u64, salt(0, 2).wrapping_add(4 * purpose)), value)
                } else {
                    value
                };
                acc.push(C64::new(value, 0.0), 1.0);
            }
            let (v, e) = acc.real_mean();
            curve.values.push(v);
            curve.stderr.push(e);
            curve.shots.push(acc.count);
        }
        curves.push(curve);
    }
    Ok(curves)
}

fn row_names(rows: usize) -> Vec<String> {
    match rows {
        3 => vec!["left".into(), "center".into(), "right".into()],
        _ => (0..rows).map(|r| format!("row{r}")).collect(),
    }
}

/// Expected per-row fringe offsets `Δ_r` for a gradient model at `wait` ms.
pub fn expected_fringe_offsets(code: &CodeSpec<f64>, theta0: f64, delta: f64, wait: f64) -> Result<Vec<f64>> {
    gradient_phases(code, theta0 * wait, delta * wait)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSeries {
    pub variant: ShorVariant,
    pub infidelity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub distance: usize,
    pub thetas: Vec<f64>,
    pub series: Vec<SweepSeries>,
    /// Number of `(variant, θ)` points re-evaluated with the oracle.
    pub oracle_points: usize,
    pub max_oracle_deviation: f64,
}

impl SweepTable {
    pub fn curves(&self) -> Vec<RamseyCurve> {
        self.series
            .iter()
            .map(|s| RamseyCurve {
                series: s.variant.name().to_string(),
                axis: Axis::ThetaRad,
                x: self.thetas.clone(),
                values: s.infidelity.clone(),
                stderr: vec![0.0; self.thetas.len()],
                shots: vec![0; self.thetas.len()],
            })
            .collect()
    }
}

/// Single-round logical infidelity of distance-3 Shor variants under
/// homogeneous rotation `θ`.
///
/// `|3θ|` must stay below `π/2`, where min-weight decoding of every row is
/// optimal. The first, middle and last grid points are re-derived by the
/// oracle and the worst term-wise deviation is reported.
pub fn single_round_sweep(variants: &[ShorVariant], thetas: &[f64]) -> Result<SweepTable> {
    const DISTANCE: usize = 3;
    let limit = std::f64::consts::FRAC_PI_2 / DISTANCE as f64;
    if let Some(bad) = thetas.iter().find(|t| !(t.abs() < limit)) {
        return Err(Error::OutOfRange(format!("θ = {bad} outside the decoder-optimal range |θ| < {limit}")));
    }
    let series = variants
        .iter()
        .map(|&variant| {
            let infidelity = thetas
                .par_iter()
                .map(|&t| Ok(shor_variant_channel(variant, DISTANCE, t)?.infidelity()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(SweepSeries { variant, infidelity })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks: Vec<usize> = if thetas.is_empty() { vec![] } else { vec![0, thetas.len() / 2, thetas.len() - 1] };
    checks.dedup();
    let mut worst = 0.0f64;
    let mut points = 0;
    for &variant in variants {
        let code = build_shor_code::<f64>(DISTANCE, variant, IonMapping::Standard)?;
        let oracle = Oracle::new(&code);
        for &i in &checks {
            let t = thetas[i];
            let simulated = oracle.channel(&vec![t; code.n_qubits])?;
            let analytic: LogicalChannel<f64> = shor_variant_channel(variant, DISTANCE, t)?;
            worst = worst.max(simulated.deviation(&analytic, 1e-9));
            points += 1;
        }
    }
    Ok(SweepTable { distance: DISTANCE, thetas: thetas.to_vec(), series, oracle_points: points, max_oracle_deviation: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_shor_code;
    use crate::noise::NoiseKind;

    fn quasi(sigma: f64, seed: u64) -> NoiseModel {
        NoiseModel::new(NoiseKind::QuasiStatic { sigma, gradient_delta: 0.0 }, seed).unwrap()
    }

    #[test]
    fn noiseless_ghz_keeps_contrast() {
        let c = ghz_ramsey(3, GhzOrder::Fm, &NoiseModel::noiseless(), &[0.0, 10.0], RunOptions::exact(4)).unwrap();
        assert!(c.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(c.stderr.iter().all(|e| *e < 1e-7));
    }

    #[test]
    fn balanced_ghz_is_immune() {
        let c = ghz_ramsey(4, GhzOrder::Afm, &quasi(0.05, 3), &[0.0, 50.0, 100.0], RunOptions::exact(50)).unwrap();
        assert!(c.values.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn larger_fm_ghz_decays_faster() {
        let m = quasi(0.01, 5);
        let t = [20.0];
        let c3 = ghz_ramsey(3, GhzOrder::Fm, &m, &t, RunOptions::exact(2000)).unwrap();
        let c5 = ghz_ramsey(5, GhzOrder::Fm, &m, &t, RunOptions::exact(2000)).unwrap();
        assert!(c5.values[0] < c3.values[0]);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(ghz_ramsey(2, GhzOrder::Fm, &NoiseModel::noiseless(), &[0.0], RunOptions::exact(0)).is_err());
    }

    #[test]
    fn noiseless_logical_curves_are_one() {
        let code = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Standard).unwrap();
        let r = logical_ramsey(&code, &NoiseModel::noiseless(), &[0.0, 30.0], RunOptions::exact(2)).unwrap();
        for c in r.curves() {
            assert!(c.values.iter().all(|v| (v - 1.0).abs() < 1e-12), "{}", c.series);
        }
    }

    #[test]
    fn raw_readout_matches_logical_rotation() {
        for variant in ShorVariant::ALL {
            let code = build_shor_code::<f64>(3, variant, IonMapping::Standard).unwrap();
            let (x, y) = raw_readout(&code).unwrap();
            assert!(x.is_hermitian() && y.is_hermitian());
            assert!((code.codeword_zero.expectation(&x).unwrap() - 1.0).abs() < 1e-12);
            // a pure logical rotation Z̄(0.3) shows up as phasor e^{0.3i}
            let rotated = code.codeword_zero.apply_pauli(&code.logical_z).unwrap();
            assert!((rotated.expectation(&x).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_readout_is_reproducible() {
        let code = build_shor_code::<f64>(3, ShorVariant::Fm, IonMapping::Standard).unwrap();
        let m = quasi(0.003, 9);
        let opts = RunOptions { shots: 40, sample_readout: true };
        let a = logical_ramsey(&code, &m, &[10.0, 40.0], opts).unwrap();
        let b = logical_ramsey(&code, &m, &[10.0, 40.0], opts).unwrap();
        assert_eq!(a, b);
        assert!(a.curves().iter().all(|c| c.values.iter().all(|v| (0.0..=1.0).contains(v))));
    }

    #[test]
    fn sweep_rejects_large_angles() {
        assert!(single_round_sweep(&ShorVariant::ALL, &[0.6]).is_err());
        let t = single_round_sweep(&ShorVariant::ALL, &[0.0, 0.1]).unwrap();
        assert!(t.series.iter().all(|s| s.infidelity[0] == 0.0));
        assert!(t.max_oracle_deviation < 1e-9);
    }
}
