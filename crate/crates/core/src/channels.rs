//! Closed-form logical channels.
//!
//! A [`LogicalChannel`] is a mixture `Σ_s P_s · Z̄(θ_s) ρ Z̄(θ_s)†` of rotations
//! about the code's logical Z. Angles live in `(−π, π]`; rotations that differ
//! by `2π` are the same channel.
//!
//! The scalar error metric is [`channel_infidelity`], `Σ_s P_s sin²(θ_s/2)`:
//! the probability that a logical-X-basis readout after one round comes out
//! flipped.

use serde::{Deserialize, Serialize};

use crate::codes::{CodeSpec, ShorVariant};
use crate::error::{Error, Result};
use crate::real::{wrap_angle, Real};

/// Angle tolerance used when merging terms of a freshly built channel.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelTerm<T> {
    #[serde(rename = "p")]
    pub probability: T,
    #[serde(rename = "theta")]
    pub angle: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LogicalChannel<T> {
    terms: Vec<ChannelTerm<T>>,
}

impl<T: Real> LogicalChannel<T> {
    /// Canonical channel: angles wrapped, sorted, equal angles merged.
    pub fn from_terms(terms: impl IntoIterator<Item = (T, T)>) -> Self {
        Self::merged(terms, T::lit(MERGE_TOLERANCE))
    }

    pub fn merged(terms: impl IntoIterator<Item = (T, T)>, tol: T) -> Self {
        let mut raw: Vec<ChannelTerm<T>> = terms
            .into_iter()
            .map(|(p, a)| ChannelTerm { probability: p, angle: wrap_angle(a) })
            .collect();
        raw.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap_or(std::cmp::Ordering::Equal));
        let mut out: Vec<ChannelTerm<T>> = Vec::with_capacity(raw.len());
        for t in raw {
            match out.last_mut() {
                Some(last) if (t.angle - last.angle).abs() <= tol => last.probability += t.probability,
                _ => out.push(t),
            }
        }
        // −π+ε and π are neighbours on the circle
        if out.len() > 1 {
            let two_pi = T::PI() + T::PI();
            let (first, last) = (out[0], out[out.len() - 1]);
            if (first.angle + two_pi - last.angle).abs() <= tol {
                let n = out.len();
                out[n - 1].probability += first.probability;
                out.remove(0);
            }
        }
        Self { terms: out }
    }

    pub fn identity() -> Self {
        Self { terms: vec![ChannelTerm { probability: T::one(), angle: T::zero() }] }
    }

    pub fn terms(&self) -> &[ChannelTerm<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_probability(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.probability)
    }

    pub fn infidelity(&self) -> T {
        channel_infidelity(self)
    }

    /// Expected logical Bloch phasor `Σ P_s e^{iθ_s}` after the channel acts on
    /// the `+1` eigenstate of logical X.
    pub fn phasor(&self) -> num_complex::Complex<T> {
        self.terms.iter().fold(num_complex::Complex::new(T::zero(), T::zero()), |acc, t| {
            acc + num_complex::Complex::from_polar(t.probability, t.angle)
        })
    }

    /// Largest term-wise deviation after merging both channels at `tol`.
    ///
    /// Terms are paired by angle (within `tol`); a term without a partner
    /// contributes its own probability.
    pub fn deviation(&self, other: &Self, tol: T) -> T {
        let a = Self::merged(self.terms.iter().map(|t| (t.probability, t.angle)), tol);
        let b = Self::merged(other.terms.iter().map(|t| (t.probability, t.angle)), tol);
        let mut worst = T::zero();
        let mut used = vec![false; b.terms.len()];
        for ta in &a.terms {
            let partner = b.terms.iter().enumerate().find(|(j, tb)| {
                !used[*j] && wrap_angle(ta.angle - tb.angle).abs() <= tol
            });
            match partner {
                Some((j, tb)) => {
                    used[j] = true;
                    worst = worst
                        .max((ta.probability - tb.probability).abs())
                        .max(wrap_angle(ta.angle - tb.angle).abs());
                }
                None => worst = worst.max(ta.probability),
            }
        }
        for (j, tb) in b.terms.iter().enumerate() {
            if !used[j] {
                worst = worst.max(tb.probability);
            }
        }
        worst
    }
}

/// Channel plus the parameters it was built from, for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport<T> {
    pub constructor: String,
    pub n: usize,
    pub theta: T,
    pub infidelity: T,
    pub total_probability: T,
    pub terms: LogicalChannel<T>,
}

impl<T: Real> ChannelReport<T> {
    pub fn new(constructor: impl Into<String>, n: usize, theta: T, channel: LogicalChannel<T>) -> Self {
        Self {
            constructor: constructor.into(),
            n,
            theta,
            infidelity: channel.infidelity(),
            total_probability: channel.total_probability(),
            terms: channel,
        }
    }
}

fn check_odd(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::OutOfRange(format!("distance {n} must be odd")));
    }
    Ok(())
}

fn check_weight(n: usize, w: usize) -> Result<()> {
    check_odd(n)?;
    if w > (n - 1) / 2 {
        return Err(Error::OutOfRange(format!("weight {w} exceeds (n-1)/2 for n = {n}")));
    }
    Ok(())
}

fn check_angle<T: Real>(theta: T) -> Result<()> {
    if !(theta.abs() < T::PI()) {
        return Err(Error::OutOfRange(format!("|θ| = {} must be below π", theta.abs())));
    }
    Ok(())
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| acc * T::from_count(n - i) / T::from_count(i + 1))
}

/// Probability that the syndrome points at a correctable error of weight `w`:
/// `C(n,w)·[(cos^{n−w} sin^w)² + (cos^w sin^{n−w})²]` at half-angle `θ/2`.
pub fn p_nw<T: Real>(n: usize, w: usize, theta: T) -> Result<T> {
    check_weight(n, w)?;
    let half = theta / T::lit(2.0);
    let (c, s) = (half.cos(), half.sin());
    let lo = c.powi((n - w) as i32) * s.powi(w as i32);
    let hi = c.powi(w as i32) * s.powi((n - w) as i32);
    Ok(binomial::<T>(n, w) * (lo * lo + hi * hi))
}

/// Logical rotation angle for that weight class:
/// `(−1)^{(n−2w−1)/2} · 2·arctan(tan^{n−2w}(θ/2))`.
pub fn theta_nw<T: Real>(n: usize, w: usize, theta: T) -> Result<T> {
    check_weight(n, w)?;
    check_angle(theta)?;
    let m = n - 2 * w;
    let magnitude = T::lit(2.0) * (theta / T::lit(2.0)).tan().powi(m as i32).atan();
    Ok(if ((m - 1) / 2) % 2 == 0 { magnitude } else { -magnitude })
}

/// Logical channel of the `n`-bit repetition code after one round of
/// min-weight correction: one term per correctable weight.
pub fn repetition_channel<T: Real>(n: usize, theta: T) -> Result<LogicalChannel<T>> {
    check_odd(n)?;
    check_angle(theta)?;
    let terms = (0..=(n - 1) / 2)
        .map(|w| Ok((p_nw(n, w, theta)?, theta_nw(n, w, theta)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LogicalChannel::from_terms(terms))
}

/// Standard (ferromagnetic) Shor code of distance `n`.
///
/// All rotations on a row add up, so the outer repetition code sees physical
/// angle `nθ`: this is `repetition_channel(n, nθ)`, i.e. `θ_{n,w}` evaluated at
/// `nθ` (not `n·θ_{n,w}(θ)`), which is what direct simulation produces.
pub fn fm_shor_channel<T: Real>(n: usize, theta: T) -> Result<LogicalChannel<T>> {
    check_odd(n)?;
    let scaled = T::from_count(n) * theta;
    if !(scaled.abs() < T::PI()) {
        return Err(Error::OutOfRange(format!("|nθ| = {} must be below π", scaled.abs())));
    }
    repetition_channel(n, scaled)
}

/// Anti-ferromagnetic Shor code: for odd `n` one uncancelled rotation per row
/// remains, giving the plain repetition channel; even `n` cancels completely.
pub fn afm_shor_channel<T: Real>(n: usize, theta: T) -> Result<LogicalChannel<T>> {
    if n == 0 {
        return Err(Error::OutOfRange("distance 0".into()));
    }
    if n % 2 == 0 {
        return Ok(LogicalChannel::identity());
    }
    repetition_channel(n, theta)
}

/// Basis-swapped Shor code: each of the `n` rows is an independent `n`-bit
/// repetition code and the row rotations add on the logical qubit. With
/// `alternating`, the negated coupling generators flip the sign of every odd row.
pub fn swapped_basis_channel<T: Real>(n: usize, theta: T, alternating: bool) -> Result<LogicalChannel<T>> {
    check_odd(n)?;
    check_angle(theta)?;
    let classes = (n - 1) / 2 + 1;
    let per_row: Vec<(T, T)> = (0..classes)
        .map(|w| Ok((p_nw(n, w, theta)?, theta_nw(n, w, theta)?)))
        .collect::<Result<_>>()?;
    let mut terms = vec![(T::one(), T::zero())];
    for row in 0..n {
        let sign = if alternating && row % 2 == 1 { -T::one() } else { T::one() };
        let mut next = Vec::with_capacity(terms.len() * classes);
        for &(p, a) in &terms {
            for &(pw, aw) in &per_row {
                next.push((p * pw, a + sign * aw));
            }
        }
        terms = next;
    }
    Ok(LogicalChannel::from_terms(terms))
}

/// Closed-form channel for one of the four Shor variants.
pub fn shor_variant_channel<T: Real>(variant: ShorVariant, n: usize, theta: T) -> Result<LogicalChannel<T>> {
    match variant {
        ShorVariant::Fm => fm_shor_channel(n, theta),
        ShorVariant::Afm => afm_shor_channel(n, theta),
        ShorVariant::SwappedPlus => swapped_basis_channel(n, theta, false),
        ShorVariant::SwappedMinus => swapped_basis_channel(n, theta, true),
    }
}

pub fn channel_infidelity<T: Real>(channel: &LogicalChannel<T>) -> T {
    channel.terms.iter().fold(T::zero(), |acc, t| {
        let s = (t.angle / T::lit(2.0)).sin();
        acc + t.probability * s * s
    })
}

/// Relative phase each GHZ row accumulates under `θ_x = θ₀ + x·δ`, where `x`
/// is the ion position: `Σ_{q in row} (−1)^{p_q} θ_{x_q}`.
pub fn gradient_phases<T: Real>(code: &CodeSpec<T>, theta0: T, delta: T) -> Result<Vec<T>> {
    if code.rows.is_empty() {
        return Err(Error::NoRowStructure);
    }
    Ok(code
        .rows
        .iter()
        .map(|row| {
            row.qubits.iter().zip(&row.pattern).fold(T::zero(), |acc, (&q, &bit)| {
                let angle = theta0 + T::lit(code.positions[q] as f64) * delta;
                if bit {
                    acc - angle
                } else {
                    acc + angle
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_repetition_code, build_shor_code, IonMapping, ShorVariant};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn p_nw_examples() {
        assert_abs_diff_eq!(p_nw(3, 0, 0.0f64).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p_nw(3, 1, PI / 2.0).unwrap(), 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(p_nw(3, 0, PI / 2.0).unwrap(), 0.25, epsilon = 1e-14);
        assert!(p_nw(3, 2, 0.1f64).is_err());
        assert!(p_nw(4, 0, 0.1f64).is_err());
    }

    #[test]
    fn p_nw_sums_to_one() {
        for n in [3usize, 5, 7] {
            for &theta in &[-2.9f64, -0.7, 0.013, 0.4, 1.9, 3.1] {
                let total: f64 = (0..=(n - 1) / 2).map(|w| p_nw(n, w, theta).unwrap()).sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn theta_nw_examples() {
        for &t in &[-3.0f64, -1.0, -0.2, 0.0, 0.5, 2.5, 3.1] {
            assert_abs_diff_eq!(theta_nw(3, 1, t).unwrap(), t, epsilon = 1e-12);
        }
        assert_eq!(theta_nw(3, 1, 0.0f64).unwrap(), 0.0);
        let v = theta_nw(3, 0, 0.2f64).unwrap();
        assert_abs_diff_eq!(v, -2.0 * (0.1f64.tan().powi(3)).atan(), epsilon = 1e-15);
        // leading order −θ³/4, next correction is O(θ⁵)
        assert!((v + 0.2f64.powi(3) / 4.0).abs() < 0.2f64.powi(5));
        assert!(theta_nw(3, 1, PI).is_err());
        assert!(theta_nw(3, 1, -PI).is_err());
    }

    #[test]
    fn repetition_channel_shapes() {
        let one = repetition_channel(1, 0.37f64).unwrap();
        assert_eq!(one.terms(), &[ChannelTerm { probability: 1.0, angle: 0.37 }]);
        let three = repetition_channel(3, 0.3f64).unwrap();
        assert_eq!(three.len(), 2);
        assert!(repetition_channel(4, 0.3f64).is_err());
    }

    #[test]
    fn fm_domain_and_identity() {
        assert_eq!(fm_shor_channel(3, 0.0f64).unwrap(), LogicalChannel::identity());
        assert!(fm_shor_channel(3, 1.05f64).is_err());
        let fm = fm_shor_channel(3, 0.2f64).unwrap();
        assert!(fm.deviation(&repetition_channel(3, 0.6f64).unwrap(), 1e-12) < 1e-15);
    }

    #[test]
    fn afm_matches_repetition_and_even_cancels() {
        assert_eq!(afm_shor_channel(3, 0.2f64).unwrap(), repetition_channel(3, 0.2).unwrap());
        assert_eq!(afm_shor_channel(2, 0.9f64).unwrap(), LogicalChannel::identity());
        assert_eq!(afm_shor_channel(4, 0.9f64).unwrap().infidelity(), 0.0);
    }

    #[test]
    fn swapped_variants() {
        assert_eq!(swapped_basis_channel(3, 0.0f64, false).unwrap(), LogicalChannel::identity());
        assert_eq!(swapped_basis_channel(3, 0.0f64, true).unwrap(), LogicalChannel::identity());
        let plain = swapped_basis_channel(3, 0.3f64, false).unwrap();
        let alt = swapped_basis_channel(3, 0.3f64, true).unwrap();
        assert!(alt.infidelity() < plain.infidelity());
        assert_abs_diff_eq!(plain.total_probability(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(alt.total_probability(), 1.0, epsilon = 1e-12);
    }

    /// Independent route: enumerate all 3^3 weight-class triples by hand and
    /// compare against the constructor.
    #[test]
    fn swapped_channel_matches_explicit_triple_sum() {
        let theta = 0.45f64;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let probs = [c.powi(6) + s.powi(6), 3.0 * (c.powi(4) * s * s + c * c * s.powi(4))];
        let angles = [-2.0 * ((s / c).powi(3)).atan(), theta];
        let mut inf = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for d in 0..2 {
                    let p = probs[a] * probs[b] * probs[d];
                    let ang = angles[a] - angles[b] + angles[d];
                    inf += p * (ang / 2.0).sin().powi(2);
                }
            }
        }
        let ch = swapped_basis_channel(3, theta, true).unwrap();
        assert_abs_diff_eq!(ch.infidelity(), inf, epsilon = 1e-14);
    }

    #[test]
    fn infidelity_examples() {
        assert_eq!(channel_infidelity(&LogicalChannel::<f64>::identity()), 0.0);
        let flip = LogicalChannel::from_terms([(1.0f64, PI)]);
        assert_abs_diff_eq!(flip.infidelity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fm_to_afm_ratio_near_81() {
        let fm = fm_shor_channel(3, 0.01f64).unwrap().infidelity();
        let afm = afm_shor_channel(3, 0.01f64).unwrap().infidelity();
        assert!((fm / afm / 81.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn repetition_improves_with_distance() {
        let i3 = repetition_channel(3, 0.1f64).unwrap().infidelity();
        let i5 = repetition_channel(5, 0.1f64).unwrap().infidelity();
        assert!(i5 < i3);
    }

    #[test]
    fn infidelity_even_and_increasing() {
        type Ctor = fn(f64) -> LogicalChannel<f64>;
        let ctors: [Ctor; 5] = [
            |t| repetition_channel(3, t).unwrap(),
            |t| fm_shor_channel(3, t).unwrap(),
            |t| afm_shor_channel(3, t).unwrap(),
            |t| swapped_basis_channel(3, t, false).unwrap(),
            |t| swapped_basis_channel(3, t, true).unwrap(),
        ];
        for ctor in ctors {
            let mut prev = 0.0;
            for i in 1..=30 {
                let t = 0.01 * i as f64;
                let v = ctor(t).infidelity();
                assert_abs_diff_eq!(v, ctor(-t).infidelity(), epsilon = 1e-15);
                assert!(v > prev, "not increasing at {t}");
                prev = v;
            }
        }
    }

    #[test]
    fn merging_and_wrapping() {
        let ch = LogicalChannel::from_terms([(0.25f64, 0.1), (0.25, 0.1 + 1e-14), (0.5, 0.1 + 2.0 * PI)]);
        assert_eq!(ch.len(), 1);
        assert_abs_diff_eq!(ch.terms()[0].probability, 1.0, epsilon = 1e-15);
        let edge = LogicalChannel::from_terms([(0.5f64, PI), (0.5, -PI + 1e-13)]);
        assert_eq!(edge.len(), 1);
    }

    #[test]
    fn deviation_pairs_terms() {
        let a = LogicalChannel::from_terms([(0.9f64, 0.0), (0.1, 0.3)]);
        let b = LogicalChannel::from_terms([(0.9f64, 1e-11), (0.1 - 1e-11, 0.3)]);
        assert!(a.deviation(&b, 1e-9) < 1e-10);
        let c = LogicalChannel::from_terms([(1.0f64, 0.0)]);
        assert_abs_diff_eq!(a.deviation(&c, 1e-9), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn gradient_phase_examples() {
        let (t0, d) = (0.3f64, 0.02f64);
        let fm = build_shor_code::<f64>(3, ShorVariant::Fm, IonMapping::Standard).unwrap();
        let p = gradient_phases(&fm, t0, d).unwrap();
        let want = [3.0 * t0 - 15.0 * d, 3.0 * t0, 3.0 * t0 + 15.0 * d];
        for (a, b) in p.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let afm = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Standard).unwrap();
        let p = gradient_phases(&afm, t0, d).unwrap();
        let want = [t0 - 5.0 * d, t0, t0 + 5.0 * d];
        for (a, b) in p.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let centre = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Center0M2P2).unwrap();
        assert_abs_diff_eq!(gradient_phases(&centre, t0, d).unwrap()[1], t0 + 4.0 * d, epsilon = 1e-14);
        let fm_centre = build_shor_code::<f64>(3, ShorVariant::Fm, IonMapping::Center0M2P2).unwrap();
        assert_abs_diff_eq!(gradient_phases(&fm_centre, t0, d).unwrap()[1], 3.0 * t0, epsilon = 1e-14);

        let rep = build_repetition_code::<f64>(3).unwrap();
        assert_eq!(gradient_phases(&rep, t0, d), Err(Error::NoRowStructure));
    }

    #[test]
    fn report_json_shape() {
        let ch = repetition_channel(3, 0.2f64).unwrap();
        let r = ChannelReport::new("repetition", 3, 0.2, ch);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["constructor"], "repetition");
        assert!(v["terms"][0]["p"].is_number());
        assert!(v["terms"][0]["theta"].is_number());
    }

    #[test]
    fn single_precision_channels() {
        let ch = repetition_channel(3, 0.3f32).unwrap();
        assert!((ch.total_probability() - 1.0).abs() < 1e-6);
    }
}
