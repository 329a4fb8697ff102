//! Dense state vectors and signed Pauli strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Largest register the dense simulator accepts (2^20 amplitudes).
pub const MAX_QUBITS: usize = 20;

/// Parses a bit string such as `"0101"` into per-qubit bits (qubit 0 first).
pub fn parse_bits(pattern: &str) -> Result<Vec<bool>> {
    pattern
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidPattern(pattern.to_string())),
        })
        .collect()
}

fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (q, &b)| if b { acc | (1 << q) } else { acc })
}

/// Ordering of a GHZ state: aligned (`000…`) or alternating (`0101…`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GhzOrder {
    #[serde(alias = "ferromagnetic")]
    Fm,
    #[serde(alias = "antiferromagnetic")]
    Afm,
}

impl GhzOrder {
    pub fn pattern(self, n: usize) -> Vec<bool> {
        match self {
            GhzOrder::Fm => vec![false; n],
            GhzOrder::Afm => (0..n).map(|q| q % 2 == 1).collect(),
        }
    }
}

/// Pure state of `n` qubits as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    fn check_size(n: usize) -> Result<()> {
        if n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        Ok(())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::check_size(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::OutOfRange(format!("basis index {index} for {n} qubits")));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits: n, amplitudes })
    }

    /// Basis state from a label like `"010"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let bits = parse_bits(label)?;
        Self::basis(bits.len(), bits_to_index(&bits))
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::OutOfRange(format!("amplitude count {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        Self::check_size(n)?;
        Ok(Self { n_qubits: n, amplitudes })
    }

    /// Product state with every qubit in `|+⟩` (or `|−⟩` where `minus[q]` is set).
    pub fn x_basis_product(minus: &[bool]) -> Result<Self> {
        let n = minus.len();
        Self::check_size(n)?;
        let dim = 1usize << n;
        let scale = T::one() / T::from_count(dim).sqrt();
        let minus_mask = bits_to_index(minus);
        let amplitudes = (0..dim)
            .map(|b| {
                let sign = if (b & minus_mask).count_ones() % 2 == 0 { scale } else { -scale };
                Complex::new(sign, T::zero())
            })
            .collect();
        Ok(Self { n_qubits: n, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn normalized(&self) -> Self {
        let norm = self.norm_sqr().sqrt();
        self.scaled(Complex::new(T::one() / norm, T::zero()))
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect(),
        })
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        Self::check_size(n)?;
        let lo = self.dim();
        let mut amplitudes = Vec::with_capacity(lo * other.dim());
        for b in &other.amplitudes {
            for a in &self.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self { n_qubits: n, amplitudes })
    }

    /// Equality up to a global phase, judged by `1 − |⟨ψ|φ⟩|` for unit vectors.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let overlap = self.inner(other).norm();
        let norms = (self.norm_sqr() * other.norm_sqr()).sqrt();
        (norms - overlap).abs() <= tol && (self.norm_sqr() - other.norm_sqr()).abs() <= tol
    }

    /// Largest amplitude-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        Ok(())
    }

    /// Applies `⊗_x Z(θ_x)` with `Z(θ) = exp(−iθZ/2)`.
    ///
    /// Each qubit contributes phase `e^{−iθ_x/2}` on `|0⟩` and `e^{+iθ_x/2}` on `|1⟩`.
    /// The per-basis phase is summed before exponentiation so that cancelling
    /// angles cancel exactly.
    pub fn apply_z_rotations(&self, angles: &[T]) -> Result<Self> {
        if angles.len() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: angles.len() });
        }
        let half: Vec<T> = angles.iter().map(|&a| a / T::lit(2.0)).collect();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, amp)| {
                let mut phase = T::zero();
                for (q, h) in half.iter().enumerate() {
                    if (b >> q) & 1 == 1 {
                        phase += *h;
                    } else {
                        phase -= *h;
                    }
                }
                amp * Complex::from_polar(T::one(), phase)
            })
            .collect();
        Ok(Self { n_qubits: self.n_qubits, amplitudes })
    }

    /// Applies the operator `p` (including its phase) to this state.
    pub fn apply_pauli(&self, p: &SignedPauli) -> Result<Self> {
        self.check_pauli(p)?;
        let (x_mask, z_mask) = (p.x_mask(), p.z_mask());
        let base = p.operator_phase();
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let k = (base + 2 * ((b & z_mask).count_ones() as u8 % 2)) % 4;
            amplitudes[b ^ x_mask] = amp * i_power::<T>(k);
        }
        Ok(Self { n_qubits: self.n_qubits, amplitudes })
    }

    /// `⟨ψ|P|ψ⟩` for a Hermitian signed Pauli, returned as its real part.
    pub fn expectation(&self, p: &SignedPauli) -> Result<T> {
        if !p.is_hermitian() {
            return Err(Error::NotInvolutory(p.to_string()));
        }
        let image = self.apply_pauli(p)?;
        Ok(self.inner(&image).re)
    }

    /// Applies `(I + outcome·P)/2` and returns the unnormalized result with its squared norm.
    pub fn project(&self, p: &SignedPauli, outcome: i8) -> Result<(Self, T)> {
        if outcome != 1 && outcome != -1 {
            return Err(Error::InvalidOutcome(outcome));
        }
        if !p.is_hermitian() {
            return Err(Error::NotInvolutory(p.to_string()));
        }
        let image = self.apply_pauli(p)?;
        let half = T::lit(0.5);
        let s = if outcome == 1 { half } else { -half };
        let amplitudes: Vec<_> = self
            .amplitudes
            .iter()
            .zip(&image.amplitudes)
            .map(|(a, pa)| a.scale(half) + pa.scale(s))
            .collect();
        let projected = Self { n_qubits: self.n_qubits, amplitudes };
        let prob = projected.norm_sqr();
        Ok((projected, prob))
    }

    fn check_pauli(&self, p: &SignedPauli) -> Result<()> {
        if p.len() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: p.len() });
        }
        Ok(())
    }
}

fn i_power<T: Real>(k: u8) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// `(|pattern⟩ + |complement(pattern)⟩)/√2`.
pub fn make_ghz<T: Real>(n: usize, pattern: &str) -> Result<StateVector<T>> {
    let bits = parse_bits(pattern)?;
    if n == 0 || bits.len() != n {
        return Err(Error::InvalidPattern(pattern.to_string()));
    }
    ghz_from_bits(&bits)
}

pub fn ghz_from_bits<T: Real>(bits: &[bool]) -> Result<StateVector<T>> {
    let n = bits.len();
    if n == 0 {
        return Err(Error::InvalidQubitCount(0));
    }
    StateVector::<T>::check_size(n)?;
    let idx = bits_to_index(bits);
    let comp = idx ^ ((1usize << n) - 1);
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    let h = T::FRAC_1_SQRT_2();
    amplitudes[idx] = Complex::new(h, T::zero());
    amplitudes[comp] = Complex::new(h, T::zero());
    Ok(StateVector { n_qubits: n, amplitudes })
}

/// Coherence `2·conj(a_p)·a_p̄` between the two branches of a GHZ-like state.
///
/// For `(|p⟩ + e^{iΔ}|p̄⟩)/√2` this is `e^{iΔ}`.
pub fn ghz_coherence<T: Real>(state: &StateVector<T>, pattern: &[bool]) -> Complex<T> {
    let idx = bits_to_index(pattern);
    let comp = idx ^ (state.dim() - 1);
    (state.amplitude(idx).conj() * state.amplitude(comp)).scale(T::lit(2.0))
}

/// Relative phase `Δ = arg(a_p̄) − arg(a_p)` of the two GHZ branches, in `(−π, π]`.
pub fn ghz_relative_phase<T: Real>(state: &StateVector<T>, pattern: &[bool]) -> T {
    ghz_coherence(state, pattern).arg()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self · other = i^k · result`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// A Pauli string with an overall phase `i^k`.
///
/// The stabilizers and logical operators built here only ever carry real
/// signs; the imaginary phases exist so products stay closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    phase: u8,
    letters: Vec<Pauli>,
}

impl SignedPauli {
    pub fn new(negative: bool, letters: Vec<Pauli>) -> Self {
        Self { phase: if negative { 2 } else { 0 }, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(false, vec![Pauli::I; n])
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        Self::with_letter(n, qubits, Pauli::Z)
    }

    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        Self::with_letter(n, qubits, Pauli::X)
    }

    fn with_letter(n: usize, qubits: &[usize], letter: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &q in qubits {
            letters[q] = letter;
        }
        Self::new(false, letters)
    }

    /// Z-type string from a bit mask over qubits.
    pub fn z_from_mask(n: usize, mask: usize) -> Self {
        let qubits: Vec<usize> = (0..n).filter(|q| (mask >> q) & 1 == 1).collect();
        Self::z_on(n, &qubits)
    }

    /// `i · self`.
    pub fn times_i(&self) -> Self {
        Self { phase: (self.phase + 1) % 4, letters: self.letters.clone() }
    }

    pub fn negated(&self) -> Self {
        Self { phase: (self.phase + 2) % 4, letters: self.letters.clone() }
    }

    pub fn with_sign(&self, negative: bool) -> Self {
        if negative {
            self.negated()
        } else {
            self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.letters[q] != Pauli::I).collect()
    }

    /// `Some(±1)` for real phases, `None` for `±i`.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    /// A Pauli string squares to the identity exactly when its phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn x_mask(&self) -> usize {
        self.mask(Pauli::has_x)
    }

    pub fn z_mask(&self) -> usize {
        self.mask(Pauli::has_z)
    }

    fn mask(&self, pred: fn(Pauli) -> bool) -> usize {
        self.letters
            .iter()
            .enumerate()
            .fold(0, |acc, (q, &p)| if pred(p) { acc | (1 << q) } else { acc })
    }

    /// Phase acquired when written as `i^k · X^x Z^z` (Y = iXZ).
    fn operator_phase(&self) -> u8 {
        let ys = self.letters.iter().filter(|&&p| p == Pauli::Y).count() as u8;
        (self.phase + ys) % 4
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase += k;
                p
            })
            .collect();
        Ok(Self { phase: phase % 4, letters })
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for p in &self.letters {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for SignedPauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s)
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { phase, letters })
    }
}

impl Serialize for SignedPauli {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignedPauli {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn pauli(s: &str) -> SignedPauli {
        s.parse().unwrap()
    }

    #[test]
    fn ghz_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let fm = make_ghz::<f64>(3, "000").unwrap();
        assert_eq!(fm.amplitude(0), c(h, 0.0));
        assert_eq!(fm.amplitude(7), c(h, 0.0));
        assert_abs_diff_eq!(fm.norm_sqr(), 1.0, epsilon = 1e-12);

        // |0101⟩ has qubits 1 and 3 set.
        let afm = make_ghz::<f64>(4, "0101").unwrap();
        assert_eq!(afm.amplitude(0b1010), c(h, 0.0));
        assert_eq!(afm.amplitude(0b0101), c(h, 0.0));
        assert_eq!(afm.amplitude(0b1010), afm.amplitude(0b0101));

        let plus = make_ghz::<f64>(1, "0").unwrap();
        let expected = StateVector::x_basis_product(&[false]).unwrap();
        assert!(plus.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn ghz_rejects_bad_input() {
        assert!(make_ghz::<f64>(0, "").is_err());
        assert!(make_ghz::<f64>(3, "01").is_err());
        assert!(make_ghz::<f64>(2, "0a").is_err());
    }

    #[test]
    fn z_rotation_examples() {
        let fm = make_ghz::<f64>(3, "000").unwrap();
        assert_eq!(fm.apply_z_rotations(&[0.0; 3]).unwrap(), fm);

        let theta = 0.41;
        let afm = make_ghz::<f64>(4, "0101").unwrap();
        let rotated = afm.apply_z_rotations(&[theta; 4]).unwrap();
        assert!(rotated.max_abs_diff(&afm) < 1e-15);

        let rotated = fm.apply_z_rotations(&[theta; 3]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a0 = Complex::from_polar(h, -1.5 * theta);
        let a7 = Complex::from_polar(h, 1.5 * theta);
        assert!((rotated.amplitude(0) - a0).norm() < 1e-14);
        assert!((rotated.amplitude(7) - a7).norm() < 1e-14);
        let coh = ghz_coherence(&rotated, &[false; 3]);
        assert_abs_diff_eq!(coh.arg(), 3.0 * theta, epsilon = 1e-14);
    }

    #[test]
    fn rotation_length_mismatch() {
        let s = make_ghz::<f64>(3, "000").unwrap();
        assert!(matches!(s.apply_z_rotations(&[0.1; 2]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn expectation_examples() {
        let plus = StateVector::<f64>::x_basis_product(&[false]).unwrap();
        assert_abs_diff_eq!(plus.expectation(&pauli("X")).unwrap(), 1.0, epsilon = 1e-15);

        let fm = make_ghz::<f64>(3, "000").unwrap();
        assert_abs_diff_eq!(fm.expectation(&pauli("ZZI")).unwrap(), 1.0, epsilon = 1e-15);

        let afm = make_ghz::<f64>(3, "010").unwrap();
        assert_abs_diff_eq!(afm.expectation(&pauli("-ZZI")).unwrap(), 1.0, epsilon = 1e-15);
        assert!(afm.expectation(&pauli("ZZZZ")).is_err());
        assert!(afm.expectation(&pauli("+iZZI")).is_err());
    }

    #[test]
    fn projection_examples() {
        let plus = StateVector::<f64>::x_basis_product(&[false]).unwrap();
        let (proj, p) = plus.project(&pauli("X"), 1).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
        assert!(proj.max_abs_diff(&plus) < 1e-15);

        let zero = StateVector::<f64>::from_label("0").unwrap();
        let (proj, p) = zero.project(&pauli("X"), 1).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert!(proj.max_abs_diff(&plus.scaled(c(std::f64::consts::FRAC_1_SQRT_2, 0.0))) < 1e-15);

        assert!(matches!(zero.project(&pauli("+iX"), 1), Err(Error::NotInvolutory(_))));
        assert!(matches!(zero.project(&pauli("X"), 0), Err(Error::InvalidOutcome(0))));
    }

    /// Sequential projection of Z(θ)^⊗3|+++⟩ onto the syndrome where only the
    /// second repetition-code generator fires: the surviving amplitude is the
    /// IIZ term plus the ZZI term.
    #[test]
    fn sequential_projection_matches_two_error_expansion() {
        let theta: f64 = 0.53;
        let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let alpha = c(0.0, -sn) * cs * cs;
        let beta = c(0.0, -sn) * c(0.0, -sn) * cs;
        let expected = alpha.norm_sqr() + beta.norm_sqr();

        let s = StateVector::<f64>::x_basis_product(&[false; 3]).unwrap();
        let s = s.apply_z_rotations(&[theta; 3]).unwrap();
        let (s, _) = s.project(&pauli("XXI"), 1).unwrap();
        let (_, p) = s.project(&pauli("IXX"), -1).unwrap();
        assert_abs_diff_eq!(p, expected, epsilon = 1e-14);
    }

    #[test]
    fn pauli_algebra() {
        let xz = pauli("X").mul(&pauli("Z")).unwrap();
        assert_eq!(xz, pauli("-iY"));
        let y = pauli("Y");
        assert_eq!(y.mul(&y).unwrap(), pauli("I"));
        assert!(pauli("XX").commutes_with(&pauli("ZZ")));
        assert!(!pauli("XI").commutes_with(&pauli("ZZ")));
        assert_eq!(pauli("-XIZ").weight(), 2);
        assert_eq!(pauli("-XIZ").sign(), Some(-1));
        assert_eq!(pauli("+iX").sign(), None);
        assert_eq!(pauli("-ZZI").to_string(), "-ZZI");
        assert!("XQ".parse::<SignedPauli>().is_err());
    }

    #[test]
    fn y_action_matches_definition() {
        let zero = StateVector::<f64>::from_label("0").unwrap();
        let y0 = zero.apply_pauli(&pauli("Y")).unwrap();
        assert_eq!(y0.amplitude(1), c(0.0, 1.0));
        let one = StateVector::<f64>::from_label("1").unwrap();
        let y1 = one.apply_pauli(&pauli("Y")).unwrap();
        assert_eq!(y1.amplitude(0), c(0.0, -1.0));
    }

    #[test]
    fn works_in_single_precision() {
        let s = make_ghz::<f32>(3, "010").unwrap();
        let r = s.apply_z_rotations(&[0.2f32; 3]).unwrap();
        assert!((r.norm_sqr() - 1.0).abs() < 1e-6);
        assert!((r.expectation(&pauli("-IZZ")).unwrap() - 1.0).abs() < 1e-6);
    }

    fn random_state(n: usize, seed: &[f64]) -> StateVector<f64> {
        let amps: Vec<_> = (0..1 << n).map(|i| c(seed[2 * i], seed[2 * i + 1])).collect();
        StateVector::from_amplitudes(amps).unwrap().normalized()
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = SignedPauli> {
        (any::<bool>(), prop::collection::vec(0u8..4, n)).prop_map(|(neg, ls)| {
            let letters = ls
                .into_iter()
                .map(|l| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l as usize])
                .collect();
            SignedPauli::new(neg, letters)
        })
    }

    proptest! {
        #[test]
        fn rotations_preserve_norm_and_compose(
            amps in prop::collection::vec(-1.0f64..1.0, 16),
            a in prop::collection::vec(-3.0f64..3.0, 3),
            b in prop::collection::vec(-3.0f64..3.0, 3),
        ) {
            prop_assume!(amps.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let s = random_state(3, &amps);
            let ra = s.apply_z_rotations(&a).unwrap();
            prop_assert!((ra.norm_sqr() - 1.0).abs() < 1e-12);
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let once = s.apply_z_rotations(&sum).unwrap();
            let twice = ra.apply_z_rotations(&b).unwrap();
            prop_assert!(once.approx_eq_up_to_phase(&twice, 1e-12));
        }

        #[test]
        fn projection_outcomes_are_complete(
            amps in prop::collection::vec(-1.0f64..1.0, 16),
            p in arb_pauli(3),
        ) {
            prop_assume!(amps.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let s = random_state(3, &amps);
            let (_, plus) = s.project(&p, 1).unwrap();
            let (_, minus) = s.project(&p, -1).unwrap();
            prop_assert!((plus + minus - 1.0).abs() < 1e-12);
            let e = s.expectation(&p).unwrap();
            prop_assert!((plus - minus - e).abs() < 1e-12);
        }

        #[test]
        fn ghz_is_stabilized_by_signed_neighbours(bits in prop::collection::vec(any::<bool>(), 1..8)) {
            let n = bits.len();
            let s = ghz_from_bits::<f64>(&bits).unwrap();
            for x in 0..n.saturating_sub(1) {
                let zz = SignedPauli::z_on(n, &[x, x + 1]).with_sign(bits[x] ^ bits[x + 1]);
                prop_assert!((s.expectation(&zz).unwrap() - 1.0).abs() < 1e-12);
            }
            let all_x = SignedPauli::x_on(n, &(0..n).collect::<Vec<_>>());
            prop_assert!((s.expectation(&all_x).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn products_stay_closed(p in arb_pauli(4), q in arb_pauli(4)) {
            let pq = p.mul(&q).unwrap();
            let qp = q.mul(&p).unwrap();
            if p.commutes_with(&q) {
                prop_assert_eq!(pq, qp);
            } else {
                prop_assert_eq!(pq, qp.negated());
            }
        }
    }
}
