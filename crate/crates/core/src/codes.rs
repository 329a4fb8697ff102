//! Repetition codes and the four sign/basis variants of Shor's code.
//!
//! Every code is built so that `codeword_zero` is the `+1` eigenstate of
//! `logical_x` and `codeword_one = logical_z · codeword_zero`. Coherent
//! Z-rotations followed by min-weight correction reduce to a rotation about
//! `logical_z` on this pair.
//!
//! Generator order is row-major: for Shor codes the weight-2 row generators
//! come first (row 0 left to right, then row 1, …), followed by the
//! weight-`2n` generators coupling row `r` to row `r + 1`. A syndrome lists one
//! `±1` outcome per generator in that order. The familiar label "01" for the
//! 3-bit repetition code (first generator satisfied, second violated) is
//! `Syndrome([+1, -1])`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{ghz_from_bits, GhzOrder, SignedPauli, StateVector};
use crate::real::Real;

/// Ordered list of `±1` generator outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome(pub Vec<i8>);

impl Syndrome {
    pub fn trivial(len: usize) -> Self {
        Syndrome(vec![1; len])
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&b| b == 1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 1 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShorVariant {
    /// `+Z_iZ_{i+1}` rows, rows in `(|00…⟩+|11…⟩)/√2`.
    Fm,
    /// `−Z_iZ_{i+1}` rows, rows in `(|0101…⟩+|1010…⟩)/√2`.
    Afm,
    /// Bases swapped: `X_iX_{i+1}` rows, positive weight-`2n` Z generators.
    SwappedPlus,
    /// Bases swapped with negated weight-`2n` Z generators.
    SwappedMinus,
}

impl ShorVariant {
    pub const ALL: [ShorVariant; 4] =
        [ShorVariant::Fm, ShorVariant::Afm, ShorVariant::SwappedPlus, ShorVariant::SwappedMinus];

    pub fn name(self) -> &'static str {
        match self {
            ShorVariant::Fm => "fm",
            ShorVariant::Afm => "afm",
            ShorVariant::SwappedPlus => "swapped-plus",
            ShorVariant::SwappedMinus => "swapped-minus",
        }
    }
}

impl std::str::FromStr for ShorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fm" | "ferromagnetic" => Ok(ShorVariant::Fm),
            "afm" | "antiferromagnetic" | "anti-ferromagnetic" => Ok(ShorVariant::Afm),
            "swapped-plus" | "swapped_plus" | "plus" => Ok(ShorVariant::SwappedPlus),
            "swapped-minus" | "swapped_minus" | "minus" => Ok(ShorVariant::SwappedMinus),
            _ => Err(Error::UnsupportedCode(format!("unknown Shor variant `{s}`"))),
        }
    }
}

/// Ion-chain placement of the code qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IonMapping {
    /// Rows on `{−6,−5,−4}`, `{−2,0,2}`, `{4,5,6}` for distance 3; consecutive
    /// centred positions otherwise.
    #[default]
    Standard,
    /// Distance 3 only: centre row remapped to `{0,−2,2}`.
    #[serde(rename = "center-0-m2-p2")]
    Center0M2P2,
}

impl std::str::FromStr for IonMapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(IonMapping::Standard),
            "center-0-m2-p2" | "center" | "0,-2,2" => Ok(IonMapping::Center0M2P2),
            _ => Err(Error::UnsupportedCode(format!("unknown mapping `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum CodeFamily {
    Repetition,
    Shor { variant: ShorVariant, mapping: IonMapping },
}

/// One GHZ row of an FM/AFM Shor code: its qubits (left to right) and the
/// bit pattern of the `|p⟩` branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhzRow {
    pub qubits: Vec<usize>,
    pub pattern: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct CodeSpec<T> {
    pub family: CodeFamily,
    pub distance: usize,
    pub n_qubits: usize,
    pub generators: Vec<SignedPauli>,
    pub logical_z: SignedPauli,
    pub logical_x: SignedPauli,
    pub codeword_zero: StateVector<T>,
    pub codeword_one: StateVector<T>,
    pub positions: Vec<i32>,
    pub rows: Vec<GhzRow>,
}

/// JSON-facing summary of a code (codewords omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDocument {
    #[serde(flatten)]
    pub family: CodeFamily,
    pub distance: usize,
    pub n_qubits: usize,
    pub generators: Vec<SignedPauli>,
    pub logical_z: SignedPauli,
    pub logical_x: SignedPauli,
    pub positions: Vec<i32>,
    pub rows: Vec<GhzRow>,
}

impl<T: Real> CodeSpec<T> {
    pub fn document(&self) -> CodeDocument {
        CodeDocument {
            family: self.family,
            distance: self.distance,
            n_qubits: self.n_qubits,
            generators: self.generators.clone(),
            logical_z: self.logical_z.clone(),
            logical_x: self.logical_x.clone(),
            positions: self.positions.clone(),
            rows: self.rows.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self.family {
            CodeFamily::Repetition => format!("repetition-{}", self.distance),
            CodeFamily::Shor { variant, .. } => format!("{}-{}", variant.name(), self.distance),
        }
    }

    /// Checks the structural invariants: commuting generators, stabilized
    /// codewords, valid logical pair, distinct positions.
    pub fn validate(&self, tol: T) -> Result<()> {
        let bad = |msg: String| Err(Error::UnsupportedCode(msg));
        for (i, g) in self.generators.iter().enumerate() {
            for h in &self.generators[i + 1..] {
                if !g.commutes_with(h) {
                    return bad(format!("generators {g} and {h} anticommute"));
                }
            }
            for cw in [&self.codeword_zero, &self.codeword_one] {
                let e = cw.expectation(g)?;
                if (e - T::one()).abs() > tol {
                    return bad(format!("codeword not stabilized by {g} (⟨g⟩ = {e})"));
                }
            }
            if !self.logical_z.commutes_with(g) || !self.logical_x.commutes_with(g) {
                return bad(format!("logical operator fails to commute with {g}"));
            }
        }
        if self.logical_z.commutes_with(&self.logical_x) {
            return bad("logical operators commute".into());
        }
        if self.positions.len() != self.n_qubits {
            return bad("position count differs from qubit count".into());
        }
        let mut sorted = self.positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.positions.len() {
            return bad("ion positions are not distinct".into());
        }
        Ok(())
    }
}

fn centered_positions(n: usize) -> Vec<i32> {
    let half = (n / 2) as i32;
    (0..n as i32).map(|i| i - half).collect()
}

/// Rotated `n`-bit repetition code: generators `X_iX_{i+1}`, codewords `|±⟩^⊗n`,
/// `logical_z = Z^⊗n`, `logical_x = X_0`.
///
/// Even `n` is accepted; decoding such a code only detects weight-`n/2` errors.
pub fn build_repetition_code<T: Real>(n: usize) -> Result<CodeSpec<T>> {
    if n < 1 {
        return Err(Error::InvalidQubitCount(n));
    }
    let generators = (0..n - 1).map(|i| SignedPauli::x_on(n, &[i, i + 1])).collect();
    let all: Vec<usize> = (0..n).collect();
    let logical_z = SignedPauli::z_on(n, &all);
    let codeword_zero = StateVector::x_basis_product(&vec![false; n])?;
    let codeword_one = codeword_zero.apply_pauli(&logical_z)?;
    Ok(CodeSpec {
        family: CodeFamily::Repetition,
        distance: n,
        n_qubits: n,
        generators,
        logical_z,
        logical_x: SignedPauli::x_on(n, &[0]),
        codeword_zero,
        codeword_one,
        positions: centered_positions(n),
        rows: Vec::new(),
    })
}

/// `n × n` Shor code in one of the four variants. Qubit `r·n + c` is column
/// `c` of row `r`.
pub fn build_shor_code<T: Real>(
    n: usize,
    variant: ShorVariant,
    mapping: IonMapping,
) -> Result<CodeSpec<T>> {
    if n < 2 {
        return Err(Error::UnsupportedCode(format!("Shor distance {n} < 2")));
    }
    if mapping == IonMapping::Center0M2P2 && n != 3 {
        return Err(Error::UnsupportedCode("the {0,-2,2} centre mapping needs distance 3".into()));
    }
    let total = n * n;
    if total > crate::quantum::MAX_QUBITS {
        return Err(Error::InvalidQubitCount(total));
    }
    let row_qubits = |r: usize| -> Vec<usize> { (r * n..(r + 1) * n).collect() };
    let positions = match (n, mapping) {
        (3, IonMapping::Standard) => vec![-6, -5, -4, -2, 0, 2, 4, 5, 6],
        (3, IonMapping::Center0M2P2) => vec![-6, -5, -4, 0, -2, 2, 4, 5, 6],
        _ => centered_positions(total),
    };
    let family = CodeFamily::Shor { variant, mapping };

    match variant {
        ShorVariant::Fm | ShorVariant::Afm => {
            let order = if variant == ShorVariant::Fm { GhzOrder::Fm } else { GhzOrder::Afm };
            let pattern = order.pattern(n);
            let mut generators = Vec::new();
            for r in 0..n {
                for c in 0..n - 1 {
                    let q = r * n + c;
                    let negative = pattern[c] ^ pattern[c + 1];
                    generators.push(SignedPauli::z_on(total, &[q, q + 1]).with_sign(negative));
                }
            }
            for r in 0..n - 1 {
                let mut support = row_qubits(r);
                support.extend(row_qubits(r + 1));
                generators.push(SignedPauli::x_on(total, &support));
            }
            let firsts: Vec<usize> = (0..n).map(|r| r * n).collect();
            let logical_z = SignedPauli::z_on(total, &firsts);
            let logical_x = SignedPauli::x_on(total, &row_qubits(0));

            let row_state = ghz_from_bits::<T>(&pattern)?;
            let mut codeword_zero = row_state.clone();
            for _ in 1..n {
                codeword_zero = codeword_zero.tensor(&row_state)?;
            }
            let codeword_one = codeword_zero.apply_pauli(&logical_z)?;
            let rows = (0..n).map(|r| GhzRow { qubits: row_qubits(r), pattern: pattern.clone() }).collect();
            Ok(CodeSpec {
                family,
                distance: n,
                n_qubits: total,
                generators,
                logical_z,
                logical_x,
                codeword_zero,
                codeword_one,
                positions,
                rows,
            })
        }
        ShorVariant::SwappedPlus | ShorVariant::SwappedMinus => {
            let negative = variant == ShorVariant::SwappedMinus;
            let mut generators = Vec::new();
            for r in 0..n {
                for c in 0..n - 1 {
                    let q = r * n + c;
                    generators.push(SignedPauli::x_on(total, &[q, q + 1]));
                }
            }
            for r in 0..n - 1 {
                let mut support = row_qubits(r);
                support.extend(row_qubits(r + 1));
                generators.push(SignedPauli::z_on(total, &support).with_sign(negative));
            }
            let logical_z = SignedPauli::z_on(total, &row_qubits(0));
            let firsts: Vec<usize> = (0..n).map(|r| r * n).collect();
            let logical_x = SignedPauli::x_on(total, &firsts);

            // Hadamard image of the FM |0⟩_L: rows (|+…+⟩ ± |−…−⟩)/√2, with the
            // row signs alternating when the coupling generators are negated.
            let mut seed: Option<StateVector<T>> = None;
            for r in 0..n {
                let plus = StateVector::<T>::x_basis_product(&vec![false; n])?;
                let minus = StateVector::<T>::x_basis_product(&vec![true; n])?;
                let sign = if negative && r % 2 == 1 { -T::one() } else { T::one() };
                let row = plus
                    .add(&minus.scaled(num_complex::Complex::new(sign, T::zero())))?
                    .normalized();
                seed = Some(match seed {
                    None => row,
                    Some(s) => s.tensor(&row)?,
                });
            }
            let seed = seed.expect("n >= 2 rows");
            let flipped = seed.apply_pauli(&logical_x)?;
            let codeword_zero = seed.add(&flipped)?.normalized();
            let codeword_one = codeword_zero.apply_pauli(&logical_z)?;
            Ok(CodeSpec {
                family,
                distance: n,
                n_qubits: total,
                generators,
                logical_z,
                logical_x,
                codeword_zero,
                codeword_one,
                positions,
                rows: Vec::new(),
            })
        }
    }
}

/// Outcome of projecting a state onto one syndrome.
#[derive(Debug, Clone)]
pub struct SyndromeOutcome<T> {
    pub syndrome: Syndrome,
    pub probability: T,
    /// Unnormalized post-measurement state; its squared norm is `probability`.
    pub state: StateVector<T>,
}

/// Projects `state` onto the joint eigenspace labelled by `syndrome`.
pub fn project_syndrome<T: Real>(
    state: &StateVector<T>,
    code: &CodeSpec<T>,
    syndrome: &Syndrome,
) -> Result<StateVector<T>> {
    check_state(state, code)?;
    if syndrome.len() != code.generators.len() {
        return Err(Error::LengthMismatch { expected: code.generators.len(), got: syndrome.len() });
    }
    let mut current = state.clone();
    for (g, &outcome) in code.generators.iter().zip(&syndrome.0) {
        current = current.project(g, outcome)?.0;
    }
    Ok(current)
}

/// Enumerates every syndrome with nonzero probability by sequential projection.
pub fn measure_syndrome<T: Real>(
    state: &StateVector<T>,
    code: &CodeSpec<T>,
) -> Result<Vec<SyndromeOutcome<T>>> {
    check_state(state, code)?;
    let cutoff = T::branch_cutoff();
    let mut frontier = vec![(Vec::<i8>::new(), state.clone())];
    for g in &code.generators {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (bits, s) in frontier {
            for outcome in [1i8, -1] {
                let (projected, p) = s.project(g, outcome)?;
                if p > cutoff {
                    let mut b = bits.clone();
                    b.push(outcome);
                    next.push((b, projected));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier
        .into_iter()
        .map(|(bits, s)| SyndromeOutcome { syndrome: Syndrome(bits), probability: s.norm_sqr(), state: s })
        .collect())
}

fn check_state<T: Real>(state: &StateVector<T>, code: &CodeSpec<T>) -> Result<()> {
    if state.n_qubits() != code.n_qubits {
        return Err(Error::LengthMismatch { expected: code.n_qubits, got: state.n_qubits() });
    }
    Ok(())
}

/// Syndrome a Z-type error (given as a qubit bit mask) produces.
pub fn z_error_syndrome(generators: &[SignedPauli], error_mask: usize) -> Syndrome {
    Syndrome(
        generators
            .iter()
            .map(|g| if (g.x_mask() & error_mask).count_ones() % 2 == 0 { 1 } else { -1 })
            .collect(),
    )
}

/// Lookup decoder mapping each reachable syndrome to its lowest-weight Z error.
///
/// Built by enumerating all `2^n` Z-type errors. Ties go to the error that
/// leaves qubit 0 untouched, then to the smaller bit mask.
#[derive(Debug, Clone)]
pub struct MinWeightDecoder {
    n_qubits: usize,
    n_generators: usize,
    table: HashMap<Syndrome, usize>,
}

impl MinWeightDecoder {
    pub fn new<T: Real>(code: &CodeSpec<T>) -> Self {
        let n = code.n_qubits;
        let mut best: HashMap<Syndrome, (u32, bool, usize)> = HashMap::new();
        for mask in 0..(1usize << n) {
            let key = (mask.count_ones(), mask & 1 == 1, mask);
            let s = z_error_syndrome(&code.generators, mask);
            best.entry(s)
                .and_modify(|cur| {
                    if key < *cur {
                        *cur = key;
                    }
                })
                .or_insert(key);
        }
        Self {
            n_qubits: n,
            n_generators: code.generators.len(),
            table: best.into_iter().map(|(s, (_, _, mask))| (s, mask)).collect(),
        }
    }

    pub fn correction_mask(&self, syndrome: &Syndrome) -> Result<usize> {
        if syndrome.len() != self.n_generators {
            return Err(Error::LengthMismatch { expected: self.n_generators, got: syndrome.len() });
        }
        self.table
            .get(syndrome)
            .copied()
            .ok_or_else(|| Error::InconsistentSyndrome(syndrome.to_string()))
    }

    pub fn decode(&self, syndrome: &Syndrome) -> Result<SignedPauli> {
        Ok(SignedPauli::z_from_mask(self.n_qubits, self.correction_mask(syndrome)?))
    }
}

/// Lowest-weight Z-type correction consistent with `syndrome`.
///
/// Builds a fresh lookup table; hold a [`MinWeightDecoder`] when decoding repeatedly.
pub fn decode_min_weight<T: Real>(code: &CodeSpec<T>, syndrome: &Syndrome) -> Result<SignedPauli> {
    MinWeightDecoder::new(code).decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli(s: &str) -> SignedPauli {
        s.parse().unwrap()
    }

    #[test]
    fn repetition_three() {
        let code = build_repetition_code::<f64>(3).unwrap();
        assert_eq!(code.generators, vec![pauli("XXI"), pauli("IXX")]);
        assert_eq!(code.logical_z, pauli("ZZZ"));
        let plus = StateVector::x_basis_product(&[false; 3]).unwrap();
        assert!(code.codeword_zero.max_abs_diff(&plus) < 1e-15);
        code.validate(1e-10).unwrap();
    }

    #[test]
    fn repetition_one_and_five() {
        let one = build_repetition_code::<f64>(1).unwrap();
        assert!(one.generators.is_empty());
        one.validate(1e-10).unwrap();
        let five = build_repetition_code::<f64>(5).unwrap();
        assert_eq!(five.generators.len(), 4);
        five.validate(1e-10).unwrap();
        assert!(build_repetition_code::<f64>(0).is_err());
    }

    #[test]
    fn fm_shor_codeword_is_ghz_product() {
        let code = build_shor_code::<f64>(3, ShorVariant::Fm, IonMapping::Standard).unwrap();
        let amp = 1.0 / (2.0 * 2f64.sqrt());
        for b in 0..512usize {
            let rows = [b & 7, (b >> 3) & 7, (b >> 6) & 7];
            let expected = if rows.iter().all(|&r| r == 0 || r == 7) { amp } else { 0.0 };
            assert!((code.codeword_zero.amplitude(b).re - expected).abs() < 1e-15);
            assert!(code.codeword_zero.amplitude(b).im.abs() < 1e-15);
        }
        assert_eq!(code.positions, vec![-6, -5, -4, -2, 0, 2, 4, 5, 6]);
        code.validate(1e-10).unwrap();
    }

    #[test]
    fn afm_shor_rows_and_signs() {
        let code = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Standard).unwrap();
        for g in &code.generators[..6] {
            assert_eq!(g.sign(), Some(-1));
            assert_eq!(g.weight(), 2);
        }
        // row pattern 010 → |010⟩ is index 0b010 within each row
        let idx = 0b010 | (0b010 << 3) | (0b010 << 6);
        let amp = 1.0 / (2.0 * 2f64.sqrt());
        assert!((code.codeword_zero.amplitude(idx).re - amp).abs() < 1e-15);
        code.validate(1e-10).unwrap();
    }

    #[test]
    fn afm_distance_two_is_decoherence_free() {
        let code = build_shor_code::<f64>(2, ShorVariant::Afm, IonMapping::Standard).unwrap();
        assert_eq!(code.n_qubits, 4);
        for theta in [0.1, 0.7, 2.0] {
            for cw in [&code.codeword_zero, &code.codeword_one] {
                let r = cw.apply_z_rotations(&[theta; 4]).unwrap();
                assert!(r.max_abs_diff(cw) < 1e-14);
            }
        }
    }

    #[test]
    fn every_variant_validates_up_to_distance_four() {
        for n in 2..=4 {
            for v in ShorVariant::ALL {
                let code = build_shor_code::<f64>(n, v, IonMapping::Standard).unwrap();
                code.validate(1e-10).unwrap_or_else(|e| panic!("{v:?} n={n}: {e}"));
            }
        }
    }

    #[test]
    fn mappings() {
        let c = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Center0M2P2).unwrap();
        assert_eq!(&c.positions[3..6], &[0, -2, 2]);
        assert!(build_shor_code::<f64>(2, ShorVariant::Afm, IonMapping::Center0M2P2).is_err());
        assert!(build_shor_code::<f64>(1, ShorVariant::Fm, IonMapping::Standard).is_err());
    }

    #[test]
    fn fm_and_afm_share_supports() {
        let fm = build_shor_code::<f64>(3, ShorVariant::Fm, IonMapping::Standard).unwrap();
        let afm = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Standard).unwrap();
        for (a, b) in fm.generators.iter().zip(&afm.generators) {
            assert_eq!(a.letters(), b.letters());
        }
        let (dfm, dafm) = (MinWeightDecoder::new(&fm), MinWeightDecoder::new(&afm));
        for mask in 0..512 {
            let s = z_error_syndrome(&fm.generators, mask);
            assert_eq!(s, z_error_syndrome(&afm.generators, mask));
            assert_eq!(dfm.decode(&s).unwrap(), dafm.decode(&s).unwrap());
        }
    }

    #[test]
    fn measuring_a_codeword_is_deterministic() {
        let code = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Standard).unwrap();
        let out = measure_syndrome(&code.codeword_zero, &code).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].syndrome.is_trivial());
        assert!((out[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_z_error_syndrome() {
        let code = build_repetition_code::<f64>(3).unwrap();
        let state = code.codeword_zero.apply_pauli(&pauli("ZII")).unwrap();
        let out = measure_syndrome(&state, &code).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].syndrome, Syndrome(vec![-1, 1]));
        assert!((out[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_repetition_branch_probability() {
        let theta: f64 = 0.3;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        // |α|² + |β|² with α = c²(−is), β = c(−is)²
        let expected = (c * c * s).powi(2) + (c * s * s).powi(2);
        let code = build_repetition_code::<f64>(3).unwrap();
        let state = code.codeword_zero.apply_z_rotations(&[theta; 3]).unwrap();
        let out = measure_syndrome(&state, &code).unwrap();
        assert_eq!(out.len(), 4);
        let total: f64 = out.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for target in [Syndrome(vec![-1, 1]), Syndrome(vec![1, -1])] {
            let br = out.iter().find(|o| o.syndrome == target).unwrap();
            assert!((br.probability - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn decoder_examples() {
        let code = build_repetition_code::<f64>(3).unwrap();
        assert_eq!(decode_min_weight(&code, &Syndrome(vec![-1, 1])).unwrap(), pauli("ZII"));
        assert_eq!(decode_min_weight(&code, &Syndrome::trivial(2)).unwrap(), pauli("III"));
        assert!(decode_min_weight(&code, &Syndrome(vec![1])).is_err());

        let five = build_repetition_code::<f64>(5).unwrap();
        let s = z_error_syndrome(&five.generators, 0b00110);
        assert_eq!(decode_min_weight(&five, &s).unwrap(), pauli("IZZII"));
    }

    /// Brute force over both cosets for the 5-bit code: the decoder's pick is
    /// always the lighter one.
    #[test]
    fn decoder_matches_coset_enumeration() {
        let code = build_repetition_code::<f64>(5).unwrap();
        let dec = MinWeightDecoder::new(&code);
        for e in 0..32usize {
            let partner = e ^ 0b11111;
            let lighter = if e.count_ones() < partner.count_ones() { e } else { partner };
            let s = z_error_syndrome(&code.generators, e);
            assert_eq!(dec.correction_mask(&s).unwrap(), lighter);
        }
    }

    #[test]
    fn even_distance_ties_avoid_qubit_zero() {
        let code = build_repetition_code::<f64>(4).unwrap();
        let s = z_error_syndrome(&code.generators, 0b0011);
        assert_eq!(MinWeightDecoder::new(&code).correction_mask(&s).unwrap(), 0b1100);
    }

    #[test]
    fn z_syndromes_are_inconsistent() {
        let code = build_shor_code::<f64>(3, ShorVariant::Fm, IonMapping::Standard).unwrap();
        let mut bits = vec![1i8; 8];
        bits[0] = -1;
        assert!(matches!(
            decode_min_weight(&code, &Syndrome(bits)),
            Err(Error::InconsistentSyndrome(_))
        ));
    }

    #[test]
    fn correctable_errors_are_corrected() {
        for d in [3usize, 5, 7] {
            let code = build_repetition_code::<f64>(d).unwrap();
            let dec = MinWeightDecoder::new(&code);
            for e in 0..(1usize << d) {
                if e.count_ones() as usize > (d - 1) / 2 {
                    continue;
                }
                let s = z_error_syndrome(&code.generators, e);
                let residual = dec.correction_mask(&s).unwrap() ^ e;
                // residual must be a stabilizer-equivalent identity on the codespace
                let state = code
                    .codeword_zero
                    .apply_pauli(&SignedPauli::z_from_mask(d, residual))
                    .unwrap();
                assert!(state.approx_eq_up_to_phase(&code.codeword_zero, 1e-12));
            }
        }
    }

    #[test]
    fn document_serializes() {
        let code = build_shor_code::<f64>(3, ShorVariant::Afm, IonMapping::Standard).unwrap();
        let doc = serde_json::to_value(code.document()).unwrap();
        assert_eq!(doc["family"], "shor");
        assert_eq!(doc["variant"], "afm");
        assert_eq!(doc["generators"][0], "-ZZIIIIIII");
        assert_eq!(doc["positions"][4], 0);
        let back: CodeDocument = serde_json::from_value(doc).unwrap();
        assert_eq!(back, code.document());
    }
}
