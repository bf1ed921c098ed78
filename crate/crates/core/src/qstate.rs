//! Dense state vectors over `2^n` computational basis states.
//!
//! Bit order: a ket is written left to right and, read as a binary number,
//! gives the amplitude index. Qubit 0 is the leftmost ket character and
//! therefore the most significant bit of the index, so `|10⟩` is index 2.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{QsimError, Result};
use crate::scalar::{pairwise_sum, Amplitude, Real};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 30;

/// Index of a computational basis vector in an `n_qubits` register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    n_qubits: usize,
    index: usize,
}

impl BasisLabel {
    pub fn new(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        if index >= 1usize << n_qubits {
            return Err(QsimError::domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        Ok(Self { n_qubits, index })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Value of qubit `q` (0 = leftmost).
    pub fn bit(&self, q: usize) -> u8 {
        ((self.index >> bit_position(self.n_qubits, q)) & 1) as u8
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.bit(q))?;
        }
        write!(f, "⟩")
    }
}

/// Position of qubit `q` inside an amplitude index, counted from the LSB.
#[inline]
pub fn bit_position(n_qubits: usize, q: usize) -> usize {
    n_qubits - 1 - q
}

/// Index mask with a single bit set for qubit `q`.
#[inline]
pub fn qubit_mask(n_qubits: usize, q: usize) -> usize {
    1usize << bit_position(n_qubits, q)
}

/// Collect the bits of `index` at `qubits` into a small integer, the first
/// listed qubit becoming the most significant bit.
#[inline]
pub fn gather_bits(index: usize, n_qubits: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0usize, |acc, &q| {
        (acc << 1) | ((index >> bit_position(n_qubits, q)) & 1)
    })
}

/// Inverse of [`gather_bits`]: spread `value` over `qubits` of a zeroed index.
#[inline]
pub fn scatter_bits(value: usize, n_qubits: usize, qubits: &[usize]) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| {
        let bit = (value >> (k - 1 - j)) & 1;
        acc | (bit << bit_position(n_qubits, q))
    })
}

/// Reject duplicate or out-of-range qubit lists.
pub fn validate_qubits(qubits: &[usize], n_qubits: usize) -> Result<()> {
    let mut seen = 0u64;
    for &q in qubits {
        if q >= n_qubits {
            return Err(QsimError::QubitOutOfRange { qubit: q, n_qubits });
        }
        if seen & (1 << q) != 0 {
            return Err(QsimError::DuplicateQubit { qubit: q });
        }
        seen |= 1 << q;
    }
    Ok(())
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(QsimError::Capacity {
            what: format!("{n_qubits}-qubit register"),
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Normalized complex amplitude vector of length `2^n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Amplitude<T>>,
}

impl<T: Real> StateVector<T> {
    /// Build a state from raw amplitudes.
    ///
    /// Inputs whose squared norm is within `T::TOLERANCE` of 1 are kept as is;
    /// drift up to `T::RENORMALIZE_LIMIT` is normalized away; anything larger
    /// is rejected.
    pub fn from_amplitudes(amps: Vec<Amplitude<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::domain(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_width(n_qubits)?;
        if let Some(index) = amps
            .iter()
            .position(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(QsimError::NonFinite { index });
        }
        let mut state = Self { n_qubits, amps };
        let norm = state.norm();
        let deviation = (norm - T::one()).abs();
        if deviation > T::RENORMALIZE_LIMIT {
            return Err(QsimError::Normalization {
                deviation: deviation.as_f64(),
            });
        }
        if deviation > T::TOLERANCE {
            state.scale(T::one() / norm);
        }
        Ok(state)
    }

    /// Build from real amplitudes (convenience for tests and demos).
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amplitudes(
            values
                .iter()
                .map(|&v| Complex::new(T::lit(v), T::zero()))
                .collect(),
        )
    }

    /// Scale arbitrary (non-zero) amplitudes to unit norm.
    pub fn normalized(amps: Vec<Amplitude<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::domain(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_width(n_qubits)?;
        let mut state = Self { n_qubits, amps };
        let norm = state.norm();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(QsimError::domain(
                "cannot normalize a zero or non-finite vector",
            ));
        }
        state.scale(T::one() / norm);
        Ok(state)
    }

    /// `|x⟩` in an `n`-qubit register.
    pub fn basis(n_qubits: usize, x: usize) -> Result<Self> {
        let label = BasisLabel::new(n_qubits, x)?;
        Ok(Self::basis_label(label))
    }

    pub fn basis_label(label: BasisLabel) -> Self {
        let mut amps = vec![Complex::zero(); 1 << label.n_qubits];
        amps[label.index] = Complex::new(T::one(), T::zero());
        Self {
            n_qubits: label.n_qubits,
            amps,
        }
    }

    /// Equal superposition `2^{-n/2} Σ_x |x⟩`.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let len = 1usize << n_qubits;
        let a = T::one() / T::from_count(len).sqrt();
        Ok(Self {
            n_qubits,
            amps: vec![Complex::new(a, T::zero()); len],
        })
    }

    /// Parse a ket label such as `0110`, `|0110⟩`, `|0110>` or `|0,1,1,0⟩`.
    pub fn parse_ket(text: &str) -> Result<Self> {
        let label = parse_ket_label(text)?;
        Ok(Self::basis_label(label))
    }

    /// Wrap amplitudes produced by a norm-preserving routine.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Amplitude<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Amplitude<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude<T>> {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude<T> {
        self.amps[index]
    }

    /// Squared magnitudes in index order.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        pairwise_sum(&self.probabilities())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    fn scale(&mut self, factor: T) {
        for a in &mut self.amps {
            *a = a.scale(factor);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Amplitude<T>> {
        if self.len() != other.len() {
            return Err(QsimError::Dimension {
                expected: self.len(),
                found: other.len(),
            });
        }
        let re: Vec<T> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a.conj() * b).re)
            .collect();
        let im: Vec<T> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a.conj() * b).im)
            .collect();
        Ok(Complex::new(pairwise_sum(&re), pairwise_sum(&im)))
    }

    /// `|⟨self|other⟩|`, the phase-insensitive overlap.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm())
    }

    /// Largest component-wise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len(), "state dimensions differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Euclidean distance between the amplitude vectors.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len(), "state dimensions differ");
        let sq: Vec<T> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .collect();
        pairwise_sum(&sq).sqrt()
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len() && self.max_abs_diff(other) <= tol
    }

    /// Equality up to a global phase: `|⟨self|other⟩| = 1` within `tol`.
    pub fn eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        self.fidelity(other)
            .map(|f| (f - T::one()).abs() <= tol)
            .unwrap_or(false)
    }

    /// Tensor product; `self` occupies the leftmost qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        check_width(n_qubits)?;
        Ok(Self {
            n_qubits,
            amps: tensor_amplitudes(&self.amps, &other.amps),
        })
    }

    /// Determinant test for factorizability of a two-qubit state.
    pub fn is_product_state_2q(&self) -> Result<bool> {
        if self.n_qubits != 2 {
            return Err(QsimError::Arity {
                expected: 2,
                found: self.n_qubits,
            });
        }
        let a = &self.amps;
        let det = a[0] * a[3] - a[1] * a[2];
        Ok(det.norm() <= T::TOLERANCE)
    }

    /// Sum-of-kets rendering, skipping terms with `|amplitude| < threshold`
    /// and terms that are zero to within the shared tolerance.
    pub fn format_dirac(&self, threshold: T) -> String {
        let mut out = String::new();
        for (index, a) in self.amps.iter().enumerate() {
            let magnitude = a.norm();
            if magnitude < threshold || magnitude <= T::TOLERANCE {
                continue;
            }
            let label = BasisLabel {
                n_qubits: self.n_qubits,
                index,
            };
            let real = a.im.abs() <= T::TOLERANCE;
            let pure_imag = a.re.abs() <= T::TOLERANCE;
            if real || pure_imag {
                let (value, suffix) = if real { (a.re, "") } else { (a.im, "i") };
                let negative = value < T::zero();
                let text = format!("{}{suffix}", format_coefficient(value.abs().as_f64()));
                match (out.is_empty(), negative) {
                    (true, false) => {}
                    (true, true) => out.push('−'),
                    (false, false) => out.push_str(" + "),
                    (false, true) => out.push_str(" − "),
                }
                out.push_str(&text);
            } else {
                if !out.is_empty() {
                    out.push_str(" + ");
                }
                let sign = if a.im < T::zero() { '−' } else { '+' };
                out.push_str(&format!(
                    "({}{}{}i)",
                    format_signed(a.re.as_f64()),
                    sign,
                    format_coefficient(a.im.abs().as_f64())
                ));
            }
            out.push_str(&label.to_string());
        }
        out
    }
}

impl<T: Real> fmt::Display for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.format_dirac(T::zero());
        if text.is_empty() {
            write!(f, "0")
        } else {
            f.write_str(&text)
        }
    }
}

/// Kronecker product of two amplitude vectors, `a` as the high-order factor.
pub(crate) fn tensor_amplitudes<T: Real>(
    a: &[Amplitude<T>],
    b: &[Amplitude<T>],
) -> Vec<Amplitude<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn format_coefficient(x: f64) -> String {
    let mut s = format!("{x:.4}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn format_signed(x: f64) -> String {
    if x < 0.0 {
        format!("−{}", format_coefficient(-x))
    } else {
        format_coefficient(x)
    }
}

/// Parse `0110`, `|0110⟩`, `|0110>` or `|0,1,1,0⟩` into a basis label.
pub fn parse_ket_label(text: &str) -> Result<BasisLabel> {
    let trimmed = text.trim();
    let inner = trimmed.strip_prefix('|').unwrap_or(trimmed);
    let inner = inner
        .strip_suffix('⟩')
        .or_else(|| inner.strip_suffix('>'))
        .unwrap_or(inner);
    let mut index = 0usize;
    let mut n_qubits = 0usize;
    for ch in inner.chars() {
        match ch {
            '0' | '1' => {
                n_qubits += 1;
                check_width(n_qubits)?;
                index = (index << 1) | usize::from(ch == '1');
            }
            ',' | ' ' | '_' => {}
            _ => {
                return Err(QsimError::domain(format!(
                    "invalid character {ch:?} in ket `{text}`"
                )))
            }
        }
    }
    if n_qubits == 0 {
        return Err(QsimError::domain(format!("empty ket `{text}`")));
    }
    BasisLabel::new(n_qubits, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    type S = StateVector<f64>;

    #[test]
    fn basis_states_follow_left_to_right_bit_order() {
        let s = S::basis(1, 0).unwrap();
        assert_eq!(s.probabilities(), vec![1.0, 0.0]);
        let s = S::basis(2, 2).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(s.format_dirac(0.0), "1|10⟩");
        let s = S::basis(3, 7).unwrap();
        assert_eq!(s.format_dirac(0.0), "1|111⟩");
    }

    #[test]
    fn basis_out_of_range_is_rejected() {
        assert!(matches!(S::basis(2, 4), Err(QsimError::Domain(_))));
    }

    #[test]
    fn tensor_of_single_qubits_matches_expansion() {
        let (a0, b0, a1, b1) = (0.6, 0.8, FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
        let v = S::from_real(&[a0, b0]).unwrap();
        let w = S::from_real(&[a1, b1]).unwrap();
        let t = v.tensor(&w).unwrap();
        let expected = S::from_real(&[a0 * a1, a0 * b1, b0 * a1, b0 * b1]).unwrap();
        assert!(t.approx_eq(&expected, 1e-15));
        let zero = S::basis(1, 0).unwrap();
        assert_eq!(zero.tensor(&zero).unwrap(), S::basis(2, 0).unwrap());
    }

    #[test]
    fn hadamard_pair_tensor_is_uniform() {
        let plus = S::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let t = plus.tensor(&plus).unwrap();
        for a in t.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn entanglement_determinant_criterion() {
        let epr = S::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!(!epr.is_product_state_2q().unwrap());
        let prod = S::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0]).unwrap();
        assert!(prod.is_product_state_2q().unwrap());
        assert!(S::basis(2, 2).unwrap().is_product_state_2q().unwrap());
        assert!(matches!(
            S::basis(3, 0).unwrap().is_product_state_2q(),
            Err(QsimError::Arity { .. })
        ));
    }

    #[test]
    fn dirac_formatting() {
        let s = S::basis(1, 0).unwrap();
        assert_eq!(s.format_dirac(0.0), "1|0⟩");
        let s = S::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]).unwrap();
        assert_eq!(s.format_dirac(0.0), "0.7071|00⟩ − 0.7071|11⟩");
        let epr = S::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert_eq!(epr.format_dirac(0.8), "");
        let s = S::from_real(&[0.0, -1.0]).unwrap();
        assert_eq!(s.format_dirac(0.0), "−1|1⟩");
        let s = S::from_amplitudes(vec![
            Complex::new(0.5, 0.5),
            Complex::new(0.0, FRAC_1_SQRT_2),
        ])
        .unwrap();
        assert_eq!(s.format_dirac(0.0), "(0.5+0.5i)|0⟩ + 0.7071i|1⟩");
    }

    #[test]
    fn normalization_contract() {
        // drift inside the repair window is normalized away
        let s = S::from_real(&[1.0 + 1e-8, 0.0]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        // larger deviations are errors
        assert!(matches!(
            S::from_real(&[1.1, 0.0]),
            Err(QsimError::Normalization { .. })
        ));
        assert!(matches!(
            S::from_real(&[1.0, 0.0, 0.0]),
            Err(QsimError::Domain(_))
        ));
        assert!(matches!(
            S::from_amplitudes(vec![Complex::new(f64::NAN, 0.0), Complex::new(0.0, 0.0)]),
            Err(QsimError::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn ket_parser_accepts_common_spellings() {
        for text in ["11000", "|11000⟩", "|11000>", "|1,1,0,0,0⟩"] {
            let label = parse_ket_label(text).unwrap();
            assert_eq!((label.n_qubits(), label.index()), (5, 0b11000));
        }
        assert!(parse_ket_label("|012⟩").is_err());
        assert!(parse_ket_label("||").is_err());
    }

    #[test]
    fn bit_helpers_round_trip() {
        let n = 5;
        let qubits = [3, 0, 4];
        for v in 0..8 {
            let idx = scatter_bits(v, n, &qubits);
            assert_eq!(gather_bits(idx, n, &qubits), v);
        }
        assert_eq!(qubit_mask(3, 0), 0b100);
        assert!(validate_qubits(&[0, 0], 2).is_err());
        assert!(validate_qubits(&[2], 2).is_err());
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let s = S::from_real(&[0.6, 0.8]).unwrap();
        let t = S::from_amplitudes(vec![Complex::new(0.0, 0.6), Complex::new(0.0, 0.8)]).unwrap();
        assert!(s.eq_up_to_phase(&t, 1e-12));
        assert!(!s.approx_eq(&t, 1e-3));
    }
}
