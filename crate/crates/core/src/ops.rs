//! Dense complex matrices, the standard gate set, and gate application.
//!
//! Matrix rows and columns are indexed with the same bit order as
//! [`StateVector`]: for a k-qubit operator the first target qubit is the most
//! significant bit of the row/column index.
//!
//! `Y` follows the real convention `Y = ZX = ((0, 1), (-1, 0))`, mapping
//! `|0⟩ ↦ -|1⟩` and `|1⟩ ↦ |0⟩`. It is *not* the Pauli matrix with imaginary
//! entries; the dense-coding and teleportation tables depend on this choice.

use std::fmt;
use std::ops::Deref;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{QsimError, Result};
use crate::qstate::{scatter_bits, validate_qubits, StateVector};
use crate::scalar::{cis, pairwise_sum, Amplitude, Real};

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<Amplitude<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Amplitude<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(QsimError::Dimension {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Complex::new(T::lit(x), T::zero()))
                        .collect()
                })
                .collect(),
        )
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[Amplitude<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Amplitude<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Amplitude<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Amplitude<T>) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Amplitude<T>] {
        &self.data
    }

    /// Number of qubits the matrix acts on, if its dimension is a power of two.
    pub fn qubit_count(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Amplitude<T>]) -> Vec<Amplitude<T>> {
        assert_eq!(self.dim, v.len(), "matrix/vector dimensions differ");
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    /// Kronecker product with `self` as the outer (high-order) block structure.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| {
            self.get(r / m, c / m) * other.get(r % m, c % m)
        })
    }

    pub fn scale(&self, factor: Amplitude<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        let sq: Vec<T> = self.data.iter().map(|a| a.norm_sqr()).collect();
        pairwise_sum(&sq).sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let sq: Vec<T> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .collect();
        pairwise_sum(&sq).sqrt()
    }

    /// Largest entry-wise deviation of `M·M*` from the identity.
    pub fn unitarity_defect(&self) -> T {
        self.mul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.dim))
    }

    /// `M·M* = I` within the shared tolerance.
    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < T::TOLERANCE
    }

    /// True when every entry is 0 or 1 with exactly one 1 per row and column.
    pub fn is_permutation(&self) -> bool {
        let n = self.dim;
        let mut col_hits = vec![0usize; n];
        for r in 0..n {
            let mut row_hits = 0;
            for (c, hits) in col_hits.iter_mut().enumerate() {
                let a = self.get(r, c);
                if a == Complex::one() {
                    row_hits += 1;
                    *hits += 1;
                } else if !a.is_zero() {
                    return false;
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }
}

impl<T: Real> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let a = self.get(r, c);
                    if a.im.abs() <= T::TOLERANCE {
                        format!("{:8.4}", a.re.as_f64())
                    } else {
                        format!("{:.4}{:+.4}i", a.re.as_f64(), a.im.as_f64())
                    }
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `is_unitary` as a free function, for raw matrices.
pub fn is_unitary<T: Real>(m: &Matrix<T>) -> bool {
    m.is_unitary()
}

/// A `2^k × 2^k` matrix verified unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp<T> {
    arity: usize,
    matrix: Matrix<T>,
}

impl<T: Real> UnitaryOp<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let arity = matrix.qubit_count().ok_or_else(|| {
            QsimError::domain(format!("dimension {} is not a power of two", matrix.dim()))
        })?;
        let defect = matrix.unitarity_defect();
        if defect.is_nan() || defect >= T::TOLERANCE {
            return Err(QsimError::domain(format!(
                "matrix is not unitary (max |MM* - I| = {:e})",
                defect.as_f64()
            )));
        }
        Ok(Self { arity, matrix })
    }

    /// Wrap a matrix that is unitary by construction; checked in debug builds.
    pub(crate) fn trusted(matrix: Matrix<T>) -> Self {
        let arity = matrix.qubit_count().expect("power-of-two dimension");
        debug_assert!(
            matrix.dim() > 64 || matrix.unitarity_defect() < T::lit(1e-6),
            "constructor produced a non-unitary matrix"
        );
        Self { arity, matrix }
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            matrix: Matrix::identity(1 << arity),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity {
            return Err(QsimError::Arity {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(Self {
            arity: self.arity,
            matrix: self.matrix.mul(&other.matrix),
        })
    }
}

impl<T> Deref for UnitaryOp<T> {
    type Target = Matrix<T>;
    fn deref(&self) -> &Matrix<T> {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    Cnot,
    Swap,
    Toffoli,
    Fredkin,
}

impl GateName {
    pub const ALL: [GateName; 9] = [
        GateName::I,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::Cnot,
        GateName::Swap,
        GateName::Toffoli,
        GateName::Fredkin,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateName::I | GateName::X | GateName::Y | GateName::Z | GateName::H => 1,
            GateName::Cnot | GateName::Swap => 2,
            GateName::Toffoli | GateName::Fredkin => 3,
        }
    }

    /// Lower-case mnemonic used by the circuit text format.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateName::I => "i",
            GateName::X => "x",
            GateName::Y => "y",
            GateName::Z => "z",
            GateName::H => "h",
            GateName::Cnot => "cnot",
            GateName::Swap => "swap",
            GateName::Toffoli => "toffoli",
            GateName::Fredkin => "fredkin",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.mnemonic() == s)
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

fn real2<T: Real>(a: f64, b: f64, c: f64, d: f64) -> Matrix<T> {
    Matrix::from_real_rows(&[&[a, b], &[c, d]]).expect("2x2")
}

/// The matrix of a named gate.
pub fn standard_gate<T: Real>(name: GateName) -> UnitaryOp<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = match name {
        GateName::I => Matrix::identity(2),
        GateName::X => real2(0.0, 1.0, 1.0, 0.0),
        GateName::Y => real2(0.0, 1.0, -1.0, 0.0),
        GateName::Z => real2(1.0, 0.0, 0.0, -1.0),
        GateName::H => real2(h, h, h, -h),
        GateName::Cnot => controlled_matrix(&real2(0.0, 1.0, 1.0, 0.0)),
        GateName::Swap => Matrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .expect("4x4"),
        GateName::Toffoli => controlled_matrix(standard_gate::<T>(GateName::Cnot).matrix()),
        GateName::Fredkin => controlled_matrix(standard_gate::<T>(GateName::Swap).matrix()),
    };
    UnitaryOp::trusted(m)
}

fn controlled_matrix<T: Real>(u: &Matrix<T>) -> Matrix<T> {
    let d = u.dim();
    let mut m = Matrix::identity(2 * d);
    for r in 0..d {
        for c in 0..d {
            m.set(d + r, d + c, u.get(r, c));
        }
    }
    m
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ u`; the new control is the leftmost qubit.
pub fn controlled<T: Real>(u: &UnitaryOp<T>) -> UnitaryOp<T> {
    UnitaryOp::trusted(controlled_matrix(u.matrix()))
}

/// `((cos α, sin α), (−sin α, cos α))`.
pub fn rotation<T: Real>(alpha: T) -> UnitaryOp<T> {
    let (s, c) = alpha.sin_cos();
    let z = T::zero();
    UnitaryOp::trusted(Matrix {
        dim: 2,
        data: vec![
            Complex::new(c, z),
            Complex::new(s, z),
            Complex::new(-s, z),
            Complex::new(c, z),
        ],
    })
}

/// `diag(e^{iα}, e^{−iα})`.
pub fn phase<T: Real>(alpha: T) -> UnitaryOp<T> {
    UnitaryOp::trusted(Matrix::diagonal(&[cis(alpha), cis(-alpha)]))
}

/// Two-qubit `diag(1, 1, 1, e^{iθ})`, the conditional phase used by the QFT.
pub fn controlled_phase<T: Real>(theta: T) -> UnitaryOp<T> {
    let one = Complex::one();
    UnitaryOp::trusted(Matrix::diagonal(&[one, one, one, cis(theta)]))
}

/// `a ⊗ b`; `a` acts on the leftmost qubits.
pub fn tensor_op<T: Real>(a: &UnitaryOp<T>, b: &UnitaryOp<T>) -> Result<UnitaryOp<T>> {
    let arity = a.arity + b.arity;
    if arity > MAX_DENSE_ARITY {
        return Err(QsimError::Capacity {
            what: format!("{arity}-qubit dense operator"),
            limit: MAX_DENSE_ARITY,
        });
    }
    Ok(UnitaryOp {
        arity,
        matrix: a.matrix.kron(&b.matrix),
    })
}

/// Largest arity for which dense operators are materialized.
pub const MAX_DENSE_ARITY: usize = 14;

/// Walsh-Hadamard transform on `n` qubits, `W_{rs} = (−1)^{popcount(r & s)} / √2^n`.
pub fn walsh<T: Real>(n: usize) -> Result<UnitaryOp<T>> {
    if n == 0 {
        return Err(QsimError::domain(
            "walsh transform needs at least one qubit",
        ));
    }
    if n > MAX_DENSE_ARITY {
        return Err(QsimError::Capacity {
            what: format!("{n}-qubit Walsh matrix"),
            limit: MAX_DENSE_ARITY,
        });
    }
    let dim = 1usize << n;
    let scale = T::one() / T::from_count(dim).sqrt();
    let m = Matrix::from_fn(dim, |r, c| {
        let sign = if (r & c).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        };
        Complex::new(sign, T::zero())
    });
    Ok(UnitaryOp::trusted(m))
}

/// Apply a k-qubit gate to `targets` of `state`.
///
/// `targets[0]` is bound to the gate's most significant index bit. Only the
/// `2^k`-element slices touched by the gate are visited; the full `2^n` matrix
/// is never built.
pub fn apply<T: Real>(
    u: &UnitaryOp<T>,
    targets: &[usize],
    state: &StateVector<T>,
) -> Result<StateVector<T>> {
    let n = state.n_qubits();
    check_targets(u.arity(), targets, n)?;
    let mut amps = state.amplitudes().to_vec();
    apply_matrix_in_place(u.matrix(), targets, n, &mut amps);
    Ok(StateVector::from_raw(n, amps))
}

pub(crate) fn check_targets(arity: usize, targets: &[usize], n_qubits: usize) -> Result<()> {
    if targets.len() != arity {
        return Err(QsimError::Arity {
            expected: arity,
            found: targets.len(),
        });
    }
    validate_qubits(targets, n_qubits)
}

/// In-place kernel behind [`apply`]; `targets` must already be validated.
pub(crate) fn apply_matrix_in_place<T: Real>(
    m: &Matrix<T>,
    targets: &[usize],
    n_qubits: usize,
    amps: &mut [Amplitude<T>],
) {
    let k = targets.len();
    if k == 1 {
        let mask = 1usize << (n_qubits - 1 - targets[0]);
        let (u00, u01, u10, u11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let len = amps.len();
        let mut block = 0;
        while block < len {
            for i in block..block + mask {
                let a0 = amps[i];
                let a1 = amps[i | mask];
                amps[i] = u00 * a0 + u01 * a1;
                amps[i | mask] = u10 * a0 + u11 * a1;
            }
            block += 2 * mask;
        }
        return;
    }
    let dim = 1usize << k;
    let offsets: Vec<usize> = (0..dim)
        .map(|g| scatter_bits(g, n_qubits, targets))
        .collect();
    let target_mask = offsets[dim - 1];
    let mut input = vec![Complex::zero(); dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (slot, &off) in input.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &m.entries()[r * dim..(r + 1) * dim];
            amps[base | off] = row
                .iter()
                .zip(&input)
                .fold(Complex::zero(), |acc, (a, b)| acc + a * b);
        }
    }
}

/// Unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<T: Real>(dim: usize, rng: &mut crate::measure::RngStream) -> UnitaryOp<T> {
    let mut cols: Vec<Vec<Amplitude<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Amplitude<T>> = (0..dim)
            .map(|_| {
                let re = rng.next_gaussian();
                Complex::new(T::lit(re), T::lit(rng.next_gaussian()))
            })
            .collect();
        for _ in 0..2 {
            for c in &cols {
                let dot: Amplitude<T> = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let norm = pairwise_sum(&v.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()).sqrt();
        if norm > T::lit(1e-3) {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    UnitaryOp::trusted(Matrix::from_fn(dim, |r, c| cols[c][r]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    type S = StateVector<f64>;

    #[test]
    fn named_gates_match_reference_tables() {
        let x = standard_gate::<f64>(GateName::X);
        assert_eq!(*x.matrix(), real2(0.0, 1.0, 1.0, 0.0));
        let y = standard_gate::<f64>(GateName::Y);
        assert_eq!(*y.matrix(), real2(0.0, 1.0, -1.0, 0.0));
        // Y = ZX
        let zx = standard_gate::<f64>(GateName::Z).matrix().mul(x.matrix());
        assert_eq!(zx, *y.matrix());
        let cnot = standard_gate::<f64>(GateName::Cnot);
        let expected = Matrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(*cnot.matrix(), expected);
        for g in GateName::ALL {
            let u = standard_gate::<f64>(g);
            assert!(u.is_unitary(), "{g}");
            assert_eq!(u.arity(), g.arity());
            assert_eq!(GateName::from_mnemonic(g.mnemonic()), Some(g));
        }
    }

    #[test]
    fn controlled_constructions() {
        let x = standard_gate::<f64>(GateName::X);
        assert_eq!(controlled(&x), standard_gate(GateName::Cnot));
        assert_eq!(
            controlled(&standard_gate::<f64>(GateName::Cnot)),
            standard_gate(GateName::Toffoli)
        );
        assert_eq!(
            controlled(&standard_gate::<f64>(GateName::Swap)),
            standard_gate(GateName::Fredkin)
        );
    }

    #[test]
    fn rotations_and_phases() {
        assert!(rotation(0.0f64).max_abs_diff(&Matrix::identity(2)) == 0.0);
        assert!(phase(0.0f64).max_abs_diff(&Matrix::identity(2)) == 0.0);
        let r = rotation(FRAC_PI_2);
        assert!(r.max_abs_diff(standard_gate::<f64>(GateName::Y).matrix()) < 1e-15);
        for k in 0..16 {
            let a = k as f64 * 0.41;
            assert!(rotation(a).is_unitary());
            assert!(phase(a).is_unitary());
            assert!(controlled_phase(a).is_unitary());
        }
    }

    #[test]
    fn tensor_op_identity_and_dense_coding_row() {
        let i = standard_gate::<f64>(GateName::I);
        assert_eq!(*tensor_op(&i, &i).unwrap().matrix(), Matrix::identity(4));
        let xi = tensor_op(&standard_gate(GateName::X), &i).unwrap();
        let epr = S::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        let out = S::from_amplitudes(xi.mul_vec(epr.amplitudes())).unwrap();
        // (|10⟩ + |01⟩)/√2
        let expected = S::from_real(&[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        assert!(out.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn walsh_matches_recursive_definition() {
        let h = standard_gate::<f64>(GateName::H);
        assert!(walsh::<f64>(1).unwrap().max_abs_diff(h.matrix()) < 1e-15);
        let mut recursive = h.clone();
        for n in 2..=5 {
            recursive = tensor_op(&h, &recursive).unwrap();
            let w = walsh::<f64>(n).unwrap();
            assert!(w.max_abs_diff(recursive.matrix()) < 1e-14, "n = {n}");
        }
        let w2 = walsh::<f64>(2).unwrap();
        assert!((w2.get(3, 3).re - 0.5).abs() < 1e-15);
        let s = S::basis(4, 0).unwrap();
        let out = S::from_amplitudes(walsh::<f64>(4).unwrap().mul_vec(s.amplitudes())).unwrap();
        assert!(out.approx_eq(&S::uniform(4).unwrap(), 1e-15));
    }

    #[test]
    fn apply_flips_and_entangles() {
        let x = standard_gate::<f64>(GateName::X);
        let out = apply(&x, &[1], &S::basis(2, 0).unwrap()).unwrap();
        assert_eq!(out, S::basis(2, 1).unwrap());

        let input = S::from_real(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]).unwrap();
        let out = apply(&standard_gate(GateName::Cnot), &[0, 1], &input).unwrap();
        let epr = S::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!(out.approx_eq(&epr, 1e-15));
    }

    #[test]
    fn apply_hadamard_decodes_dense_coding_first_bit() {
        // after CNOT, ψ₀ becomes (|00⟩ + |10⟩)/√2; H on the first bit gives |00⟩
        let s = S::from_real(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]).unwrap();
        let out = apply(&standard_gate(GateName::H), &[0], &s).unwrap();
        assert!(out.approx_eq(&S::basis(2, 0).unwrap(), 1e-15));
    }

    #[test]
    fn apply_rejects_bad_targets() {
        let s = S::basis(2, 0).unwrap();
        let cnot = standard_gate::<f64>(GateName::Cnot);
        assert!(matches!(
            apply(&cnot, &[0, 0], &s),
            Err(QsimError::DuplicateQubit { .. })
        ));
        assert!(matches!(
            apply(&cnot, &[0, 2], &s),
            Err(QsimError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            apply(&cnot, &[0], &s),
            Err(QsimError::Arity { .. })
        ));
    }

    #[test]
    fn unitarity_check() {
        assert!(standard_gate::<f64>(GateName::Y).is_unitary());
        let two = Matrix::<f64>::identity(2).scale(Complex::new(2.0, 0.0));
        assert!(!two.is_unitary());
        assert!(UnitaryOp::new(two).is_err());
    }

    #[test]
    fn permutation_detection() {
        assert!(standard_gate::<f64>(GateName::Fredkin).is_permutation());
        assert!(!standard_gate::<f64>(GateName::H).is_permutation());
        assert!(!standard_gate::<f64>(GateName::Z).is_permutation());
    }
}
