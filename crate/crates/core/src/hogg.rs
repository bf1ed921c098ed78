//! Hogg's structured search on the lattice of partial assignments of a small
//! constraint-satisfaction problem.
//!
//! Atom `(var, val)` is qubit `var·n_vals + val`; a basis index is the set of
//! atoms present, so `|0…0⟩` is the empty assignment.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{QsimError, Result};
use crate::grover::{flip_sign, Predicate};
use crate::measure::{self, RngStream};
use crate::ops::{walsh, Matrix, UnitaryOp, MAX_DENSE_ARITY};
use crate::qstate::{bit_position, StateVector};
use crate::scalar::{cis, pairwise_sum, Real};

pub const MAX_ATOMS: usize = 16;
/// Largest atom count for the SVD-based move.
pub const MAX_SVD_ATOMS: usize = 8;

#[derive(Clone)]
pub enum Constraint {
    /// Variable takes at most one value.
    AtMostOneValue(usize),
    /// These `(var, val)` atoms may not appear together.
    Nogood(Vec<(usize, usize)>),
    /// Arbitrary test on the atom mask; `true` means violated.
    Custom(Arc<dyn Fn(usize) -> bool + Send + Sync>),
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::AtMostOneValue(v) => f.debug_tuple("AtMostOneValue").field(v).finish(),
            Constraint::Nogood(atoms) => f.debug_tuple("Nogood").field(atoms).finish(),
            Constraint::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Atom ordering and the set ↔ basis-index bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeBasis {
    pub n_vars: usize,
    pub n_vals: usize,
}

impl LatticeBasis {
    pub fn n_atoms(&self) -> usize {
        self.n_vars * self.n_vals
    }

    pub fn atom(&self, var: usize, val: usize) -> usize {
        debug_assert!(var < self.n_vars && val < self.n_vals);
        var * self.n_vals + val
    }

    pub fn atom_bit(&self, var: usize, val: usize) -> usize {
        1 << bit_position(self.n_atoms(), self.atom(var, val))
    }

    pub fn mask_of(&self, set: &[(usize, usize)]) -> Result<usize> {
        let mut mask = 0;
        for &(var, val) in set {
            if var >= self.n_vars || val >= self.n_vals {
                return Err(QsimError::domain(format!(
                    "atom ({var}, {val}) outside the lattice"
                )));
            }
            mask |= self.atom_bit(var, val);
        }
        Ok(mask)
    }

    /// Atoms of `mask` in ascending atom order.
    pub fn set_of(&self, mask: usize) -> Vec<(usize, usize)> {
        (0..self.n_vars)
            .flat_map(|var| (0..self.n_vals).map(move |val| (var, val)))
            .filter(|&(var, val)| mask & self.atom_bit(var, val) != 0)
            .collect()
    }

    pub fn level(&self, mask: usize) -> usize {
        mask.count_ones() as usize
    }
}

#[derive(Debug, Clone)]
pub struct CspInstance {
    pub basis: LatticeBasis,
    pub constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn new(n_vars: usize, n_vals: usize) -> Result<Self> {
        let n_atoms = n_vars * n_vals;
        if n_atoms == 0 {
            return Err(QsimError::domain(
                "CSP needs at least one variable and value",
            ));
        }
        if n_atoms > MAX_ATOMS {
            return Err(QsimError::Capacity {
                what: format!("{n_atoms}-atom lattice"),
                limit: MAX_ATOMS,
            });
        }
        Ok(Self {
            basis: LatticeBasis { n_vars, n_vals },
            constraints: Vec::new(),
        })
    }

    /// Every variable takes at most one value.
    pub fn with_single_valued(mut self) -> Self {
        for var in 0..self.basis.n_vars {
            self.constraints.push(Constraint::AtMostOneValue(var));
        }
        self
    }

    pub fn nogood(mut self, atoms: &[(usize, usize)]) -> Result<Self> {
        self.basis.mask_of(atoms)?;
        self.constraints.push(Constraint::Nogood(atoms.to_vec()));
        Ok(self)
    }

    pub fn n_atoms(&self) -> usize {
        self.basis.n_atoms()
    }

    fn violates(&self, c: &Constraint, mask: usize) -> bool {
        let b = &self.basis;
        match c {
            Constraint::AtMostOneValue(var) => {
                (0..b.n_vals)
                    .filter(|&val| mask & b.atom_bit(*var, val) != 0)
                    .count()
                    > 1
            }
            Constraint::Nogood(atoms) => atoms
                .iter()
                .all(|&(var, val)| mask & b.atom_bit(var, val) != 0),
            Constraint::Custom(f) => f(mask),
        }
    }

    pub fn is_bad(&self, mask: usize) -> bool {
        self.constraints.iter().any(|c| self.violates(c, mask))
    }

    /// Every variable assigned exactly one value and no constraint violated.
    pub fn is_solution(&self, mask: usize) -> bool {
        let b = &self.basis;
        (0..b.n_vars).all(|var| {
            (0..b.n_vals)
                .filter(|&val| mask & b.atom_bit(var, val) != 0)
                .count()
                == 1
        }) && !self.is_bad(mask)
    }

    pub fn solutions(&self) -> Vec<usize> {
        (0..1usize << self.n_atoms())
            .filter(|&m| self.is_solution(m))
            .collect()
    }

    /// Single-valued variables plus a nogood on every cross-variable pair of
    /// atoms except those where both take the last value, leaving exactly one
    /// solution: every variable set to `n_vals − 1`.
    pub fn unique_solution_demo(n_vars: usize, n_vals: usize) -> Result<Self> {
        let mut csp = Self::new(n_vars, n_vals)?.with_single_valued();
        let last = n_vals - 1;
        for i in 0..n_vars {
            for j in i + 1..n_vars {
                for a in 0..n_vals {
                    for b in 0..n_vals {
                        if !(a == last && b == last) {
                            csp = csp.nogood(&[(i, a), (j, b)])?;
                        }
                    }
                }
            }
        }
        Ok(csp)
    }

    /// The 2-variable, 2-value instance of [`Self::unique_solution_demo`];
    /// its only solution is `v0 = 1, v1 = 1`.
    pub fn two_by_two_demo() -> Self {
        Self::unique_solution_demo(2, 2).expect("static instance")
    }
}

/// Column `s` spreads its amplitude evenly over the immediate supersets of `s`.
/// The full set has none and is sent back to the empty set.
pub fn raw_up_matrix<T: Real>(n_atoms: usize) -> Result<Matrix<T>> {
    if n_atoms == 0 || n_atoms > MAX_DENSE_ARITY {
        return Err(QsimError::Capacity {
            what: format!("{n_atoms}-atom dense move"),
            limit: MAX_DENSE_ARITY,
        });
    }
    let dim = 1usize << n_atoms;
    let mut m = Matrix::zeros(dim);
    for s in 0..dim {
        let missing: Vec<usize> = (0..n_atoms)
            .map(|b| 1 << b)
            .filter(|bit| s & bit == 0)
            .collect();
        if missing.is_empty() {
            m.set(0, s, Complex::new(T::one(), T::zero()));
            continue;
        }
        let w = T::one() / T::from_count(missing.len()).sqrt();
        for bit in missing {
            m.set(s | bit, s, Complex::new(w, T::zero()));
        }
    }
    Ok(m)
}

/// Thin real SVD `A = U·diag(σ)·Vᵀ` by one-sided Jacobi rotations.
/// Returns `(U, σ, V)` as row-major square matrices; `U` is completed to an
/// orthogonal matrix when `A` is rank deficient.
pub fn jacobi_svd(a: &[f64], dim: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    const THRESHOLD: f64 = 1e-12;
    const MAX_SWEEPS: usize = 100;
    let mut u = a.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let rotate = |m: &mut [f64], p: usize, q: usize, c: f64, s: f64| {
        for k in 0..dim {
            let (x, y) = (m[k * dim + p], m[k * dim + q]);
            m[k * dim + p] = c * x - s * y;
            m[k * dim + q] = s * x + c * y;
        }
    };
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..dim {
            for q in p + 1..dim {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..dim {
                    let (x, y) = (u[k * dim + p], u[k * dim + q]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= THRESHOLD * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = (0..dim)
        .map(|j| (0..dim).map(|k| u[k * dim + j].powi(2)).sum::<f64>().sqrt())
        .collect();
    let largest = sigma.iter().cloned().fold(0.0, f64::max);
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut columns: Vec<Option<Vec<f64>>> = vec![None; dim];
    for j in 0..dim {
        if sigma[j] > THRESHOLD * largest.max(1.0) {
            let col: Vec<f64> = (0..dim).map(|k| u[k * dim + j] / sigma[j]).collect();
            kept.push(col.clone());
            columns[j] = Some(col);
        }
    }
    // complete the left factor with standard basis vectors
    let mut candidate = 0;
    for slot in columns.iter_mut().filter(|c| c.is_none()) {
        loop {
            let mut e = vec![0.0; dim];
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for b in &kept {
                    let dot: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
                }
            }
            let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                e.iter_mut().for_each(|x| *x /= norm);
                kept.push(e.clone());
                *slot = Some(e);
                break;
            }
        }
    }
    let mut u_full = vec![0.0; dim * dim];
    for (j, col) in columns.into_iter().enumerate() {
        for (k, x) in col.expect("completed").into_iter().enumerate() {
            u_full[k * dim + j] = x;
        }
    }
    (u_full, sigma, v)
}

/// Nearest unitary to a real matrix: the polar factor `U·Vᵀ` of its SVD.
pub fn nearest_unitary<T: Real>(m: &Matrix<T>) -> Result<UnitaryOp<T>> {
    let dim = m.dim();
    if m.entries().iter().any(|z| z.im != T::zero()) {
        return Err(QsimError::domain("nearest_unitary expects a real matrix"));
    }
    let a: Vec<f64> = m.entries().iter().map(|z| z.re.as_f64()).collect();
    let (u, _, v) = jacobi_svd(&a, dim);
    let polar = Matrix::from_fn(dim, |r, c| {
        let x: f64 = (0..dim).map(|k| u[r * dim + k] * v[c * dim + k]).sum();
        Complex::new(T::lit(x), T::zero())
    });
    UnitaryOp::new(polar)
}

/// Method 1: nearest unitary to [`raw_up_matrix`].
pub fn up_move_method1<T: Real>(n_atoms: usize) -> Result<UnitaryOp<T>> {
    if n_atoms > MAX_SVD_ATOMS {
        return Err(QsimError::Capacity {
            what: format!("{n_atoms}-atom SVD move"),
            limit: MAX_SVD_ATOMS,
        });
    }
    nearest_unitary(&raw_up_matrix::<T>(n_atoms)?)
}

/// `e^{iπ·s/n}` for set size `s`. A heuristic default, not a derived optimum.
pub fn default_method2_phases<T: Real>(n_atoms: usize) -> Vec<Complex<T>> {
    (0..=n_atoms)
        .map(|s| cis(T::PI() * T::from_count(s) / T::from_count(n_atoms)))
        .collect()
}

fn check_phases<T: Real>(n_atoms: usize, d: &[Complex<T>]) -> Result<()> {
    if d.len() != n_atoms + 1 {
        return Err(QsimError::Dimension {
            expected: n_atoms + 1,
            found: d.len(),
        });
    }
    if let Some(s) = d
        .iter()
        .position(|z| (z.norm() - T::one()).abs() > T::TOLERANCE)
    {
        return Err(QsimError::domain(format!(
            "entry for set size {s} is not unimodular"
        )));
    }
    Ok(())
}

/// Method 2: `W·D·W` with `D` diagonal, `D_bb = d[popcount(b)]`.
pub fn up_move_method2<T: Real>(n_atoms: usize, d: &[Complex<T>]) -> Result<UnitaryOp<T>> {
    check_phases(n_atoms, d)?;
    let w = walsh::<T>(n_atoms)?;
    let diag: Vec<Complex<T>> = (0..1usize << n_atoms)
        .map(|b| d[b.count_ones() as usize])
        .collect();
    UnitaryOp::new(w.matrix().mul(&Matrix::diagonal(&diag)).mul(w.matrix()))
}

/// `W·D·W` applied without the dense matrix.
fn apply_method2<T: Real>(state: &StateVector<T>, d: &[Complex<T>]) -> StateVector<T> {
    let fwht = |amps: &mut [Complex<T>]| {
        let scale = T::FRAC_1_SQRT_2();
        let mut h = 1;
        while h < amps.len() {
            for block in amps.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (x, y) in lo.iter_mut().zip(hi) {
                    let (a, b) = (*x, *y);
                    *x = (a + b) * scale;
                    *y = (a - b) * scale;
                }
            }
            h *= 2;
        }
    };
    let mut amps = state.amplitudes().to_vec();
    fwht(&mut amps);
    for (b, a) in amps.iter_mut().enumerate() {
        *a *= d[b.count_ones() as usize];
    }
    fwht(&mut amps);
    StateVector::from_raw(state.n_qubits(), amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhasePolicy {
    InvertBad,
    RandomPhaseBad,
    None,
}

impl FromStr for PhasePolicy {
    type Err = QsimError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "invert" | "invert_bad" => Ok(PhasePolicy::InvertBad),
            "random" | "random_phase_bad" => Ok(PhasePolicy::RandomPhaseBad),
            "none" => Ok(PhasePolicy::None),
            other => Err(QsimError::domain(format!("unknown phase policy `{other}`"))),
        }
    }
}

pub fn apply_phase_policy<T: Real>(
    policy: PhasePolicy,
    csp: &CspInstance,
    state: &StateVector<T>,
    rng: &mut RngStream,
) -> Result<StateVector<T>> {
    let n = csp.n_atoms();
    if state.n_qubits() != n {
        return Err(QsimError::Arity {
            expected: n,
            found: state.n_qubits(),
        });
    }
    match policy {
        PhasePolicy::None => Ok(state.clone()),
        PhasePolicy::InvertBad => {
            let csp = csp.clone();
            flip_sign(&Predicate::new(n, move |x| csp.is_bad(x as usize)), state)
        }
        PhasePolicy::RandomPhaseBad => {
            let amps = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(mask, &a)| {
                    if csp.is_bad(mask) {
                        a * cis(T::lit(2.0 * std::f64::consts::PI * rng.next_f64()))
                    } else {
                        a
                    }
                })
                .collect();
            Ok(StateVector::from_raw(n, amps))
        }
    }
}

#[derive(Debug, Clone)]
pub enum UpMethod<T> {
    /// Nearest unitary to the superset-spreading matrix.
    Svd,
    /// `W·D·W` with the given per-size phases.
    Walsh(Vec<Complex<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoggResult {
    pub mask: usize,
    pub assignment: Vec<(usize, usize)>,
    pub is_solution: bool,
    /// Exact mass on solutions just before the final measurement.
    pub solution_probability: f64,
    /// Mass on each lattice level before measuring.
    pub level_mass: Vec<f64>,
    pub final_norm: f64,
}

/// Final state of the search, before measurement.
pub fn hogg_evolve<T: Real>(
    csp: &CspInstance,
    steps: usize,
    method: &UpMethod<T>,
    policy: PhasePolicy,
    rng: &mut RngStream,
) -> Result<StateVector<T>> {
    let n = csp.n_atoms();
    let dense = match method {
        UpMethod::Svd => Some(up_move_method1::<T>(n)?),
        UpMethod::Walsh(d) => {
            check_phases(n, d)?;
            None
        }
    };
    let targets: Vec<usize> = (0..n).collect();
    let mut state = StateVector::<T>::basis(n, 0)?;
    for _ in 0..steps {
        state = match (&dense, method) {
            (Some(u), _) => crate::ops::apply(u, &targets, &state)?,
            (None, UpMethod::Walsh(d)) => apply_method2(&state, d),
            (None, UpMethod::Svd) => unreachable!(),
        };
        state = apply_phase_policy(policy, csp, &state, rng)?;
    }
    Ok(state)
}

/// Climb the lattice for `steps` rounds of move-then-phase and measure once.
pub fn hogg_search<T: Real>(
    csp: &CspInstance,
    steps: usize,
    method: &UpMethod<T>,
    policy: PhasePolicy,
    rng: &mut RngStream,
) -> Result<HoggResult> {
    let n = csp.n_atoms();
    let state = hogg_evolve(csp, steps, method, policy, rng)?;
    let probs = state.probabilities();
    let sol: Vec<T> = csp.solutions().into_iter().map(|m| probs[m]).collect();
    let mut level_mass = vec![0.0; n + 1];
    for (mask, p) in probs.iter().enumerate() {
        level_mass[mask.count_ones() as usize] += p.as_f64();
    }
    let all: Vec<usize> = (0..n).collect();
    let mask = measure::probabilities(&state, &all)?.sample(rng);
    Ok(HoggResult {
        mask,
        assignment: csp.basis.set_of(mask),
        is_solution: csp.is_solution(mask),
        solution_probability: pairwise_sum(&sol).as_f64(),
        level_mass,
        final_norm: state.norm().as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_matrix_matches_three_atom_display() {
        let m = raw_up_matrix::<f64>(3).unwrap();
        let (a, b) = (1.0 / 3f64.sqrt(), 1.0 / 2f64.sqrt());
        let expected = Matrix::<f64>::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            &[a, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[a, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, b, b, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[a, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, b, 0.0, 0.0, b, 0.0, 0.0, 0.0],
            &[0.0, 0.0, b, 0.0, b, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(m.max_abs_diff(&expected) < 1e-15);
        assert!(!m.is_unitary());
    }

    #[test]
    fn svd_reconstructs() {
        let m = raw_up_matrix::<f64>(3).unwrap();
        let a: Vec<f64> = m.entries().iter().map(|z| z.re).collect();
        let (u, s, v) = jacobi_svd(&a, 8);
        for r in 0..8 {
            for c in 0..8 {
                let x: f64 = (0..8).map(|k| u[r * 8 + k] * s[k] * v[c * 8 + k]).sum();
                assert!((x - a[r * 8 + c]).abs() < 1e-12);
                let ortho_u: f64 = (0..8).map(|k| u[k * 8 + r] * u[k * 8 + c]).sum();
                assert!((ortho_u - f64::from(u8::from(r == c))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn method1_is_unitary() {
        for n in 1..=4 {
            assert!(up_move_method1::<f64>(n).unwrap().unitarity_defect() < 1e-9);
        }
    }

    #[test]
    fn method2_cases() {
        let ones = vec![Complex::new(1.0, 0.0); 4];
        let id = up_move_method2::<f64>(3, &ones).unwrap();
        assert!(id.max_abs_diff(&Matrix::identity(8)) < 1e-12);
        let bad = vec![Complex::new(0.5, 0.0); 4];
        assert!(up_move_method2::<f64>(3, &bad).is_err());
        let d = default_method2_phases::<f64>(3);
        let op = up_move_method2::<f64>(3, &d).unwrap();
        assert!(op.unitarity_defect() < 1e-10);
        // entries depend only on |r|, |s|, |r ∩ s|
        for r in 0..8usize {
            for s in 0..8usize {
                for r2 in 0..8usize {
                    for s2 in 0..8usize {
                        let key = |a: usize, b: usize| {
                            (a.count_ones(), b.count_ones(), (a & b).count_ones())
                        };
                        if key(r, s) == key(r2, s2) {
                            assert!((op.get(r, s) - op.get(r2, s2)).norm() < 1e-12);
                        }
                    }
                }
            }
        }
        let s = StateVector::<f64>::basis(3, 2).unwrap();
        let fast = apply_method2(&s, &d);
        let dense = crate::ops::apply(&op, &[0, 1, 2], &s).unwrap();
        assert!(fast.approx_eq(&dense, 1e-12));
    }

    #[test]
    fn lattice_bijection_and_bad_sets() {
        let csp = CspInstance::new(2, 2).unwrap().with_single_valued();
        let b = csp.basis;
        for mask in 0..16 {
            assert_eq!(b.mask_of(&b.set_of(mask)).unwrap(), mask);
        }
        let uniform = StateVector::<f64>::uniform(4).unwrap();
        let only_v0 = CspInstance {
            basis: b,
            constraints: vec![Constraint::AtMostOneValue(0)],
        };
        let out = apply_phase_policy(
            PhasePolicy::InvertBad,
            &only_v0,
            &uniform,
            &mut RngStream::new(0),
        )
        .unwrap();
        let both = b.atom_bit(0, 0) | b.atom_bit(0, 1);
        for mask in 0..16 {
            let negated = out.amplitude(mask).re < 0.0;
            assert_eq!(negated, mask & both == both, "mask {mask:04b}");
        }
    }

    #[test]
    fn inverting_bad_sets_helps_on_demo() {
        let csp = CspInstance::two_by_two_demo();
        let walsh = UpMethod::Walsh(default_method2_phases::<f64>(4));
        let p = |m: &UpMethod<f64>, steps, policy| {
            hogg_search(&csp, steps, m, policy, &mut RngStream::new(0))
                .unwrap()
                .solution_probability
        };
        assert!(p(&walsh, 3, PhasePolicy::InvertBad) > p(&walsh, 3, PhasePolicy::None) + 0.1);
        assert!(
            p(&UpMethod::Svd, 6, PhasePolicy::InvertBad)
                > p(&UpMethod::Svd, 6, PhasePolicy::None) + 0.1
        );
    }

    #[test]
    fn demo_has_one_solution_and_zero_steps_is_empty() {
        let csp = CspInstance::two_by_two_demo();
        assert_eq!(
            csp.solutions(),
            vec![csp.basis.mask_of(&[(0, 1), (1, 1)]).unwrap()]
        );
        assert_eq!(csp.constraints.len(), 5);
        assert_eq!(
            CspInstance::unique_solution_demo(3, 2)
                .unwrap()
                .solutions()
                .len(),
            1
        );
        let r = hogg_search::<f64>(
            &csp,
            0,
            &UpMethod::Svd,
            PhasePolicy::None,
            &mut RngStream::new(1),
        )
        .unwrap();
        assert_eq!(r.mask, 0);
        assert!(r.assignment.is_empty());
    }
}
