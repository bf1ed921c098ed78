//! Grover search: sign flip on solutions, inversion about the average, and
//! the success-probability curve.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::circuit::{apply_oracle, ClassicalOracle};
use crate::error::{QsimError, Result};
use crate::measure::{self, RngStream};
use crate::ops::{walsh, Matrix, UnitaryOp};
use crate::qstate::StateVector;
use crate::scalar::{format_significant, pairwise_sum, Real};

/// Largest search register simulated.
pub const MAX_SEARCH_QUBITS: usize = 24;

/// Total boolean function on `[0, 2^n)`.
#[derive(Clone)]
pub struct Predicate {
    n: usize,
    p: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Predicate")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl Predicate {
    pub fn new(n: usize, p: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Self { n, p: Arc::new(p) }
    }

    pub fn from_solutions(n: usize, solutions: &[u64]) -> Result<Self> {
        if let Some(&bad) = solutions.iter().find(|&&s| n < 64 && s >> n != 0) {
            return Err(QsimError::domain(format!(
                "solution {bad} does not fit in {n} bits"
            )));
        }
        let set: std::collections::BTreeSet<u64> = solutions.iter().copied().collect();
        Ok(Self::new(n, move |x| set.contains(&x)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: u64) -> bool {
        (self.p)(x)
    }

    pub fn solutions(&self) -> Vec<u64> {
        (0..1u64 << self.n).filter(|&x| self.eval(x)).collect()
    }
}

fn check_register<T: Real>(p: &Predicate, state: &StateVector<T>) -> Result<()> {
    if state.n_qubits() != p.n {
        return Err(QsimError::Arity {
            expected: p.n,
            found: state.n_qubits(),
        });
    }
    Ok(())
}

/// Negate the amplitude of every `|x⟩` with `p(x)`.
pub fn flip_sign<T: Real>(p: &Predicate, state: &StateVector<T>) -> Result<StateVector<T>> {
    check_register(p, state)?;
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, &a)| if p.eval(x as u64) { -a } else { a })
        .collect();
    Ok(StateVector::from_raw(state.n_qubits(), amps))
}

/// [`flip_sign`] through `U_P` on `|x⟩ ⊗ b`, `b = (|0⟩ − |1⟩)/√2` as an extra
/// last qubit. The ancilla is checked to come back unentangled, then dropped.
pub fn flip_sign_with_ancilla<T: Real>(
    p: &Predicate,
    state: &StateVector<T>,
) -> Result<StateVector<T>> {
    check_register(p, state)?;
    let n = p.n;
    let b = StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])?;
    let padded = state.tensor(&b)?;
    let pred = p.clone();
    let oracle = ClassicalOracle::new(n, 1, move |x| u64::from(pred.eval(x)));
    let inputs: Vec<usize> = (0..n).collect();
    let out = apply_oracle(&oracle, &padded, &inputs, &[n])?;

    let root2 = T::lit(std::f64::consts::SQRT_2);
    let amps = out.amplitudes();
    let mut reduced = Vec::with_capacity(1 << n);
    for x in 0..1usize << n {
        let (zero, one) = (amps[2 * x], amps[2 * x + 1]);
        if (zero + one).norm() > T::TOLERANCE {
            return Err(QsimError::Integrity("ancilla became entangled".into()));
        }
        reduced.push(zero * root2);
    }
    Ok(StateVector::from_raw(n, reduced))
}

/// Inversion about the average as the dense matrix `W·R·W`,
/// `R = diag(1, −1, …, −1)`.
pub fn diffusion<T: Real>(n: usize) -> Result<UnitaryOp<T>> {
    let w = walsh::<T>(n)?;
    let dim = 1usize << n;
    let mut r = vec![Complex::new(-T::one(), T::zero()); dim];
    r[0] = Complex::new(T::one(), T::zero());
    let d = w.matrix().mul(&Matrix::diagonal(&r)).mul(w.matrix());
    UnitaryOp::new(d)
}

/// `a_i ↦ 2A − a_i` with `A` the mean amplitude; the same map as
/// [`diffusion`] without building the matrix.
pub fn invert_about_average<T: Real>(state: &StateVector<T>) -> StateVector<T> {
    let amps = state.amplitudes();
    let len = T::from_count(amps.len());
    let re: Vec<T> = amps.iter().map(|a| a.re).collect();
    let im: Vec<T> = amps.iter().map(|a| a.im).collect();
    let mean = Complex::new(pairwise_sum(&re) / len, pairwise_sum(&im) / len);
    let two = T::lit(2.0);
    let out = amps.iter().map(|&a| mean * two - a).collect();
    StateVector::from_raw(state.n_qubits(), out)
}

/// `⌊π/4 · √2^n⌋`.
pub fn default_iterations(n: usize) -> usize {
    (FRAC_PI_4 * (2f64).powf(n as f64 / 2.0)).floor() as usize
}

/// `sin²((2k+1)·asin(√(s/2^n)))` for `s` solutions after `k` iterations.
pub fn analytic_success(n: usize, solutions: usize, k: usize) -> f64 {
    let theta = (solutions as f64 / (2f64).powi(n as i32)).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverRun {
    pub iterations: usize,
    /// Solution mass before any iteration (index 0) and after each one.
    pub success_curve: Vec<f64>,
    pub result: u64,
    pub is_solution: bool,
}

impl GroverRun {
    pub fn success_probability(&self) -> f64 {
        *self
            .success_curve
            .last()
            .expect("curve has the initial point")
    }

    pub fn failure_rate(&self) -> f64 {
        1.0 - self.success_probability()
    }

    /// `iteration,probability` rows.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("iteration,probability\n");
        for (k, p) in self.success_curve.iter().enumerate() {
            out.push_str(&format!("{k},{}\n", format_significant(*p, 10)));
        }
        out
    }
}

/// Start uniform, repeat sign flip and diffusion, measure once.
pub fn grover_search(
    p: &Predicate,
    iterations: Option<usize>,
    rng: &mut RngStream,
) -> Result<GroverRun> {
    grover_search_with::<f64>(p, iterations, rng)
}

pub fn grover_search_with<T: Real>(
    p: &Predicate,
    iterations: Option<usize>,
    rng: &mut RngStream,
) -> Result<GroverRun> {
    let n = p.n;
    if n == 0 || n > MAX_SEARCH_QUBITS {
        return Err(QsimError::Capacity {
            what: format!("{n}-qubit search register"),
            limit: MAX_SEARCH_QUBITS,
        });
    }
    let iterations = iterations.unwrap_or_else(|| default_iterations(n));
    let marked: Vec<usize> = (0..1usize << n).filter(|&x| p.eval(x as u64)).collect();
    let mass = |s: &StateVector<T>| -> f64 {
        let terms: Vec<T> = marked.iter().map(|&x| s.amplitude(x).norm_sqr()).collect();
        pairwise_sum(&terms).as_f64()
    };

    let mut state = StateVector::<T>::uniform(n)?;
    let mut curve = Vec::with_capacity(iterations + 1);
    curve.push(mass(&state));
    for _ in 0..iterations {
        state = invert_about_average(&flip_sign(p, &state)?);
        curve.push(mass(&state));
    }
    let all: Vec<usize> = (0..n).collect();
    let result = measure::probabilities(&state, &all)?.sample(rng) as u64;
    Ok(GroverRun {
        iterations,
        success_curve: curve,
        result,
        is_solution: p.eval(result),
    })
}
