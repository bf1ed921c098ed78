//! Standard-basis measurement of qubit subsets.

use crate::error::{QsimError, Result};
use crate::qstate::{gather_bits, validate_qubits, StateVector};
use crate::scalar::{pairwise_sum, Real};

/// Seeded SplitMix64 stream.
///
/// The state advances by the golden-ratio increment and each output is a
/// fixed xor-shift-multiply finalizer of the new state, so a seed produces the
/// same sequence on every platform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    state: u64,
}

impl RngStream {
    const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        Self { seed, state: seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform in `[0, bound)` by rejection, no modulo bias.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform in `[lo, hi]`.
    pub fn next_in_range(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range");
        lo + self.next_below(hi - lo + 1)
    }

    /// Independent child stream, e.g. one per trial.
    pub fn fork(&mut self) -> RngStream {
        RngStream::new(self.next_u64())
    }

    /// Standard normal draw (Box-Muller, one of the pair discarded).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// State with independent complex Gaussian amplitudes, normalized; uniform on
/// the unit sphere.
pub fn random_state<T: Real>(n_qubits: usize, rng: &mut RngStream) -> Result<StateVector<T>> {
    let amps = (0..1usize << n_qubits)
        .map(|_| {
            let re = rng.next_gaussian();
            num_complex::Complex::new(T::lit(re), T::lit(rng.next_gaussian()))
        })
        .collect();
    StateVector::normalized(amps)
}

/// Outcome probabilities over a measured register, dense in outcome index.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    n_bits: usize,
    probabilities: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn new(probabilities: Vec<T>) -> Result<Self> {
        let len = probabilities.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::domain(format!(
                "distribution length {len} is not a power of two"
            )));
        }
        if probabilities.iter().any(|&p| p.is_nan() || p < T::zero()) {
            return Err(QsimError::domain("negative or NaN probability"));
        }
        let total = pairwise_sum(&probabilities);
        if (total - T::one()).abs() > T::lit(1e-9).max(T::TOLERANCE) {
            return Err(QsimError::Normalization {
                deviation: (total - T::one()).as_f64(),
            });
        }
        Ok(Self {
            n_bits: len.trailing_zeros() as usize,
            probabilities,
        })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, outcome: usize) -> T {
        self.probabilities
            .get(outcome)
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.probabilities
    }

    /// Outcomes with non-zero probability, ascending.
    pub fn support(&self, tol: T) -> Vec<usize> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// `(outcome, probability)` pairs, ascending by outcome.
    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.probabilities.iter().copied().enumerate()
    }

    /// Total probability of `outcomes`.
    pub fn mass<I: IntoIterator<Item = usize>>(&self, outcomes: I) -> T {
        let values: Vec<T> = outcomes.into_iter().map(|o| self.get(o)).collect();
        pairwise_sum(&values)
    }

    pub fn total_variation(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len(), "distribution sizes differ");
        let diffs: Vec<T> = self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (*a - *b).abs())
            .collect();
        pairwise_sum(&diffs) / T::lit(2.0)
    }

    /// Draw an outcome with the inverse-CDF rule used by [`measure`].
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        inverse_cdf(&self.probabilities, T::lit(rng.next_f64()))
    }

    /// Point mass at `outcome` within `tol`.
    pub fn is_point_mass(&self, outcome: usize, tol: T) -> bool {
        (self.get(outcome) - T::one()).abs() <= tol
    }

    /// Most likely outcome (lowest index on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    /// CSV text: header `index,probability`, 10 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,probability\n");
        for (i, p) in self.iter() {
            out.push_str(&format!(
                "{i},{}\n",
                crate::scalar::format_significant(p.as_f64(), 10)
            ));
        }
        out
    }
}

/// First outcome whose cumulative probability exceeds `u`, never selecting a
/// zero-probability outcome. Rounding past the end falls back to the last
/// outcome with positive probability.
fn inverse_cdf<T: Real>(probabilities: &[T], u: T) -> usize {
    let mut cumulative = T::zero();
    let mut last_positive = None;
    for (i, &p) in probabilities.iter().enumerate() {
        if p <= T::zero() {
            continue;
        }
        cumulative += p;
        last_positive = Some(i);
        if u < cumulative {
            return i;
        }
    }
    last_positive.expect("distribution has positive mass")
}

/// Result of measuring a subset: the outcome, its probability, and the
/// renormalized post-measurement state over all qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T> {
    pub outcome: usize,
    pub probability: T,
    pub post_state: StateVector<T>,
}

/// Probability of every outcome of `subset`, `subset[0]` being the most
/// significant outcome bit. Terms are accumulated in ascending basis order.
pub fn probabilities<T: Real>(state: &StateVector<T>, subset: &[usize]) -> Result<Distribution<T>> {
    let n = state.n_qubits();
    validate_qubits(subset, n)?;
    let mut probs = vec![T::zero(); 1 << subset.len()];
    for (index, a) in state.amplitudes().iter().enumerate() {
        probs[gather_bits(index, n, subset)] += a.norm_sqr();
    }
    // tolerate accumulated drift in the state norm
    let total = pairwise_sum(&probs);
    if (total - T::one()).abs() > T::TOLERANCE {
        for p in &mut probs {
            *p /= total;
        }
    }
    Distribution::new(probs)
}

/// Measure `subset`, sampling the outcome from `rng`.
pub fn measure<T: Real>(
    state: &StateVector<T>,
    subset: &[usize],
    rng: &mut RngStream,
) -> Result<MeasurementOutcome<T>> {
    let dist = probabilities(state, subset)?;
    let outcome = dist.sample(rng);
    project(state, subset, outcome)
}

/// Project onto `outcome` of `subset` without sampling.
///
/// Errors if the outcome has zero probability.
pub fn project<T: Real>(
    state: &StateVector<T>,
    subset: &[usize],
    outcome: usize,
) -> Result<MeasurementOutcome<T>> {
    let n = state.n_qubits();
    validate_qubits(subset, n)?;
    if outcome >= 1 << subset.len() {
        return Err(QsimError::domain(format!(
            "outcome {outcome} out of range for {} measured qubits",
            subset.len()
        )));
    }
    let mut amps = state.amplitudes().to_vec();
    let mut kept = Vec::new();
    for (index, a) in amps.iter_mut().enumerate() {
        if gather_bits(index, n, subset) == outcome {
            kept.push(a.norm_sqr());
        } else {
            *a = num_complex::Complex::new(T::zero(), T::zero());
        }
    }
    let probability = pairwise_sum(&kept);
    if probability.is_nan() || probability <= T::zero() {
        return Err(QsimError::domain(format!(
            "outcome {outcome} has zero probability"
        )));
    }
    let scale = T::one() / probability.sqrt();
    for a in &mut amps {
        *a = a.scale(scale);
    }
    Ok(MeasurementOutcome {
        outcome,
        probability,
        post_state: StateVector::from_raw(n, amps),
    })
}
