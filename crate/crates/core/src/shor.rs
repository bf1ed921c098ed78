//! Shor factoring: QFT (matrix and gate form), period-finding state, exact
//! continued-fraction period extraction, and the classical retry loop.
//!
//! Register layout for a modulus `M`: qubits `0..m` hold `x` (qubit 0 is the
//! most significant bit of `x`), qubits `m..m + n_out` hold `f(x) = a^x mod M`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::circuit::{apply_oracle, run, Circuit, ClassicalOracle, OracleRegistry};
use crate::error::{QsimError, Result};
use crate::measure::{self, Distribution, RngStream};
use crate::ops::{Matrix, UnitaryOp, MAX_DENSE_ARITY};
use crate::qstate::StateVector;
use crate::scalar::{cis, format_significant, Real};

/// Largest modulus accepted at all.
pub const MAX_MODULUS: u64 = 512;
/// Largest modulus simulated without `allow_large`.
pub const DEFAULT_MODULUS_LIMIT: u64 = 64;

/// Smallest `m` with `M² ≤ 2^m`, which also gives `2^m < 2M²`.
pub fn choose_m(modulus: u64) -> usize {
    assert!(modulus >= 2, "modulus must be at least 2");
    let square = u128::from(modulus) * u128::from(modulus);
    let mut m = 0;
    while (1u128 << m) < square {
        m += 1;
    }
    m
}

/// Bits needed for values in `[0, M)`.
pub fn output_bits(modulus: u64) -> usize {
    (64 - (modulus - 1).leading_zeros() as usize).max(1)
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = u128::from(modulus);
    let mut b = u128::from(base) % m;
    let mut acc = 1u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Multiplicative order of `a` mod `M` by brute force; `None` if not coprime.
pub fn multiplicative_order(a: u64, modulus: u64) -> Option<u64> {
    if a.gcd(&modulus) != 1 {
        return None;
    }
    let mut value = a % modulus;
    let mut r = 1;
    while value != 1 % modulus {
        value = (u128::from(value) * u128::from(a) % u128::from(modulus)) as u64;
        r += 1;
    }
    Some(r)
}

/// `|x⟩ ↦ 2^{−m/2} Σ_c e^{2πi·cx/2^m} |c⟩`.
pub fn qft_matrix<T: Real>(m: usize) -> Result<UnitaryOp<T>> {
    if m == 0 {
        return Err(QsimError::domain("QFT needs at least one qubit"));
    }
    if m > MAX_DENSE_ARITY {
        return Err(QsimError::Capacity {
            what: format!("{m}-qubit dense QFT"),
            limit: MAX_DENSE_ARITY,
        });
    }
    let dim = 1usize << m;
    let scale = T::one() / T::from_count(dim).sqrt();
    // reduce cx mod 2^m before converting so large products keep precision
    let matrix = Matrix::from_fn(dim, |c, x| {
        let k = (c * x) % dim;
        cis(T::lit(2.0 * PI * k as f64 / dim as f64)) * scale
    });
    UnitaryOp::new(matrix)
}

/// Gate form of the QFT: for each qubit `j` from the most significant, `H_j`
/// followed by `S_{j,k}` = cphase(π/2^{k−j}) for every `k > j`, then a swap
/// network reversing qubit order. `m(m+1)/2` gates before the reversal.
pub fn qft_circuit(m: usize) -> Circuit {
    let mut c = Circuit::new(m);
    for j in 0..m {
        c.h(j).expect("in range");
        for k in j + 1..m {
            c.cphase(j, k, PI / f64::from(1u32 << (k - j)))
                .expect("in range");
        }
    }
    for j in 0..m / 2 {
        c.swap(j, m - 1 - j).expect("in range");
    }
    c
}

/// The `M`-periodic oracle `x ↦ a^x mod M` on `m` input bits.
pub fn modexp_oracle(a: u64, modulus: u64, m: usize) -> ClassicalOracle {
    ClassicalOracle::new(m, output_bits(modulus), move |x| mod_pow(a, x, modulus))
}

/// `2^{−m/2} Σ_x |x, a^x mod M⟩`, built with `H` on each x-qubit and `U_f`.
pub fn period_state<T: Real>(a: u64, modulus: u64, m: usize) -> Result<StateVector<T>> {
    let g = a.gcd(&modulus);
    if g != 1 {
        return Err(QsimError::SharedFactor { a, gcd: g });
    }
    let n_out = output_bits(modulus);
    let n = m + n_out;
    if n > crate::qstate::MAX_QUBITS {
        return Err(QsimError::Capacity {
            what: format!("{n}-qubit period-finding state"),
            limit: crate::qstate::MAX_QUBITS,
        });
    }
    let mut walsh = Circuit::new(n);
    for q in 0..m {
        walsh.h(q)?;
    }
    let uniform = run(&walsh, &StateVector::basis(n, 0)?, &OracleRegistry::new())?;
    let x_reg: Vec<usize> = (0..m).collect();
    let y_reg: Vec<usize> = (m..n).collect();
    apply_oracle(&modexp_oracle(a, modulus, m), &uniform, &x_reg, &y_reg)
}

/// One row `(i, a_i, p_i, q_i, ε_i)` of the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFractionRow {
    pub i: usize,
    pub a: u128,
    pub p: u128,
    pub q: u128,
    pub epsilon: Ratio<u128>,
}

impl ContinuedFractionRow {
    pub fn epsilon_f64(&self) -> f64 {
        self.epsilon.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ContinuedFractionRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} | {} | {} | {}",
            self.i,
            self.a,
            self.p,
            self.q,
            format_significant(self.epsilon_f64(), 7)
        )
    }
}

/// Expansion of `v/2^m` up to the first `q_{n+1} ≥ M` (that row included).
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    pub rows: Vec<ContinuedFractionRow>,
    /// Denominator of the last convergent with `q < M`.
    pub q: u64,
    /// Numerator of the same convergent.
    pub p: u64,
}

impl ContinuedFraction {
    pub fn table(&self) -> String {
        let mut out = String::from("i | a_i | p_i | q_i | eps_i\n");
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }
}

/// Period guess from a Step-4 measurement, using exact rational arithmetic.
pub fn extract_period(v: u64, m: usize, modulus: u64) -> Result<ContinuedFraction> {
    if m == 0 || m > 64 {
        return Err(QsimError::domain(format!("register size {m} unsupported")));
    }
    let denom = 1u128 << m;
    if u128::from(v) >= denom {
        return Err(QsimError::domain(format!(
            "v = {v} does not fit in {m} bits"
        )));
    }
    if v == 0 {
        return Err(QsimError::NoInformation);
    }
    let bound = u128::from(modulus);
    let x = Ratio::new(u128::from(v), denom);

    let a0 = x.to_integer();
    let mut eps = x - Ratio::from_integer(a0);
    let mut rows = vec![ContinuedFractionRow {
        i: 0,
        a: a0,
        p: a0,
        q: 1,
        epsilon: eps,
    }];
    let (mut p_prev, mut q_prev) = (1u128, 0u128);
    let (mut p_cur, mut q_cur) = (a0, 1u128);
    while !eps.is_zero() {
        let inv = eps.recip();
        let a = inv.to_integer();
        eps = inv - Ratio::from_integer(a);
        let p = a * p_cur + p_prev;
        let q = a * q_cur + q_prev;
        rows.push(ContinuedFractionRow {
            i: rows.len(),
            a,
            p,
            q,
            epsilon: eps,
        });
        if q >= bound {
            break;
        }
        (p_prev, q_prev, p_cur, q_cur) = (p_cur, q_cur, p, q);
    }
    Ok(ContinuedFraction {
        rows,
        q: q_cur as u64,
        p: p_cur as u64,
    })
}

/// Why an attempt produced no factor, following the four listed cases plus
/// the uninformative `v = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureCause {
    /// `v` was not close enough to a multiple of `2^m/r`.
    PoorApproximation,
    /// `j` and `r` shared a factor, so `q` divides the period.
    GuessDividesPeriod,
    /// Step 5 only produced the trivial divisors.
    TrivialFactors,
    /// The period of `a^x mod M` is odd.
    OddPeriod,
    NoInformation,
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureCause::PoorApproximation => "v not close to a multiple of 2^m/r",
            FailureCause::GuessDividesPeriod => "q is a proper divisor of the period",
            FailureCause::TrivialFactors => "only trivial factors",
            FailureCause::OddPeriod => "odd period",
            FailureCause::NoInformation => "v = 0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttemptOutcome {
    /// `gcd(a, M) > 1` gave a factor without any quantum step.
    SharedFactor(u64),
    Factored,
    Failed(FailureCause),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttemptRecord {
    pub a: u64,
    /// Step-2 output-register value; `None` when skipped or not reached.
    pub u: Option<u64>,
    pub v: Option<u64>,
    pub continued_fraction: Option<ContinuedFraction>,
    pub q: Option<u64>,
    /// `a^{q/2} ± 1` and their gcds with `M`.
    pub step5: Option<Step5>,
    pub outcome: AttemptOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step5 {
    /// `a^{q/2} mod M`.
    pub power: u64,
    /// `a^{q/2}` itself when it fits in 128 bits.
    pub exact_power: Option<u128>,
    pub gcd_minus: u64,
    pub gcd_plus: u64,
}

#[derive(Debug, Clone)]
pub struct FactoringConfig {
    pub modulus: u64,
    pub seed: u64,
    pub max_attempts: usize,
    pub skip_step2_measurement: bool,
    /// Forced values replay a fixed trace; they apply to the first attempt only.
    pub forced_a: Option<u64>,
    pub forced_u: Option<u64>,
    pub forced_v: Option<u64>,
    /// Lift the default simulation limit of `M ≤ 64`.
    pub allow_large: bool,
    /// Keep the Step-2 and Step-3 distributions of the last simulated attempt.
    pub capture_distributions: bool,
}

impl FactoringConfig {
    pub fn new(modulus: u64, seed: u64) -> Self {
        Self {
            modulus,
            seed,
            max_attempts: 32,
            skip_step2_measurement: false,
            forced_a: None,
            forced_u: None,
            forced_v: None,
            allow_large: false,
            capture_distributions: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FactoringTrace {
    pub modulus: u64,
    pub m: usize,
    pub n_out: usize,
    pub attempts: Vec<AttemptRecord>,
    pub factors: BTreeSet<u64>,
    /// x-register distribution after Step 2 (uniform before the QFT).
    pub step2_distribution: Option<Vec<f64>>,
    /// x-register distribution after the QFT.
    pub step3_distribution: Option<Vec<f64>>,
}

impl FactoringTrace {
    pub fn last(&self) -> Option<&AttemptRecord> {
        self.attempts.last()
    }

    pub fn a(&self) -> Option<u64> {
        self.last().map(|r| r.a)
    }

    pub fn u(&self) -> Option<u64> {
        self.last().and_then(|r| r.u)
    }

    pub fn v(&self) -> Option<u64> {
        self.last().and_then(|r| r.v)
    }

    pub fn q(&self) -> Option<u64> {
        self.last().and_then(|r| r.q)
    }

    pub fn succeeded(&self) -> bool {
        !self.factors.is_empty()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(p)` if `n = p^k` for a prime `p` and `k ≥ 2`.
fn prime_power_base(n: u64) -> Option<u64> {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut rest = n;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            return (rest == 1).then_some(p);
        }
        p += 1;
    }
    None
}

/// Reject moduli the quantum pipeline is not meant for.
pub fn validate_modulus(modulus: u64, allow_large: bool) -> Result<()> {
    if modulus < 3 {
        return Err(QsimError::domain(format!("M = {modulus} is too small")));
    }
    if modulus.is_multiple_of(2) {
        return Err(QsimError::domain(format!(
            "M = {modulus} is even; 2 is a factor"
        )));
    }
    if is_prime(modulus) {
        return Err(QsimError::domain(format!("M = {modulus} is prime")));
    }
    if let Some(p) = prime_power_base(modulus) {
        return Err(QsimError::domain(format!(
            "M = {modulus} is a power of the prime {p}"
        )));
    }
    if modulus > MAX_MODULUS {
        return Err(QsimError::domain(format!(
            "M = {modulus} exceeds {MAX_MODULUS}"
        )));
    }
    if modulus > DEFAULT_MODULUS_LIMIT && !allow_large {
        return Err(QsimError::Capacity {
            what: format!("M = {modulus} without the large-modulus opt-in"),
            limit: DEFAULT_MODULUS_LIMIT as usize,
        });
    }
    Ok(())
}

/// The x-register part of a state whose output register is a basis state.
fn x_slice(state: &StateVector<f64>, m: usize, n_out: usize, u: u64) -> StateVector<f64> {
    let amps = state.amplitudes();
    let slice: Vec<_> = (0..1usize << m)
        .map(|x| amps[(x << n_out) | u as usize])
        .collect();
    StateVector::from_raw(m, slice)
}

/// Distributions shown before and after the QFT for one base `a`.
#[derive(Debug, Clone)]
pub struct ShorDistributions {
    pub u: u64,
    pub step2: Distribution<f64>,
    pub step3: Distribution<f64>,
}

/// Step 2 (measure the output register, forced to `u` if given) and Step 3
/// (QFT of the x-register), returning the x-register distributions.
pub fn step_distributions(
    modulus: u64,
    a: u64,
    forced_u: Option<u64>,
    rng: &mut RngStream,
) -> Result<ShorDistributions> {
    let m = choose_m(modulus);
    let n_out = output_bits(modulus);
    let state = period_state::<f64>(a, modulus, m)?;
    let y_reg: Vec<usize> = (m..m + n_out).collect();
    let collapsed = match forced_u {
        Some(u) => measure::project(&state, &y_reg, u as usize)?,
        None => measure::measure(&state, &y_reg, rng)?,
    };
    let u = collapsed.outcome as u64;
    let x_state = x_slice(&collapsed.post_state, m, n_out, u);
    let all: Vec<usize> = (0..m).collect();
    let step2 = measure::probabilities(&x_state, &all)?;
    let transformed = run(&qft_circuit(m), &x_state, &OracleRegistry::new())?;
    let step3 = measure::probabilities(&transformed, &all)?;
    Ok(ShorDistributions { u, step2, step3 })
}

/// Classify a failed attempt using the true order `r` of `a`.
fn classify_failure(a: u64, modulus: u64, q: u64) -> FailureCause {
    let r = multiplicative_order(a, modulus).expect("coprime base");
    if r % 2 == 1 {
        FailureCause::OddPeriod
    } else if q.is_multiple_of(r) {
        FailureCause::TrivialFactors
    } else if r.is_multiple_of(q) {
        FailureCause::GuessDividesPeriod
    } else {
        FailureCause::PoorApproximation
    }
}

/// Run the full pipeline until a nontrivial factor is found.
///
/// Exhausting `max_attempts` returns [`QsimError::FactoringFailed`] carrying
/// the per-attempt log.
pub fn factor(cfg: &FactoringConfig) -> Result<FactoringTrace> {
    let modulus = cfg.modulus;
    validate_modulus(modulus, cfg.allow_large)?;
    let m = choose_m(modulus);
    let n_out = output_bits(modulus);
    if let Some(a) = cfg.forced_a {
        if !(2..modulus).contains(&a) {
            return Err(QsimError::domain(format!("a = {a} must lie in [2, M)")));
        }
    }
    if let Some(v) = cfg.forced_v {
        if v >= 1 << m {
            return Err(QsimError::domain(format!(
                "v = {v} does not fit in {m} bits"
            )));
        }
    }

    let mut rng = RngStream::new(cfg.seed);
    let qft = qft_circuit(m);
    let no_oracles = OracleRegistry::new();
    let x_reg: Vec<usize> = (0..m).collect();
    let y_reg: Vec<usize> = (m..m + n_out).collect();
    let mut trace = FactoringTrace {
        modulus,
        m,
        n_out,
        attempts: Vec::new(),
        factors: BTreeSet::new(),
        step2_distribution: None,
        step3_distribution: None,
    };

    for attempt in 0..cfg.max_attempts {
        let first = attempt == 0;
        let a = match cfg.forced_a.filter(|_| first) {
            Some(a) => a,
            None => rng.next_in_range(2, modulus - 1),
        };
        let mut record = AttemptRecord {
            a,
            u: None,
            v: None,
            continued_fraction: None,
            q: None,
            step5: None,
            outcome: AttemptOutcome::Failed(FailureCause::NoInformation),
        };
        let g = a.gcd(&modulus);
        if g != 1 {
            log::debug!("attempt {attempt}: gcd({a}, {modulus}) = {g}");
            trace.factors.extend([g, modulus / g]);
            record.outcome = AttemptOutcome::SharedFactor(g);
            trace.attempts.push(record);
            return Ok(trace);
        }

        let state = period_state::<f64>(a, modulus, m)?;
        let (step2, step3) = if cfg.skip_step2_measurement {
            // U_QFT ⊗ I on the joint state
            let step2 = measure::probabilities(&state, &x_reg)?;
            let transformed = run(&qft.remap(m + n_out, &x_reg)?, &state, &no_oracles)?;
            (step2, measure::probabilities(&transformed, &x_reg)?)
        } else {
            let collapsed = match cfg.forced_u.filter(|_| first) {
                Some(u) => measure::project(&state, &y_reg, u as usize)?,
                None => measure::measure(&state, &y_reg, &mut rng)?,
            };
            let u = collapsed.outcome as u64;
            record.u = Some(u);
            let x_state = x_slice(&collapsed.post_state, m, n_out, u);
            let step2 = measure::probabilities(&x_state, &x_reg)?;
            let transformed = run(&qft, &x_state, &no_oracles)?;
            (step2, measure::probabilities(&transformed, &x_reg)?)
        };
        let v = match cfg.forced_v.filter(|_| first) {
            Some(v) => v,
            None => step3.sample(&mut rng) as u64,
        };
        if cfg.capture_distributions {
            trace.step2_distribution = Some(step2.as_slice().to_vec());
            trace.step3_distribution = Some(step3.as_slice().to_vec());
        }
        record.v = Some(v);

        let cf = match extract_period(v, m, modulus) {
            Ok(cf) => cf,
            Err(QsimError::NoInformation) => {
                trace.attempts.push(record);
                continue;
            }
            Err(e) => return Err(e),
        };
        let q = cf.q;
        record.q = Some(q);
        record.continued_fraction = Some(cf);

        if q % 2 == 0 {
            let power = mod_pow(a, q / 2, modulus);
            let gcd_minus = (power + modulus - 1).gcd(&modulus);
            let gcd_plus = (power + 1).gcd(&modulus);
            record.step5 = Some(Step5 {
                power,
                exact_power: u128::from(a).checked_pow((q / 2) as u32),
                gcd_minus,
                gcd_plus,
            });
            let found: Vec<u64> = [gcd_minus, gcd_plus]
                .into_iter()
                .filter(|&d| d > 1 && d < modulus)
                .collect();
            if !found.is_empty() {
                for d in found {
                    trace.factors.extend([d, modulus / d]);
                }
                record.outcome = AttemptOutcome::Factored;
                trace.attempts.push(record);
                return Ok(trace);
            }
        }
        record.outcome = AttemptOutcome::Failed(classify_failure(a, modulus, q));
        log::debug!(
            "attempt {attempt}: a={a} v={v} q={q} failed: {:?}",
            record.outcome
        );
        trace.attempts.push(record);
    }
    Err(QsimError::FactoringFailed {
        trace: Box::new(trace),
    })
}

/// Probability vector as a [`Distribution`], for CSV output.
pub fn distribution_from(values: &[f64]) -> Result<Distribution<f64>> {
    Distribution::new(values.to_vec())
}
