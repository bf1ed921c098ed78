//! BB84 key distribution, dense coding, and teleportation.

use crate::error::{QsimError, Result};
use crate::measure::{self, RngStream};
use crate::ops::{apply, standard_gate, GateName};
use crate::qstate::StateVector;
use crate::scalar::Real;

/// The shared pair `(|00⟩ + |11⟩)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EprPair<T> {
    pub state: StateVector<T>,
}

impl<T: Real> EprPair<T> {
    pub fn new() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            state: StateVector::from_real(&[h, 0.0, 0.0, h]).expect("normalized"),
        }
    }
}

impl<T: Real> Default for EprPair<T> {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Standard basis (⊥/‖ polarization).
    Rectilinear,
    /// Hadamard-rotated basis.
    Diagonal,
}

impl Basis {
    fn random(rng: &mut RngStream) -> Self {
        if rng.next_bit() {
            Basis::Diagonal
        } else {
            Basis::Rectilinear
        }
    }
}

fn prepare(bit: bool, basis: Basis) -> Result<StateVector<f64>> {
    let s = StateVector::basis(1, usize::from(bit))?;
    match basis {
        Basis::Rectilinear => Ok(s),
        Basis::Diagonal => apply(&standard_gate(GateName::H), &[0], &s),
    }
}

fn measure_in(state: &StateVector<f64>, basis: Basis, rng: &mut RngStream) -> Result<bool> {
    let rotated = match basis {
        Basis::Rectilinear => state.clone(),
        Basis::Diagonal => apply(&standard_gate(GateName::H), &[0], state)?,
    };
    Ok(measure::measure(&rotated, &[0], rng)?.outcome == 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bb84Report {
    pub n_sent: usize,
    pub sifted_indices: Vec<usize>,
    pub sifted_fraction: f64,
    /// Fraction of sifted positions where Alice's and Bob's bits differ.
    pub disagreement_rate: f64,
    pub eve_present: bool,
    pub alice_key: Vec<bool>,
    pub bob_key: Vec<bool>,
}

/// Send `n_bits` single photons, optionally through an intercept-resend
/// eavesdropper, and sift on basis agreement.
pub fn bb84(n_bits: usize, eve: bool, rng: &mut RngStream) -> Result<Bb84Report> {
    if n_bits == 0 {
        return Err(QsimError::domain("bb84 needs at least one bit"));
    }
    let mut sifted_indices = Vec::new();
    let mut alice_key = Vec::new();
    let mut bob_key = Vec::new();
    for i in 0..n_bits {
        let bit = rng.next_bit();
        let alice_basis = Basis::random(rng);
        let mut photon = prepare(bit, alice_basis)?;
        if eve {
            let eve_basis = Basis::random(rng);
            let seen = measure_in(&photon, eve_basis, rng)?;
            photon = prepare(seen, eve_basis)?;
        }
        let bob_basis = Basis::random(rng);
        let received = measure_in(&photon, bob_basis, rng)?;
        if alice_basis == bob_basis {
            sifted_indices.push(i);
            alice_key.push(bit);
            bob_key.push(received);
        }
    }
    let errors = alice_key
        .iter()
        .zip(&bob_key)
        .filter(|(a, b)| a != b)
        .count();
    let disagreement_rate = if sifted_indices.is_empty() {
        0.0
    } else {
        errors as f64 / sifted_indices.len() as f64
    };
    Ok(Bb84Report {
        n_sent: n_bits,
        sifted_fraction: sifted_indices.len() as f64 / n_bits as f64,
        sifted_indices,
        disagreement_rate,
        eve_present: eve,
        alice_key,
        bob_key,
    })
}

const PAULI: [GateName; 4] = [GateName::I, GateName::X, GateName::Y, GateName::Z];

/// Alice's half of dense coding: apply `I, X, Y, Z` (for `value` 0..3) to
/// the first qubit of the pair.
pub fn dense_encode<T: Real>(value: u8, pair: &EprPair<T>) -> Result<StateVector<T>> {
    let gate = *PAULI
        .get(usize::from(value))
        .ok_or_else(|| QsimError::domain(format!("dense-coding value {value} not in 0..3")))?;
    apply(&standard_gate(gate), &[0], &pair.state)
}

/// Bob's half: CNOT, read the second qubit, H on the first, read it.
///
/// Each readout must be deterministic; a spread-out distribution means the
/// input was not one of the four code states. Not every invalid input is
/// caught this way.
pub fn dense_decode<T: Real>(state: &StateVector<T>) -> Result<u8> {
    if state.n_qubits() != 2 {
        return Err(QsimError::Arity {
            expected: 2,
            found: state.n_qubits(),
        });
    }
    let tol = T::lit(1e-9);
    let s = apply(&standard_gate(GateName::Cnot), &[0, 1], state)?;
    let second = point_outcome(&measure::probabilities(&s, &[1])?, tol)?;
    let s = apply(&standard_gate(GateName::H), &[0], &s)?;
    let first = point_outcome(&measure::probabilities(&s, &[0])?, tol)?;
    Ok(match (first, second) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        _ => 3,
    })
}

fn point_outcome<T: Real>(dist: &measure::Distribution<T>, tol: T) -> Result<usize> {
    let best = dist.argmax();
    if dist.is_point_mass(best, tol) {
        Ok(best)
    } else {
        Err(QsimError::Integrity(
            "state is not a dense-coding code word".into(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportResult<T> {
    /// Alice's two classical bits, first qubit as the high bit.
    pub bits: u8,
    pub probability: T,
    /// Bob's qubit after the measurement, before his correction.
    pub bob_before: StateVector<T>,
    pub bob_final: StateVector<T>,
}

fn bob_qubit<T: Real>(state: &StateVector<T>, bits: u8) -> StateVector<T> {
    let base = usize::from(bits) << 1;
    StateVector::from_raw(1, vec![state.amplitude(base), state.amplitude(base | 1)])
}

fn correction(bits: u8) -> GateName {
    match bits {
        0b00 => GateName::I,
        0b01 => GateName::X,
        0b10 => GateName::Z,
        _ => GateName::Y,
    }
}

fn entangle_for_teleport<T: Real>(phi: &StateVector<T>) -> Result<StateVector<T>> {
    if phi.n_qubits() != 1 {
        return Err(QsimError::Arity {
            expected: 1,
            found: phi.n_qubits(),
        });
    }
    let joint = phi.tensor(&EprPair::new().state)?;
    let s = apply(&standard_gate(GateName::Cnot), &[0, 1], &joint)?;
    apply(&standard_gate(GateName::H), &[0], &s)
}

/// Teleport the one-qubit state `phi` to Bob's half of a fresh EPR pair.
pub fn teleport<T: Real>(phi: &StateVector<T>, rng: &mut RngStream) -> Result<TeleportResult<T>> {
    let s = entangle_for_teleport(phi)?;
    let outcome = measure::measure(&s, &[0, 1], rng)?;
    finish_teleport(outcome)
}

/// The branch of [`teleport`] where Alice measures `bits`.
pub fn teleport_branch<T: Real>(phi: &StateVector<T>, bits: u8) -> Result<TeleportResult<T>> {
    let s = entangle_for_teleport(phi)?;
    finish_teleport(measure::project(&s, &[0, 1], usize::from(bits))?)
}

/// Probabilities of Alice's four outcomes.
pub fn teleport_branch_probabilities<T: Real>(
    phi: &StateVector<T>,
) -> Result<measure::Distribution<T>> {
    measure::probabilities(&entangle_for_teleport(phi)?, &[0, 1])
}

fn finish_teleport<T: Real>(outcome: measure::MeasurementOutcome<T>) -> Result<TeleportResult<T>> {
    let bits = outcome.outcome as u8;
    let bob_before = bob_qubit(&outcome.post_state, bits);
    let bob_final = apply(&standard_gate(correction(bits)), &[0], &bob_before)?;
    Ok(TeleportResult {
        bits,
        probability: outcome.probability,
        bob_before,
        bob_final,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    type S = StateVector<f64>;

    #[test]
    fn dense_code_words() {
        let pair = EprPair::<f64>::new();
        assert_eq!(dense_encode(0, &pair).unwrap(), pair.state);
        let psi1 = dense_encode(1, &pair).unwrap();
        assert!(psi1.approx_eq(&S::from_real(&[0.0, R, R, 0.0]).unwrap(), 1e-15));
        let psi2 = dense_encode(2, &pair).unwrap();
        assert!(psi2.approx_eq(&S::from_real(&[0.0, R, -R, 0.0]).unwrap(), 1e-15));
        assert!(dense_encode(4, &pair).is_err());
        for v in 0..4 {
            assert_eq!(dense_decode(&dense_encode(v, &pair).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn dense_decode_flags_non_code_words() {
        let s = S::from_real(&[R, R, 0.0, 0.0]).unwrap();
        assert!(matches!(dense_decode(&s), Err(QsimError::Integrity(_))));
    }

    #[test]
    fn teleport_branch_eleven() {
        let phi = S::from_real(&[0.6, 0.8]).unwrap();
        let r = teleport_branch(&phi, 0b11).unwrap();
        // a|1⟩ − b|0⟩
        assert!(r
            .bob_before
            .approx_eq(&S::from_real(&[-0.8, 0.6]).unwrap(), 1e-12));
        assert!(r.bob_final.approx_eq(&phi, 1e-12));
        let probs = teleport_branch_probabilities(&phi).unwrap();
        for b in 0..4 {
            assert!((probs.get(b) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn teleport_basis_zero_every_branch() {
        let zero = S::basis(1, 0).unwrap();
        for bits in 0..4 {
            let r = teleport_branch(&zero, bits).unwrap();
            assert!(r.bob_final.eq_up_to_phase(&zero, 1e-12));
        }
    }

    #[test]
    fn bb84_without_eve_agrees() {
        let mut rng = RngStream::new(3);
        let r = bb84(2000, false, &mut rng).unwrap();
        assert_eq!(r.disagreement_rate, 0.0);
        assert!((r.sifted_fraction - 0.5).abs() < 0.05);
        let single = bb84(1, false, &mut rng).unwrap();
        assert!(single.sifted_fraction == 0.0 || single.sifted_fraction == 1.0);
        assert!(bb84(0, false, &mut rng).is_err());
    }
}
