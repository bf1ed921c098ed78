//! Error models `Σ e_i E_i`, syndrome extraction through an ancilla
//! register, and recovery; ships the 3-qubit bit-flip code.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::circuit::{apply_oracle, ClassicalOracle};
use crate::error::{QsimError, Result};
use crate::measure::{self, Distribution, RngStream};
use crate::ops::{apply, standard_gate, tensor_op, GateName, Matrix, UnitaryOp};
use crate::qstate::{gather_bits, StateVector};
use crate::scalar::{pairwise_sum, Real};

/// `Σ e_i E_i` with `Σ|e_i|² = 1`.
#[derive(Debug, Clone)]
pub struct ErrorOperator<T> {
    terms: Vec<(Complex<T>, UnitaryOp<T>)>,
}

impl<T: Real> ErrorOperator<T> {
    pub fn new(terms: Vec<(Complex<T>, UnitaryOp<T>)>) -> Result<Self> {
        let arity = terms
            .first()
            .map(|(_, op)| op.arity())
            .ok_or_else(|| QsimError::domain("error operator needs at least one term"))?;
        if let Some((_, op)) = terms.iter().find(|(_, op)| op.arity() != arity) {
            return Err(QsimError::Arity {
                expected: arity,
                found: op.arity(),
            });
        }
        let weights: Vec<T> = terms.iter().map(|(e, _)| e.norm_sqr()).collect();
        let total = pairwise_sum(&weights);
        if (total - T::one()).abs() > T::TOLERANCE {
            return Err(QsimError::Normalization {
                deviation: (total - T::one()).as_f64(),
            });
        }
        Ok(Self { terms })
    }

    pub fn single(op: UnitaryOp<T>) -> Self {
        Self {
            terms: vec![(Complex::new(T::one(), T::zero()), op)],
        }
    }

    pub fn arity(&self) -> usize {
        self.terms[0].1.arity()
    }

    pub fn terms(&self) -> &[(Complex<T>, UnitaryOp<T>)] {
        &self.terms
    }
}

/// `Σ e_i (E_i · state)`. Images that are not mutually orthogonal can leave the
/// result off the unit sphere; it is then renormalized with a warning.
pub fn apply_error<T: Real>(
    e: &ErrorOperator<T>,
    state: &StateVector<T>,
) -> Result<StateVector<T>> {
    let n = state.n_qubits();
    if e.arity() != n {
        return Err(QsimError::Arity {
            expected: e.arity(),
            found: n,
        });
    }
    let targets: Vec<usize> = (0..n).collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut acc = vec![zero; state.len()];
    for (coef, op) in &e.terms {
        let image = apply(op, &targets, state)?;
        for (a, b) in acc.iter_mut().zip(image.amplitudes()) {
            *a += *coef * *b;
        }
    }
    let out = StateVector::from_raw(n, acc);
    let deviation = (out.norm() - T::one()).abs();
    if deviation > T::TOLERANCE {
        log::warn!(
            "error images not orthogonal; renormalizing (|norm − 1| = {:e})",
            deviation.as_f64()
        );
        return StateVector::normalized(out.into_amplitudes());
    }
    Ok(out)
}

/// A correctable error with a display label.
#[derive(Debug, Clone)]
pub struct Correction<T> {
    pub label: String,
    pub op: UnitaryOp<T>,
}

/// Encoder on basis states, a classical syndrome function realized as `U_f`
/// into an ancilla register, and the syndrome → error table.
#[derive(Debug, Clone)]
pub struct QuantumCode<T> {
    n_data: usize,
    n_code: usize,
    n_anc: usize,
    encoder: Vec<usize>,
    syndrome: ClassicalOracle,
    table: BTreeMap<usize, Correction<T>>,
}

impl<T: Real> QuantumCode<T> {
    /// Builds the table by running every error through the syndrome map on
    /// every encoded basis state. Errors whose syndrome depends on the data,
    /// or two errors with one syndrome, are rejected.
    pub fn new(
        n_data: usize,
        encoder: Vec<usize>,
        n_code: usize,
        syndrome: ClassicalOracle,
        errors: Vec<Correction<T>>,
    ) -> Result<Self> {
        if encoder.len() != 1 << n_data {
            return Err(QsimError::Dimension {
                expected: 1 << n_data,
                found: encoder.len(),
            });
        }
        let mut seen = encoder.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != encoder.len() || seen.last().is_some_and(|&c| c >> n_code != 0) {
            return Err(QsimError::domain(
                "encoder must be injective into the code register",
            ));
        }
        if syndrome.n_in() != n_code {
            return Err(QsimError::Arity {
                expected: n_code,
                found: syndrome.n_in(),
            });
        }
        let mut table = BTreeMap::new();
        for err in errors {
            if err.op.arity() != n_code {
                return Err(QsimError::Arity {
                    expected: n_code,
                    found: err.op.arity(),
                });
            }
            let mut value = None;
            for &c in &encoder {
                let image = err
                    .op
                    .matrix()
                    .mul_vec(StateVector::<T>::basis(n_code, c)?.amplitudes());
                for (idx, a) in image.iter().enumerate() {
                    if a.norm_sqr() <= T::TOLERANCE {
                        continue;
                    }
                    let s = syndrome.eval(idx as u64)? as usize;
                    if value.is_some_and(|v| v != s) {
                        return Err(QsimError::domain(format!(
                            "error {} has no single syndrome",
                            err.label
                        )));
                    }
                    value = Some(s);
                }
            }
            let s = value.expect("encoder is non-empty");
            if let Some(prev) = table.get(&s) {
                let prev: &Correction<T> = prev;
                return Err(QsimError::domain(format!(
                    "errors {} and {} share syndrome {s:#b}",
                    prev.label, err.label
                )));
            }
            table.insert(s, err);
        }
        Ok(Self {
            n_data,
            n_code,
            n_anc: syndrome.n_out(),
            encoder,
            syndrome,
            table,
        })
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn n_code(&self) -> usize {
        self.n_code
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_anc
    }

    pub fn table(&self) -> &BTreeMap<usize, Correction<T>> {
        &self.table
    }

    pub fn syndrome_of_basis(&self, code_index: usize) -> Result<usize> {
        Ok(self.syndrome.eval(code_index as u64)? as usize)
    }

    fn anc_qubits(&self) -> Vec<usize> {
        (self.n_code..self.n_code + self.n_anc).collect()
    }

    fn code_qubits(&self) -> Vec<usize> {
        (0..self.n_code).collect()
    }
}

/// `|0⟩ → |000⟩, |1⟩ → |111⟩` with syndrome
/// `(x0 ⊕ x1, x0 ⊕ x2, x1 ⊕ x2)` and single bit-flip corrections.
pub fn bitflip_code<T: Real>() -> QuantumCode<T> {
    let syndrome = ClassicalOracle::new(3, 3, |x| {
        let (x0, x1, x2) = ((x >> 2) & 1, (x >> 1) & 1, x & 1);
        ((x0 ^ x1) << 2) | ((x0 ^ x2) << 1) | (x1 ^ x2)
    });
    let i = standard_gate::<T>(GateName::I);
    let x = standard_gate::<T>(GateName::X);
    let three = |a: &UnitaryOp<T>, b: &UnitaryOp<T>, c: &UnitaryOp<T>| {
        tensor_op(&tensor_op(a, b).expect("small"), c).expect("small")
    };
    let errors = vec![
        Correction {
            label: "I⊗I⊗I".into(),
            op: three(&i, &i, &i),
        },
        Correction {
            label: "X⊗I⊗I".into(),
            op: three(&x, &i, &i),
        },
        Correction {
            label: "I⊗X⊗I".into(),
            op: three(&i, &x, &i),
        },
        Correction {
            label: "I⊗I⊗X".into(),
            op: three(&i, &i, &x),
        },
    ];
    QuantumCode::new(1, vec![0b000, 0b111], 3, syndrome, errors)
        .expect("bit-flip code is non-degenerate")
}

/// Map a data state into the code register.
pub fn encode<T: Real>(code: &QuantumCode<T>, data: &StateVector<T>) -> Result<StateVector<T>> {
    if data.n_qubits() != code.n_data {
        return Err(QsimError::Arity {
            expected: code.n_data,
            found: data.n_qubits(),
        });
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << code.n_code];
    for (x, &c) in code.encoder.iter().enumerate() {
        amps[c] = data.amplitude(x);
    }
    Ok(StateVector::from_raw(code.n_code, amps))
}

/// Inverse of [`encode`] for states inside the code space.
pub fn decode<T: Real>(code: &QuantumCode<T>, state: &StateVector<T>) -> Result<StateVector<T>> {
    if state.n_qubits() != code.n_code {
        return Err(QsimError::Arity {
            expected: code.n_code,
            found: state.n_qubits(),
        });
    }
    let amps: Vec<_> = code.encoder.iter().map(|&c| state.amplitude(c)).collect();
    let out = StateVector::from_raw(code.n_data, amps);
    if (out.norm() - T::one()).abs() > T::lit(1e-9).max(T::TOLERANCE) {
        return Err(QsimError::Integrity(
            "state is not in the code space".into(),
        ));
    }
    Ok(out)
}

/// Corrupted code state padded with ancilla zeros, after `S_C`.
pub fn extract_syndrome<T: Real>(
    code: &QuantumCode<T>,
    corrupted: &StateVector<T>,
) -> Result<StateVector<T>> {
    if corrupted.n_qubits() != code.n_code {
        return Err(QsimError::Arity {
            expected: code.n_code,
            found: corrupted.n_qubits(),
        });
    }
    let padded = corrupted.tensor(&StateVector::basis(code.n_anc, 0)?)?;
    apply_oracle(
        &code.syndrome,
        &padded,
        &code.code_qubits(),
        &code.anc_qubits(),
    )
}

pub fn syndrome_probabilities<T: Real>(
    code: &QuantumCode<T>,
    corrupted: &StateVector<T>,
) -> Result<Distribution<T>> {
    measure::probabilities(&extract_syndrome(code, corrupted)?, &code.anc_qubits())
}

/// Dense permutation matrix of `S_C` on code plus ancilla qubits.
pub fn syndrome_matrix<T: Real>(code: &QuantumCode<T>) -> Result<Matrix<T>> {
    let n = code.n_code + code.n_anc;
    let dim = 1usize << n;
    let code_q = code.code_qubits();
    let anc_q = code.anc_qubits();
    let mut m = Matrix::zeros(dim);
    for col in 0..dim {
        let x = gather_bits(col, n, &code_q);
        let y = gather_bits(col, n, &anc_q) ^ code.syndrome_of_basis(x)?;
        let row = (x << code.n_anc) | y;
        m.set(row, col, Complex::new(T::one(), T::zero()));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport<T> {
    pub syndrome: usize,
    pub syndrome_probability: T,
    pub correction: String,
    pub final_state: StateVector<T>,
    /// Mass of the final state inside the code space.
    pub codespace_fidelity: T,
}

impl<T: Real> RecoveryReport<T> {
    /// `|⟨encoded|final⟩|`.
    pub fn fidelity_to(&self, encoded: &StateVector<T>) -> Result<T> {
        Ok(self.final_state.inner(encoded)?.norm())
    }
}

/// Extract the syndrome, measure the ancillas, and undo the indicated error.
pub fn recover<T: Real>(
    code: &QuantumCode<T>,
    corrupted: &StateVector<T>,
    rng: &mut RngStream,
) -> Result<RecoveryReport<T>> {
    let extracted = extract_syndrome(code, corrupted)?;
    let outcome = measure::measure(&extracted, &code.anc_qubits(), rng)?;
    finish_recovery(code, outcome)
}

/// [`recover`] on a chosen syndrome branch.
pub fn recover_with_syndrome<T: Real>(
    code: &QuantumCode<T>,
    corrupted: &StateVector<T>,
    syndrome: usize,
) -> Result<RecoveryReport<T>> {
    let extracted = extract_syndrome(code, corrupted)?;
    finish_recovery(
        code,
        measure::project(&extracted, &code.anc_qubits(), syndrome)?,
    )
}

fn finish_recovery<T: Real>(
    code: &QuantumCode<T>,
    outcome: measure::MeasurementOutcome<T>,
) -> Result<RecoveryReport<T>> {
    let s = outcome.outcome;
    let correction = code
        .table
        .get(&s)
        .ok_or(QsimError::Uncorrectable { syndrome: s })?;
    let amps = outcome.post_state.amplitudes();
    let data: Vec<_> = (0..1usize << code.n_code)
        .map(|x| amps[(x << code.n_anc) | s])
        .collect();
    let collapsed = StateVector::from_raw(code.n_code, data);
    let targets = code.code_qubits();
    let final_state = apply(&correction.op.adjoint(), &targets, &collapsed)?;
    let inside: Vec<T> = code
        .encoder
        .iter()
        .map(|&c| final_state.amplitude(c).norm_sqr())
        .collect();
    Ok(RecoveryReport {
        syndrome: s,
        syndrome_probability: outcome.probability,
        correction: correction.label.clone(),
        final_state,
        codespace_fidelity: pairwise_sum(&inside),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    type S = StateVector<f64>;

    fn minus() -> S {
        S::from_real(&[R, -R]).unwrap()
    }

    fn worked_error() -> ErrorOperator<f64> {
        let code = bitflip_code::<f64>();
        let t = code.table();
        ErrorOperator::new(vec![
            (Complex::new(0.8, 0.0), t[&0b110].op.clone()),
            (Complex::new(0.6, 0.0), t[&0b101].op.clone()),
        ])
        .unwrap()
    }

    #[test]
    fn table_matches_expected_syndromes() {
        let code = bitflip_code::<f64>();
        let labels: Vec<(usize, &str)> = code
            .table()
            .iter()
            .map(|(s, c)| (*s, c.label.as_str()))
            .collect();
        assert_eq!(
            labels,
            vec![
                (0b000, "I⊗I⊗I"),
                (0b011, "I⊗I⊗X"),
                (0b101, "I⊗X⊗I"),
                (0b110, "X⊗I⊗I")
            ]
        );
    }

    #[test]
    fn encode_minus() {
        let code = bitflip_code::<f64>();
        let enc = encode(&code, &minus()).unwrap();
        let mut want = vec![0.0; 8];
        want[0] = R;
        want[7] = -R;
        assert!(enc.approx_eq(&S::from_real(&want).unwrap(), 1e-15));
        assert!(decode(&code, &enc).unwrap().approx_eq(&minus(), 1e-15));
    }

    #[test]
    fn worked_example() {
        let code = bitflip_code::<f64>();
        let enc = encode(&code, &minus()).unwrap();
        let corrupted = apply_error(&worked_error(), &enc).unwrap();
        let (a, b) = (0.8 * R, 0.6 * R);
        let mut want = vec![0.0; 8];
        want[0b100] = a;
        want[0b011] = -a;
        want[0b010] = b;
        want[0b101] = -b;
        assert!(corrupted.approx_eq(&S::from_real(&want).unwrap(), 1e-15));

        let probs = syndrome_probabilities(&code, &corrupted).unwrap();
        assert_eq!(probs.support(1e-12), vec![0b101, 0b110]);
        // exact squared weights
        let w = |n: i64| Ratio::new(n, 5) * Ratio::new(n, 5);
        assert_eq!(w(4), Ratio::new(16, 25));
        assert_eq!(w(3), Ratio::new(9, 25));
        assert!((probs.get(0b110) - 16.0 / 25.0).abs() < 1e-12);
        assert!((probs.get(0b101) - 9.0 / 25.0).abs() < 1e-12);

        for s in [0b110, 0b101] {
            let r = recover_with_syndrome(&code, &corrupted, s).unwrap();
            assert!((r.fidelity_to(&enc).unwrap() - 1.0).abs() < 1e-12);
            assert!((r.codespace_fidelity - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            recover_with_syndrome(&code, &corrupted, 0b110)
                .unwrap()
                .correction,
            "X⊗I⊗I"
        );
    }

    #[test]
    fn no_error_is_untouched() {
        let code = bitflip_code::<f64>();
        let enc = encode(&code, &minus()).unwrap();
        let r = recover(&code, &enc, &mut RngStream::new(5)).unwrap();
        assert_eq!(r.syndrome, 0);
        assert!(r.final_state.approx_eq(&enc, 1e-15));
    }

    #[test]
    fn syndrome_op_is_permutation() {
        let m = syndrome_matrix(&bitflip_code::<f64>()).unwrap();
        assert!(m.is_permutation());
        assert!(m.is_unitary());
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = standard_gate::<f64>(GateName::X);
        assert!(ErrorOperator::new(vec![(Complex::new(0.5, 0.0), x.clone())]).is_err());
        let code = bitflip_code::<f64>();
        let e = ErrorOperator::single(x);
        assert!(apply_error(&e, &encode(&code, &minus()).unwrap()).is_err());

        // two errors sharing one syndrome
        let syn = ClassicalOracle::new(3, 3, |x| x & 0b100);
        let i3 = UnitaryOp::<f64>::identity(3);
        let errs = vec![
            Correction {
                label: "I".into(),
                op: i3.clone(),
            },
            Correction {
                label: "I again".into(),
                op: i3,
            },
        ];
        assert!(QuantumCode::new(1, vec![0, 7], 3, syn, errs).is_err());
    }

    #[test]
    fn two_flips_are_uncorrectable_or_wrong() {
        let code = bitflip_code::<f64>();
        let enc = encode(&code, &S::from_real(&[0.6, 0.8]).unwrap()).unwrap();
        let x = standard_gate::<f64>(GateName::X);
        let i = standard_gate::<f64>(GateName::I);
        let xx_i = tensor_op(&tensor_op(&x, &x).unwrap(), &i).unwrap();
        let corrupted = apply_error(&ErrorOperator::single(xx_i), &enc).unwrap();
        let r = recover(&code, &corrupted, &mut RngStream::new(0)).unwrap();
        assert!(r.fidelity_to(&enc).unwrap() < 0.99);
    }
}
