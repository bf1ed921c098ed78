//! Gate-array IR, classical oracles `U_f`, the line-oriented circuit text
//! format, and the circuit executor.
//!
//! Text format, one instruction per line after a `qubits N` header:
//!
//! ```text
//! qubits 5
//! # comment
//! h 0
//! rot 1 0.5          # ((cos a, sin a), (-sin a, cos a))
//! phase 1 0.25       # diag(e^{ia}, e^{-ia})
//! cnot 0 1
//! toffoli 0 1 2
//! fredkin 0 1 2
//! swap 0 4
//! cphase 0 1 0.785   # diag(1, 1, 1, e^{ia}) on (control, target)
//! oracle and in=0,1 out=2
//! ```
//!
//! All controls are value-1 controls.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::error::{QsimError, Result};
use crate::ops::{self, apply_matrix_in_place, check_targets, GateName};
use crate::qstate::{gather_bits, scatter_bits, validate_qubits, StateVector};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Named(GateName),
    Rotation(f64),
    Phase(f64),
    /// `diag(1, 1, 1, e^{iθ})` on `(control, target)`.
    ControlledPhase(f64),
    /// Registry-resolved oracle; the first `n_in` targets are the input register.
    Oracle {
        name: String,
        n_in: usize,
    },
}

impl GateKind {
    /// Number of targets, or `None` for oracles (any split is allowed).
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Named(g) => Some(g.arity()),
            GateKind::Rotation(_) | GateKind::Phase(_) => Some(1),
            GateKind::ControlledPhase(_) => Some(2),
            GateKind::Oracle { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateInstr {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateInstr {
    pub fn named(gate: GateName, targets: &[usize]) -> Self {
        Self {
            kind: GateKind::Named(gate),
            targets: targets.to_vec(),
        }
    }
}

impl fmt::Display for GateInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs = |qs: &[usize]| qs.iter().map(usize::to_string).collect::<Vec<_>>();
        match &self.kind {
            GateKind::Named(g) => write!(f, "{} {}", g.mnemonic(), qs(&self.targets).join(" ")),
            GateKind::Rotation(a) => write!(f, "rot {} {a}", self.targets[0]),
            GateKind::Phase(a) => write!(f, "phase {} {a}", self.targets[0]),
            GateKind::ControlledPhase(a) => {
                write!(f, "cphase {} {} {a}", self.targets[0], self.targets[1])
            }
            GateKind::Oracle { name, n_in } => write!(
                f,
                "oracle {name} in={} out={}",
                qs(&self.targets[..*n_in]).join(","),
                qs(&self.targets[*n_in..]).join(",")
            ),
        }
    }
}

/// Ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    instrs: Vec<GateInstr>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            instrs: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn instrs(&self) -> &[GateInstr] {
        &self.instrs
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    /// Append after checking arity and qubit indices.
    pub fn push(&mut self, instr: GateInstr) -> Result<&mut Self> {
        match (&instr.kind, instr.kind.arity()) {
            (_, Some(arity)) if arity != instr.targets.len() => {
                return Err(QsimError::Arity {
                    expected: arity,
                    found: instr.targets.len(),
                })
            }
            (GateKind::Oracle { n_in, .. }, None) if *n_in == 0 || *n_in >= instr.targets.len() => {
                return Err(QsimError::domain(
                    "oracle needs non-empty input and output registers",
                ))
            }
            _ => {}
        }
        if let GateKind::Rotation(a) | GateKind::Phase(a) | GateKind::ControlledPhase(a) =
            instr.kind
        {
            if !a.is_finite() {
                return Err(QsimError::domain("gate angle must be finite"));
            }
        }
        validate_qubits(&instr.targets, self.n_qubits)?;
        self.instrs.push(instr);
        Ok(self)
    }

    pub fn gate(&mut self, gate: GateName, targets: &[usize]) -> Result<&mut Self> {
        self.push(GateInstr::named(gate, targets))
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateName::H, &[q])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateName::X, &[q])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateName::Cnot, &[control, target])
    }

    pub fn toffoli(&mut self, c1: usize, c2: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateName::Toffoli, &[c1, c2, target])
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.gate(GateName::Swap, &[a, b])
    }

    pub fn cphase(&mut self, control: usize, target: usize, theta: f64) -> Result<&mut Self> {
        self.push(GateInstr {
            kind: GateKind::ControlledPhase(theta),
            targets: vec![control, target],
        })
    }

    pub fn oracle(&mut self, name: &str, inputs: &[usize], outputs: &[usize]) -> Result<&mut Self> {
        self.push(GateInstr {
            kind: GateKind::Oracle {
                name: name.to_owned(),
                n_in: inputs.len(),
            },
            targets: inputs.iter().chain(outputs).copied().collect(),
        })
    }

    /// Embed into a wider register, qubit `q` becoming `map[q]`.
    pub fn remap(&self, n_qubits: usize, map: &[usize]) -> Result<Circuit> {
        if map.len() != self.n_qubits {
            return Err(QsimError::Dimension {
                expected: self.n_qubits,
                found: map.len(),
            });
        }
        validate_qubits(map, n_qubits)?;
        let mut out = Circuit::new(n_qubits);
        for instr in &self.instrs {
            out.push(GateInstr {
                kind: instr.kind.clone(),
                targets: instr.targets.iter().map(|&q| map[q]).collect(),
            })?;
        }
        Ok(out)
    }

    pub fn count(&self, pred: impl Fn(&GateInstr) -> bool) -> usize {
        self.instrs.iter().filter(|i| pred(i)).count()
    }

    /// Canonical text form.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> std::result::Result<Circuit, ParseError> {
        parse(text)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for instr in &self.instrs {
            writeln!(f, "{instr}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}

/// Classical function `f : [0, 2^n_in) → [0, 2^n_out)` realized as
/// `U_f |x, y⟩ = |x, y ⊕ f(x)⟩`.
#[derive(Clone)]
pub struct ClassicalOracle {
    n_in: usize,
    n_out: usize,
    f: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
}

impl fmt::Debug for ClassicalOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalOracle")
            .field("n_in", &self.n_in)
            .field("n_out", &self.n_out)
            .finish_non_exhaustive()
    }
}

impl ClassicalOracle {
    pub fn new(n_in: usize, n_out: usize, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self {
            n_in,
            n_out,
            f: Arc::new(f),
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Evaluate, rejecting values outside the output register.
    pub fn eval(&self, x: u64) -> Result<u64> {
        let y = (self.f)(x);
        if self.n_out < 64 && y >> self.n_out != 0 {
            return Err(QsimError::domain(format!(
                "oracle value {y} does not fit in {} output bits",
                self.n_out
            )));
        }
        Ok(y)
    }
}

/// Name → oracle lookup used when running parsed circuits.
#[derive(Debug, Clone, Default)]
pub struct OracleRegistry {
    oracles: BTreeMap<String, ClassicalOracle>,
}

impl OracleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry preloaded with `and`, `or`, `xor` (2 → 1) and `maj` (3 → 1).
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.insert("and", ClassicalOracle::new(2, 1, |x| u64::from(x == 0b11)));
        r.insert("or", ClassicalOracle::new(2, 1, |x| u64::from(x != 0)));
        r.insert(
            "xor",
            ClassicalOracle::new(2, 1, |x| u64::from(x.count_ones() == 1)),
        );
        r.insert(
            "maj",
            ClassicalOracle::new(3, 1, |x| u64::from(x.count_ones() >= 2)),
        );
        r
    }

    pub fn insert(&mut self, name: &str, oracle: ClassicalOracle) -> &mut Self {
        self.oracles.insert(name.to_owned(), oracle);
        self
    }

    pub fn get(&self, name: &str) -> Result<&ClassicalOracle> {
        self.oracles
            .get(name)
            .ok_or_else(|| QsimError::UnknownOracle(name.to_owned()))
    }
}

/// Apply `U_f` as an amplitude permutation.
pub fn apply_oracle<T: Real>(
    oracle: &ClassicalOracle,
    state: &StateVector<T>,
    in_qubits: &[usize],
    out_qubits: &[usize],
) -> Result<StateVector<T>> {
    let n = state.n_qubits();
    if in_qubits.len() != oracle.n_in {
        return Err(QsimError::Arity {
            expected: oracle.n_in,
            found: in_qubits.len(),
        });
    }
    if out_qubits.len() != oracle.n_out {
        return Err(QsimError::Arity {
            expected: oracle.n_out,
            found: out_qubits.len(),
        });
    }
    let all: Vec<usize> = in_qubits.iter().chain(out_qubits).copied().collect();
    validate_qubits(&all, n)?;

    let table = (0..1u64 << oracle.n_in)
        .map(|x| oracle.eval(x))
        .collect::<Result<Vec<u64>>>()?;
    let out_mask = scatter_bits((1 << oracle.n_out) - 1, n, out_qubits);
    let src = state.amplitudes();
    let mut dst = vec![Complex::new(T::zero(), T::zero()); src.len()];
    for (i, &a) in src.iter().enumerate() {
        let x = gather_bits(i, n, in_qubits);
        let y = gather_bits(i, n, out_qubits) ^ table[x] as usize;
        dst[(i & !out_mask) | scatter_bits(y, n, out_qubits)] = a;
    }
    Ok(StateVector::from_raw(n, dst))
}

/// Execute instructions left to right.
pub fn run<T: Real>(
    circuit: &Circuit,
    initial: &StateVector<T>,
    registry: &OracleRegistry,
) -> Result<StateVector<T>> {
    if initial.n_qubits() != circuit.n_qubits {
        return Err(QsimError::Dimension {
            expected: circuit.n_qubits,
            found: initial.n_qubits(),
        });
    }
    let n = circuit.n_qubits;
    let mut state = initial.clone();
    let mut amps = state.amplitudes().to_vec();
    for instr in &circuit.instrs {
        let matrix = match &instr.kind {
            GateKind::Named(g) => ops::standard_gate::<T>(*g),
            GateKind::Rotation(a) => ops::rotation(T::lit(*a)),
            GateKind::Phase(a) => ops::phase(T::lit(*a)),
            GateKind::ControlledPhase(a) => ops::controlled_phase(T::lit(*a)),
            GateKind::Oracle { name, n_in } => {
                let oracle = registry.get(name)?;
                let current = StateVector::from_raw(n, amps);
                let next = apply_oracle(
                    oracle,
                    &current,
                    &instr.targets[..*n_in],
                    &instr.targets[*n_in..],
                )?;
                amps = next.into_amplitudes();
                continue;
            }
        };
        check_targets(matrix.arity(), &instr.targets, n)?;
        apply_matrix_in_place(matrix.matrix(), &instr.targets, n, &mut amps);
    }
    state = StateVector::from_raw(n, amps);
    Ok(state)
}

/// One-bit full adder on `|c, x, y, 0, 0⟩ → |c, x, y, s, c'⟩` built from three
/// Toffoli gates (carry) and three CNOTs (sum).
pub fn full_adder() -> Circuit {
    let (c, x, y, s, carry) = (0, 1, 2, 3, 4);
    let mut circuit = Circuit::new(5);
    circuit
        .toffoli(x, y, carry)
        .and_then(|b| b.toffoli(c, x, carry))
        .and_then(|b| b.toffoli(c, y, carry))
        .and_then(|b| b.cnot(c, s))
        .and_then(|b| b.cnot(x, s))
        .and_then(|b| b.cnot(y, s))
        .expect("static adder layout");
    circuit
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: `{gate}` takes {expected} operand(s), found {found}")]
    Arity {
        line: usize,
        column: usize,
        gate: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange {
        line: usize,
        column: usize,
        qubit: usize,
        n_qubits: usize,
    },
    #[error("line {line}, column {column}: qubit {qubit} used twice in one instruction")]
    DuplicateQubit {
        line: usize,
        column: usize,
        qubit: usize,
    },
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (byte, ch) in line
        .char_indices()
        .chain(std::iter::once((line.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(byte),
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &line[s..byte],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    tokens
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn parse_index(tok: &Token<'_>, line: usize) -> std::result::Result<usize, ParseError> {
    tok.text.parse::<usize>().map_err(|_| {
        syntax(
            line,
            tok.column,
            format!("expected a qubit index, found `{}`", tok.text),
        )
    })
}

fn parse_angle(tok: &Token<'_>, line: usize) -> std::result::Result<f64, ParseError> {
    match tok.text.parse::<f64>() {
        Ok(a) if a.is_finite() => Ok(a),
        _ => Err(syntax(
            line,
            tok.column,
            format!("expected a finite decimal angle, found `{}`", tok.text),
        )),
    }
}

/// Parse the circuit text format.
pub fn parse(text: &str) -> std::result::Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut last_line = 0;
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = line.split('#').next().unwrap_or("");
        let tokens = tokenize(line);
        let Some(head) = tokens.first() else { continue };

        let Some(circuit) = circuit.as_mut() else {
            if head.text != "qubits" {
                return Err(syntax(line_no, head.column, "expected `qubits N` header"));
            }
            if tokens.len() != 2 {
                return Err(ParseError::Arity {
                    line: line_no,
                    column: head.column,
                    gate: "qubits".into(),
                    expected: 1,
                    found: tokens.len() - 1,
                });
            }
            let n = parse_index(&tokens[1], line_no)?;
            if n == 0 || n > crate::qstate::MAX_QUBITS {
                return Err(syntax(
                    line_no,
                    tokens[1].column,
                    format!("unsupported qubit count {n}"),
                ));
            }
            circuit = Some(Circuit::new(n));
            continue;
        };

        let args = &tokens[1..];
        let (kind, target_tokens, angle_token): (
            GateKind,
            Vec<(usize, usize)>,
            Option<&Token<'_>>,
        );
        let expect = |n: usize| -> std::result::Result<(), ParseError> {
            if args.len() != n {
                return Err(ParseError::Arity {
                    line: line_no,
                    column: head.column,
                    gate: head.text.to_owned(),
                    expected: n,
                    found: args.len(),
                });
            }
            Ok(())
        };
        match head.text {
            "rot" | "phase" => {
                expect(2)?;
                let a = parse_angle(&args[1], line_no)?;
                kind = if head.text == "rot" {
                    GateKind::Rotation(a)
                } else {
                    GateKind::Phase(a)
                };
                target_tokens = vec![(parse_index(&args[0], line_no)?, args[0].column)];
                angle_token = Some(&args[1]);
            }
            "cphase" => {
                expect(3)?;
                kind = GateKind::ControlledPhase(parse_angle(&args[2], line_no)?);
                target_tokens = args[..2]
                    .iter()
                    .map(|t| parse_index(t, line_no).map(|q| (q, t.column)))
                    .collect::<std::result::Result<_, _>>()?;
                angle_token = Some(&args[2]);
            }
            "oracle" => {
                if args.len() != 3 {
                    return Err(ParseError::Arity {
                        line: line_no,
                        column: head.column,
                        gate: "oracle".into(),
                        expected: 3,
                        found: args.len(),
                    });
                }
                let name = args[0].text;
                if !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
                {
                    return Err(syntax(
                        line_no,
                        args[0].column,
                        format!("invalid oracle name `{name}`"),
                    ));
                }
                let register =
                    |tok: &Token<'_>,
                     key: &str|
                     -> std::result::Result<Vec<(usize, usize)>, ParseError> {
                        let list = tok.text.strip_prefix(key).ok_or_else(|| {
                            syntax(line_no, tok.column, format!("expected `{key}<q,...>`"))
                        })?;
                        if list.is_empty() {
                            return Err(syntax(line_no, tok.column, "empty register"));
                        }
                        list.split(',')
                            .map(|q| {
                                q.parse::<usize>().map(|v| (v, tok.column)).map_err(|_| {
                                    syntax(line_no, tok.column, format!("bad qubit index `{q}`"))
                                })
                            })
                            .collect()
                    };
                let inputs = register(&args[1], "in=")?;
                let outputs = register(&args[2], "out=")?;
                kind = GateKind::Oracle {
                    name: name.to_owned(),
                    n_in: inputs.len(),
                };
                target_tokens = inputs.into_iter().chain(outputs).collect();
                angle_token = None;
            }
            mnemonic => {
                let gate = GateName::from_mnemonic(mnemonic).ok_or_else(|| {
                    syntax(
                        line_no,
                        head.column,
                        format!("unknown instruction `{mnemonic}`"),
                    )
                })?;
                expect(gate.arity())?;
                kind = GateKind::Named(gate);
                target_tokens = args
                    .iter()
                    .map(|t| parse_index(t, line_no).map(|q| (q, t.column)))
                    .collect::<std::result::Result<_, _>>()?;
                angle_token = None;
            }
        }
        let _ = angle_token;

        let n = circuit.n_qubits;
        let mut seen = Vec::new();
        for &(q, column) in &target_tokens {
            if q >= n {
                return Err(ParseError::QubitOutOfRange {
                    line: line_no,
                    column,
                    qubit: q,
                    n_qubits: n,
                });
            }
            if seen.contains(&q) {
                return Err(ParseError::DuplicateQubit {
                    line: line_no,
                    column,
                    qubit: q,
                });
            }
            seen.push(q);
        }
        circuit.instrs.push(GateInstr {
            kind,
            targets: seen,
        });
    }
    circuit.ok_or_else(|| syntax(last_line.max(1), 1, "missing `qubits N` header"))
}
