use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qsim::circuit::{self, OracleRegistry};
use qsim::grover::{self, Predicate};
use qsim::hogg::{self, CspInstance, PhasePolicy, UpMethod};
use qsim::measure::{self, Distribution};
use qsim::protocols::{self, EprPair};
use qsim::qec;
use qsim::scalar::format_significant;
use qsim::shor::{self, AttemptOutcome, FactoringConfig, FactoringTrace};
use qsim::{QsimError, RngStream, StateVec64};

const DEFAULT_SEED: u64 = 1998;

#[derive(Parser)]
#[command(name = "qsim", version, about = "State-vector quantum algorithm demos")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor M with Shor's algorithm.
    Shor {
        #[arg(long = "M")]
        modulus: u64,
        /// Force the base on the first attempt.
        #[arg(long)]
        a: Option<u64>,
        /// Force the Step-2 output-register value on the first attempt.
        #[arg(long)]
        u: Option<u64>,
        /// Force the Step-4 measurement on the first attempt.
        #[arg(long)]
        v: Option<u64>,
        #[arg(long)]
        skip_step2: bool,
        /// Write <stem>_step2.csv and <stem>_step3.csv.
        #[arg(long)]
        emit_dist: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        max_attempts: usize,
        /// Allow 64 < M <= 512.
        #[arg(long)]
        allow_large: bool,
    },
    /// Grover search for a set of marked values.
    Grover {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        solutions: Vec<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        /// Write the success-probability curve as CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// BB84 key distribution.
    Bb84 {
        #[arg(long)]
        bits: usize,
        #[arg(long)]
        eve: bool,
    },
    /// Teleport random one-qubit states.
    Teleport {
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Dense coding round trip.
    Dense {
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..4))]
        value: Option<u8>,
    },
    /// Bit-flip code recovery on the (4/5, 3/5) two-error example.
    QecDemo,
    /// Hogg lattice search on a CSP with a single solution.
    Hogg {
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        vals: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        method: u8,
        #[arg(long, default_value = "invert")]
        policy: String,
        /// Defaults to one more than the number of variables.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Parse and execute a circuit file.
    Run {
        file: PathBuf,
        /// Initial basis ket, e.g. 11000; defaults to all zeros.
        #[arg(long)]
        input: Option<String>,
        /// Qubits to measure after the run.
        #[arg(long, value_delimiter = ',')]
        measure: Option<Vec<usize>>,
    },
    /// Step-2 and Step-3 distributions for base a.
    QftDist {
        #[arg(long = "M")]
        modulus: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        u: Option<u64>,
        /// Writes <stem>_step2.csv and <stem>_step3.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Sim(QsimError),
    Io(PathBuf, std::io::Error),
}

impl From<QsimError> for CliError {
    fn from(e: QsimError) -> Self {
        CliError::Sim(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn stem_path(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn write_dists(
    stem: &Path,
    step2: &Distribution<f64>,
    step3: &Distribution<f64>,
    out: &mut String,
) -> CliResult<()> {
    for (suffix, d) in [("_step2.csv", step2), ("_step3.csv", step3)] {
        let path = stem_path(stem, suffix);
        write_file(&path, &d.to_csv())?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(())
}

fn describe_trace(trace: &FactoringTrace, out: &mut String) {
    let _ = writeln!(out, "M = {}", trace.modulus);
    let _ = writeln!(
        out,
        "m = {} (x register), {} output qubits",
        trace.m, trace.n_out
    );
    for (k, at) in trace.attempts.iter().enumerate() {
        let _ = writeln!(out, "attempt {}: a = {}", k + 1, at.a);
        if let AttemptOutcome::SharedFactor(g) = at.outcome {
            let _ = writeln!(out, "  gcd(a, M) = {g}");
            continue;
        }
        match at.u {
            Some(u) => {
                let _ = writeln!(out, "  u = {u}");
            }
            None => {
                let _ = writeln!(out, "  u = (step 2 measurement skipped)");
            }
        }
        if let Some(v) = at.v {
            let _ = writeln!(out, "  v = {v}");
        }
        if let Some(cf) = &at.continued_fraction {
            for line in cf.table().lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        if let Some(q) = at.q {
            let _ = writeln!(out, "  period guess q = {q}");
        }
        if let Some(s5) = at.step5 {
            let m = trace.modulus;
            let _ = match s5.exact_power {
                Some(p) => writeln!(
                    out,
                    "  a^(q/2) = {p}; gcd({m}, {}) = {}; gcd({m}, {}) = {}",
                    p - 1,
                    s5.gcd_minus,
                    p + 1,
                    s5.gcd_plus
                ),
                None => writeln!(
                    out,
                    "  a^(q/2) mod M = {}; gcd({m}, {}) = {}; gcd({m}, {}) = {}",
                    s5.power,
                    (s5.power + m - 1) % m,
                    s5.gcd_minus,
                    s5.power + 1,
                    s5.gcd_plus
                ),
            };
        }
        match &at.outcome {
            AttemptOutcome::Failed(cause) => {
                let _ = writeln!(out, "  failed: {cause}");
            }
            AttemptOutcome::Factored => {
                let _ = writeln!(out, "  period = {}", at.q.unwrap_or_default());
            }
            AttemptOutcome::SharedFactor(_) => {}
        }
    }
    let factors: Vec<String> = trace.factors.iter().map(u64::to_string).collect();
    if factors.is_empty() {
        let _ = writeln!(out, "no factor found");
    } else {
        let _ = writeln!(out, "factors: {}", factors.join(", "));
    }
}

fn run_command(cli: &Cli, out: &mut String) -> CliResult<()> {
    let mut rng = RngStream::new(cli.seed);
    match &cli.command {
        Command::Shor {
            modulus,
            a,
            u,
            v,
            skip_step2,
            emit_dist,
            max_attempts,
            allow_large,
        } => {
            let cfg = FactoringConfig {
                modulus: *modulus,
                seed: cli.seed,
                max_attempts: *max_attempts,
                skip_step2_measurement: *skip_step2,
                forced_a: *a,
                forced_u: *u,
                forced_v: *v,
                allow_large: *allow_large,
                capture_distributions: emit_dist.is_some(),
            };
            let trace = match shor::factor(&cfg) {
                Ok(t) => t,
                Err(QsimError::FactoringFailed { trace }) => {
                    describe_trace(&trace, out);
                    return Err(QsimError::FactoringFailed { trace }.into());
                }
                Err(e) => return Err(e.into()),
            };
            describe_trace(&trace, out);
            if let Some(stem) = emit_dist {
                match (&trace.step2_distribution, &trace.step3_distribution) {
                    (Some(s2), Some(s3)) => {
                        let s2 = shor::distribution_from(s2)?;
                        let s3 = shor::distribution_from(s3)?;
                        write_dists(stem, &s2, &s3, out)?;
                    }
                    _ => {
                        let _ = writeln!(out, "no distributions: factor found classically");
                    }
                }
            }
        }
        Command::Grover {
            n,
            solutions,
            iterations,
            curve,
        } => {
            let p = Predicate::from_solutions(*n, solutions)?;
            let run = grover::grover_search(&p, *iterations, &mut rng)?;
            let _ = writeln!(out, "n = {n}, solutions = {:?}", solutions);
            let _ = writeln!(out, "iterations = {}", run.iterations);
            let _ = writeln!(
                out,
                "success probability = {}",
                format_significant(run.success_probability(), 10)
            );
            let _ = writeln!(
                out,
                "failure rate = {}",
                format_significant(run.failure_rate(), 10)
            );
            let _ = writeln!(
                out,
                "measured x = {} ({})",
                run.result,
                if run.is_solution {
                    "solution"
                } else {
                    "not a solution"
                }
            );
            if let Some(path) = curve {
                write_file(path, &run.curve_csv())?;
                let _ = writeln!(out, "wrote {}", path.display());
            }
        }
        Command::Bb84 { bits, eve } => {
            let r = protocols::bb84(*bits, *eve, &mut rng)?;
            let _ = writeln!(out, "bits sent = {}", r.n_sent);
            let _ = writeln!(out, "eavesdropper = {}", r.eve_present);
            let _ = writeln!(out, "sifted bits = {}", r.sifted_indices.len());
            let _ = writeln!(
                out,
                "sifted fraction = {}",
                format_significant(r.sifted_fraction, 10)
            );
            let _ = writeln!(
                out,
                "disagreement rate = {}",
                format_significant(r.disagreement_rate, 10)
            );
        }
        Command::Teleport { trials } => {
            let mut worst = 1.0f64;
            for t in 0..*trials {
                let phi: StateVec64 = measure::random_state(1, &mut rng)?;
                let r = protocols::teleport(&phi, &mut rng)?;
                let fid = r.bob_final.inner(&phi)?.norm();
                worst = worst.min(fid);
                if *trials <= 10 {
                    let _ = writeln!(out, "trial {}: phi = {}", t + 1, phi.format_dirac(0.0));
                    let _ = writeln!(
                        out,
                        "  measured {:02b}, bob before correction = {}",
                        r.bits,
                        r.bob_before.format_dirac(0.0)
                    );
                    let _ = writeln!(
                        out,
                        "  bob = {}, |<phi|bob>| = {}",
                        r.bob_final.format_dirac(0.0),
                        format_significant(fid, 10)
                    );
                }
            }
            let _ = writeln!(
                out,
                "trials = {trials}, min fidelity = {}",
                format_significant(worst, 10)
            );
        }
        Command::Dense { value } => {
            let pair = EprPair::<f64>::new();
            let values: Vec<u8> = value.map_or_else(|| (0..4).collect(), |v| vec![v]);
            for v in values {
                let s = protocols::dense_encode(v, &pair)?;
                let decoded = protocols::dense_decode(&s)?;
                let _ = writeln!(
                    out,
                    "value {v}: {} -> decoded {decoded}",
                    s.format_dirac(1e-12)
                );
            }
        }
        Command::QecDemo => qec_demo(&mut rng, out)?,
        Command::Hogg {
            vars,
            vals,
            method,
            policy,
            steps,
        } => {
            let csp = CspInstance::unique_solution_demo(*vars, *vals)?;
            let policy: PhasePolicy = policy.parse()?;
            let n_atoms = csp.n_atoms();
            let method = if *method == 1 {
                UpMethod::Svd
            } else {
                UpMethod::Walsh(hogg::default_method2_phases(n_atoms))
            };
            let steps = steps.unwrap_or(vars + 1);
            let r = hogg::hogg_search::<f64>(&csp, steps, &method, policy, &mut rng)?;
            let _ = writeln!(
                out,
                "variables = {vars}, values = {vals}, atoms = {n_atoms}, steps = {steps}"
            );
            let sol: Vec<String> = csp
                .solutions()
                .into_iter()
                .map(|m| format!("{:?}", csp.basis.set_of(m)))
                .collect();
            let _ = writeln!(out, "solutions: {}", sol.join(" "));
            for (level, mass) in r.level_mass.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "level {level} mass = {}",
                    format_significant(*mass, 10)
                );
            }
            let _ = writeln!(
                out,
                "solution probability = {}",
                format_significant(r.solution_probability, 10)
            );
            let _ = writeln!(
                out,
                "measured {:?} ({})",
                r.assignment,
                if r.is_solution {
                    "solution"
                } else {
                    "not a solution"
                }
            );
        }
        Command::Run {
            file,
            input,
            measure: subset,
        } => {
            let text = fs::read_to_string(file).map_err(|e| CliError::Io(file.clone(), e))?;
            let c = circuit::parse(&text).map_err(QsimError::from)?;
            let initial = match input {
                Some(ket) => {
                    let s = StateVec64::parse_ket(ket)?;
                    if s.n_qubits() != c.n_qubits() {
                        return Err(QsimError::Dimension {
                            expected: c.n_qubits(),
                            found: s.n_qubits(),
                        }
                        .into());
                    }
                    s
                }
                None => StateVec64::basis(c.n_qubits(), 0)?,
            };
            let final_state = circuit::run(&c, &initial, &OracleRegistry::with_builtins())?;
            let _ = writeln!(out, "final state: {}", final_state.format_dirac(1e-12));
            if let Some(label) = basis_label(&final_state) {
                let _ = writeln!(out, "final ket: {label}");
            }
            if let Some(qs) = subset {
                let m = measure::measure(&final_state, qs, &mut rng)?;
                let bits: String = (0..qs.len())
                    .map(|k| {
                        if m.outcome >> (qs.len() - 1 - k) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "measured qubits {qs:?}: {bits} (probability {})",
                    format_significant(m.probability, 10)
                );
                let _ = writeln!(
                    out,
                    "post-measurement state: {}",
                    m.post_state.format_dirac(1e-12)
                );
            }
        }
        Command::QftDist {
            modulus,
            a,
            u,
            out: stem,
        } => {
            let d = shor::step_distributions(*modulus, *a, *u, &mut rng)?;
            let _ = writeln!(out, "M = {modulus}, a = {a}, u = {}", d.u);
            let support = d.step2.support(1e-12);
            let _ = writeln!(
                out,
                "step 2: {} support points, max probability {}",
                support.len(),
                format_significant(d.step2.get(d.step2.argmax()), 10)
            );
            let _ = writeln!(
                out,
                "step 3: peak at {} with probability {}",
                d.step3.argmax(),
                format_significant(d.step3.get(d.step3.argmax()), 10)
            );
            write_dists(stem, &d.step2, &d.step3, out)?;
        }
    }
    Ok(())
}

/// `|b0,b1,…⟩` when the state is a single basis vector up to phase.
fn basis_label(state: &StateVec64) -> Option<String> {
    let probs = state.probabilities();
    let idx = probs.iter().position(|&p| (p - 1.0).abs() < 1e-9)?;
    let n = state.n_qubits();
    let bits: Vec<String> = (0..n)
        .map(|q| ((idx >> (n - 1 - q)) & 1).to_string())
        .collect();
    Some(format!("|{}⟩", bits.join(",")))
}

fn qec_demo(rng: &mut RngStream, out: &mut String) -> CliResult<()> {
    use num_complex::Complex;
    let code = qec::bitflip_code::<f64>();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let data = StateVec64::from_real(&[h, -h])?;
    let encoded = qec::encode(&code, &data)?;
    let _ = writeln!(out, "data: {}", data.format_dirac(1e-12));
    let _ = writeln!(out, "encoded: {}", encoded.format_dirac(1e-12));
    let table = code.table();
    let err = qec::ErrorOperator::new(vec![
        (Complex::new(0.8, 0.0), table[&0b110].op.clone()),
        (Complex::new(0.6, 0.0), table[&0b101].op.clone()),
    ])?;
    let _ = writeln!(out, "error: 4/5 X⊗I⊗I + 3/5 I⊗X⊗I");
    let corrupted = qec::apply_error(&err, &encoded)?;
    let _ = writeln!(out, "corrupted: {}", corrupted.format_dirac(1e-12));
    let extracted = qec::extract_syndrome(&code, &corrupted)?;
    let _ = writeln!(
        out,
        "after syndrome extraction: {}",
        extracted.format_dirac(1e-12)
    );
    let probs = qec::syndrome_probabilities(&code, &corrupted)?;
    for s in probs.support(1e-12) {
        let branch = qec::recover_with_syndrome(&code, &corrupted, s)?;
        let _ = writeln!(
            out,
            "syndrome {s:03b}: probability {}, correction {}, fidelity {}",
            format_significant(probs.get(s), 10),
            branch.correction,
            format_significant(branch.fidelity_to(&encoded)?, 10)
        );
    }
    let r = qec::recover(&code, &corrupted, rng)?;
    let _ = writeln!(
        out,
        "measured syndrome {:03b}, applied {}",
        r.syndrome, r.correction
    );
    let _ = writeln!(out, "recovered: {}", r.final_state.format_dirac(1e-12));
    let _ = writeln!(
        out,
        "fidelity to encoded state: {}",
        format_significant(r.fidelity_to(&encoded)?, 10)
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run_command(&cli, &mut out);
    let emitted = match &cli.output {
        Some(path) => write_file(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    };
    match result.and(emitted) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Sim(e)) => {
            eprintln!("error: {e}");
            match e {
                QsimError::Capacity { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
        Err(CliError::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(1)
        }
    }
}
