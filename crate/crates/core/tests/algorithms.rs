use num_complex::Complex;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qsim::circuit::{run, OracleRegistry};
use qsim::grover::{self, Predicate};
use qsim::hogg::{self, CspInstance, PhasePolicy, UpMethod};
use qsim::measure::{self, random_state, Distribution};
use qsim::ops::{self, apply, random_unitary, Matrix, UnitaryOp};
use qsim::protocols;
use qsim::qec::{self, ErrorOperator};
use qsim::qstate::StateVector;
use qsim::shor;
use qsim::RngStream;

type S = StateVector<f64>;

fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * total as f64;
        if e > 1e-9 {
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            assert_eq!(c, 0, "sampled an outcome with zero probability");
        }
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn sequential_measurement_matches_joint() {
    for n in 2..=4 {
        for seed in 0..3u64 {
            let s: S = random_state(n, &mut RngStream::new(100 + seed)).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let joint = measure::probabilities(&s, &all).unwrap();
            let mut rng = RngStream::new(seed);
            let mut counts = vec![0u64; 1 << n];
            for _ in 0..100_000 {
                let mut cur = s.clone();
                let mut outcome = 0;
                // one qubit at a time, last qubit first
                for q in (0..n).rev() {
                    let m = measure::measure(&cur, &[q], &mut rng).unwrap();
                    outcome |= m.outcome << (n - 1 - q);
                    cur = m.post_state;
                }
                counts[outcome] += 1;
            }
            let p = chi_square_p(&counts, joint.as_slice());
            assert!(p > 0.001, "n={n} seed={seed} p={p}");
        }
    }
}

#[test]
fn sampling_follows_distribution() {
    // length must be a power of two
    assert!(Distribution::new(vec![0.1, 0.0, 0.45, 0.05, 0.4]).is_err());
    let d = Distribution::new(vec![0.1, 0.0, 0.45, 0.45]).unwrap();
    let mut rng = RngStream::new(77);
    let mut counts = vec![0u64; 4];
    for _ in 0..100_000 {
        counts[d.sample(&mut rng)] += 1;
    }
    assert!(chi_square_p(&counts, d.as_slice()) > 0.001);
}

#[test]
fn grover_curve_matches_closed_form() {
    for n in 1..=10 {
        for s in [1usize, 2, 4] {
            if s >= 1 << n {
                continue;
            }
            let sols: Vec<u64> = (0..s as u64).map(|i| (i * 37 + 5) % (1 << n)).collect();
            let p = Predicate::from_solutions(n, &sols).unwrap();
            assert_eq!(p.solutions().len(), s);
            let run = grover::grover_search(
                &p,
                Some(2 * grover::default_iterations(n) + 2),
                &mut RngStream::new(1),
            )
            .unwrap();
            for (k, got) in run.success_curve.iter().enumerate() {
                let want = grover::analytic_success(n, s, k);
                assert!(
                    (got - want).abs() < 1e-9,
                    "n={n} s={s} k={k}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn grover_building_blocks() {
    let n = 5;
    let p = Predicate::from_solutions(n, &[3, 17]).unwrap();
    let s: S = random_state(n, &mut RngStream::new(4)).unwrap();
    let twice = grover::flip_sign(&p, &grover::flip_sign(&p, &s).unwrap()).unwrap();
    assert!(twice.approx_eq(&s, 1e-15));
    let via_ancilla = grover::flip_sign_with_ancilla(&p, &s).unwrap();
    assert!(via_ancilla.approx_eq(&grover::flip_sign(&p, &s).unwrap(), 1e-12));

    let d = grover::diffusion::<f64>(n).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let u: S = StateVector::uniform(n).unwrap();
    assert!(apply(&d, &all, &u).unwrap().approx_eq(&u, 1e-12));
    // a zero-mean vector is negated
    let mut v = vec![0.0; 1 << n];
    v[1] = 0.5;
    v[2] = -0.5;
    v[9] = 0.5;
    v[30] = -0.5;
    let z = S::from_real(&v).unwrap();
    let neg = S::from_real(&v.iter().map(|x| -x).collect::<Vec<_>>()).unwrap();
    assert!(apply(&d, &all, &z).unwrap().approx_eq(&neg, 1e-12));
    assert!(grover::invert_about_average(&s).approx_eq(&apply(&d, &all, &s).unwrap(), 1e-12));
}

#[test]
fn qft_concentrates_on_multiples() {
    for (r, m) in [(2usize, 4usize), (4, 4), (8, 6)] {
        let mut v = vec![0.0; 1 << m];
        for x in (0..1 << m).step_by(r) {
            v[x] = 1.0;
        }
        let amps = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let s = S::normalized(amps).unwrap();
        let out = run(&shor::qft_circuit(m), &s, &OracleRegistry::new()).unwrap();
        let d = measure::probabilities(&out, &(0..m).collect::<Vec<_>>()).unwrap();
        let step = (1 << m) / r;
        let want: Vec<usize> = (0..r).map(|j| j * step).collect();
        assert_eq!(d.support(1e-12), want, "r={r} m={m}");
        for &c in &want {
            assert!((d.get(c) - 1.0 / r as f64).abs() < 1e-12);
        }
    }
}

/// Marginal x-register distribution after the QFT with no Step-2 measurement.
fn skipped_step2(modulus: u64, a: u64) -> Distribution<f64> {
    let m = shor::choose_m(modulus);
    let n = m + shor::output_bits(modulus);
    let state = shor::period_state::<f64>(a, modulus, m).unwrap();
    let map: Vec<usize> = (0..m).collect();
    let qft = shor::qft_circuit(m).remap(n, &map).unwrap();
    let out = run(&qft, &state, &OracleRegistry::new()).unwrap();
    measure::probabilities(&out, &map).unwrap()
}

/// Mixture over `u` of the measured-path distributions.
fn measured_step2(modulus: u64, a: u64) -> Vec<f64> {
    let m = shor::choose_m(modulus);
    let state = shor::period_state::<f64>(a, modulus, m).unwrap();
    let y: Vec<usize> = (m..state.n_qubits()).collect();
    let pu = measure::probabilities(&state, &y).unwrap();
    let mut mix = vec![0.0; 1 << m];
    for u in pu.support(1e-12) {
        let d =
            shor::step_distributions(modulus, a, Some(u as u64), &mut RngStream::new(0)).unwrap();
        for (x, p) in d.step3.iter() {
            mix[x] += pu.get(u) * p;
        }
    }
    mix
}

#[test]
fn skipping_step2_leaves_x_distribution_unchanged() {
    for a in [2u64, 11, 13] {
        let skip = skipped_step2(21, a);
        let meas = measured_step2(21, a);
        for (x, p) in skip.iter() {
            assert!((p - meas[x]).abs() < 1e-10, "a={a} x={x}");
        }
    }
}

#[test]
fn skip_and_measured_paths_sample_alike() {
    let (modulus, a) = (15u64, 7u64);
    let skip = skipped_step2(modulus, a);
    let m = shor::choose_m(modulus);
    let state = shor::period_state::<f64>(a, modulus, m).unwrap();
    let y: Vec<usize> = (m..state.n_qubits()).collect();
    let pu = measure::probabilities(&state, &y).unwrap();
    let per_u: Vec<Option<Distribution<f64>>> = (0..pu.len())
        .map(|u| {
            (pu.get(u) > 1e-12).then(|| {
                shor::step_distributions(modulus, a, Some(u as u64), &mut RngStream::new(0))
                    .unwrap()
                    .step3
            })
        })
        .collect();
    let samples = 100_000;
    let mut rng = RngStream::new(2024);
    let (mut c_skip, mut c_meas) = (vec![0u64; skip.len()], vec![0u64; skip.len()]);
    for _ in 0..samples {
        c_skip[skip.sample(&mut rng)] += 1;
        let u = pu.sample(&mut rng);
        c_meas[per_u[u].as_ref().unwrap().sample(&mut rng)] += 1;
    }
    let tv: f64 = c_skip
        .iter()
        .zip(&c_meas)
        .map(|(a, b)| (*a as f64 - *b as f64).abs())
        .sum::<f64>()
        / (2.0 * samples as f64);
    assert!(tv < 0.02, "tv = {tv}");
}

#[test]
fn method1_beats_random_unitaries() {
    for n in 2..=4 {
        let raw = hogg::raw_up_matrix::<f64>(n).unwrap();
        let u1 = hogg::up_move_method1::<f64>(n).unwrap();
        let d1 = u1.matrix().frobenius_distance(&raw);
        let mut rng = RngStream::new(n as u64);
        for _ in 0..10 {
            let r: UnitaryOp<f64> = random_unitary(1 << n, &mut rng);
            assert!(d1 < r.matrix().frobenius_distance(&raw));
        }
        // permutations are unitary too
        let id = Matrix::<f64>::identity(1 << n);
        assert!(d1 <= id.frobenius_distance(&raw) + 1e-12);
    }
}

#[test]
fn hogg_invert_beats_no_phase() {
    let csp = CspInstance::two_by_two_demo();
    let walsh = UpMethod::Walsh(hogg::default_method2_phases::<f64>(4));
    for (method, steps) in [(&walsh, 3usize), (&UpMethod::Svd, 6)] {
        let p = |policy| {
            hogg::hogg_search::<f64>(&csp, steps, method, policy, &mut RngStream::new(0))
                .unwrap()
                .solution_probability
        };
        assert!(p(PhasePolicy::InvertBad) > p(PhasePolicy::None));
    }
    let r = hogg::hogg_search::<f64>(
        &csp,
        3,
        &walsh,
        PhasePolicy::RandomPhaseBad,
        &mut RngStream::new(9),
    )
    .unwrap();
    assert!((r.final_norm - 1.0).abs() < 1e-12);
    assert!((r.level_mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

/// A unitary that copies each of two orthogonal states `a`, `b` onto a blank qubit.
fn cloner(a: &S, b: &S) -> UnitaryOp<f64> {
    let zero = S::basis(1, 0).unwrap();
    let one = S::basis(1, 1).unwrap();
    let pairs = [
        (a.tensor(&zero).unwrap(), a.tensor(a).unwrap()),
        (b.tensor(&zero).unwrap(), b.tensor(b).unwrap()),
        (a.tensor(&one).unwrap(), a.tensor(b).unwrap()),
        (b.tensor(&one).unwrap(), b.tensor(a).unwrap()),
    ];
    let m = Matrix::from_fn(4, |r, c| {
        pairs
            .iter()
            .map(|(input, output)| output.amplitude(r) * input.amplitude(c).conj())
            .sum()
    });
    UnitaryOp::new(m).unwrap()
}

#[test]
fn cloning_fails_off_the_cloned_pair() {
    let mut rng = RngStream::new(31);
    for _ in 0..10 {
        let basis: UnitaryOp<f64> = random_unitary(2, &mut rng);
        let col = |j: usize| {
            S::from_amplitudes(vec![basis.matrix().get(0, j), basis.matrix().get(1, j)]).unwrap()
        };
        let (a, b) = (col(0), col(1));
        let u = cloner(&a, &b);
        let zero = S::basis(1, 0).unwrap();
        for s in [&a, &b] {
            let out = apply(&u, &[0, 1], &s.tensor(&zero).unwrap()).unwrap();
            assert!((out.fidelity(&s.tensor(s).unwrap()).unwrap() - 1.0).abs() < 1e-10);
        }
        let amps: Vec<_> = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x + y)
            .collect();
        let c = S::normalized(amps).unwrap();
        let out = apply(&u, &[0, 1], &c.tensor(&zero).unwrap()).unwrap();
        let f = out.inner(&c.tensor(&c).unwrap()).unwrap().norm();
        assert!(1.0 - f >= 0.2, "fidelity {f}");
    }
}

#[test]
fn qec_recovers_random_single_flip_mixtures() {
    let code = qec::bitflip_code::<f64>();
    let flips: Vec<UnitaryOp<f64>> = code
        .table()
        .iter()
        .filter(|(s, _)| **s != 0)
        .map(|(_, c)| c.op.clone())
        .collect();
    let identity = code.table()[&0].op.clone();
    for seed in 0..4u64 {
        let mut rng = RngStream::new(seed);
        for _ in 0..20 {
            let data: S = random_state(1, &mut rng).unwrap();
            let enc = qec::encode(&code, &data).unwrap();
            for _ in 0..10 {
                let mut w: Vec<Complex<f64>> = (0..4)
                    .map(|_| Complex::new(rng.next_gaussian(), rng.next_gaussian()))
                    .collect();
                let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut w {
                    *z /= norm;
                }
                let terms = std::iter::once(identity.clone())
                    .chain(flips.iter().cloned())
                    .zip(w)
                    .map(|(op, c)| (c, op))
                    .collect();
                let corrupted =
                    qec::apply_error(&ErrorOperator::new(terms).unwrap(), &enc).unwrap();
                let r = qec::recover(&code, &corrupted, &mut rng).unwrap();
                assert!((r.fidelity_to(&enc).unwrap() - 1.0).abs() < 1e-9);
                assert!((r.codespace_fidelity - 1.0).abs() < 1e-9);
                let back = qec::decode(&code, &r.final_state).unwrap();
                assert!(back.eq_up_to_phase(&data, 1e-9));
            }
        }
    }
}

#[test]
fn teleportation_and_dense_coding() {
    let mut rng = RngStream::new(8);
    for _ in 0..1000 {
        let phi: S = random_state(1, &mut rng).unwrap();
        let t = protocols::teleport(&phi, &mut rng).unwrap();
        assert!((t.bob_final.inner(&phi).unwrap().norm() - 1.0).abs() < 1e-9);
    }
    let phi: S = random_state(1, &mut rng).unwrap();
    let probs = protocols::teleport_branch_probabilities(&phi).unwrap();
    for bits in 0..4 {
        assert!((probs.get(bits) - 0.25).abs() < 1e-12);
    }
    let pair = protocols::EprPair::<f64>::new();
    for v in 0..4u8 {
        assert_eq!(
            protocols::dense_decode(&protocols::dense_encode(v, &pair).unwrap()).unwrap(),
            v
        );
    }
}

#[test]
fn f32_search_and_code() {
    let p = Predicate::from_solutions(6, &[42]).unwrap();
    let run = grover::grover_search_with::<f32>(&p, None, &mut RngStream::new(3)).unwrap();
    assert!(
        (run.success_probability() - grover::analytic_success(6, 1, run.iterations)).abs() < 1e-4
    );

    let code = qec::bitflip_code::<f32>();
    let data: StateVector<f32> = random_state(1, &mut RngStream::new(3)).unwrap();
    let enc = qec::encode(&code, &data).unwrap();
    let flip = code.table()[&0b011].op.clone();
    let corrupted = qec::apply_error(&ErrorOperator::single(flip), &enc).unwrap();
    let r = qec::recover(&code, &corrupted, &mut RngStream::new(0)).unwrap();
    assert!((r.fidelity_to(&enc).unwrap() - 1.0).abs() < 1e-5);
    assert!(ops::walsh::<f32>(4).unwrap().unitarity_defect() < 1e-5);
}
