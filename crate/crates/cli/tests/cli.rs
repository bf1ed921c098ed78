use std::process::{Command, Output};

fn qsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsim"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn adder_circuit_adds() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/circuits/adder.qc");
    let o = qsim(&["run", file, "--input", "|1,1,0,0,0⟩"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("final ket: |1,1,0,0,1⟩"));
}

#[test]
fn exit_codes() {
    assert_eq!(qsim(&["shor", "--M", "65"]).status.code(), Some(3));
    assert_eq!(qsim(&["shor", "--bogus"]).status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("qsim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.qc");
    std::fs::write(&bad, "qubits 2\nh 0\ncnot 0 5\n").unwrap();
    let o = qsim(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dense_and_grover_report() {
    for v in 0..4 {
        let o = qsim(&["dense", "--value", &v.to_string()]);
        assert!(stdout(&o).contains(&format!("decoded {v}")));
    }
    let o = qsim(&["--seed", "4", "grover", "--n", "6", "--solutions", "9"]);
    assert!(o.status.success());
    assert!(!stdout(&o).is_empty());
}

#[test]
fn seed_changes_sampled_output() {
    let a = stdout(&qsim(&["--seed", "1", "bb84", "--bits", "500", "--eve"]));
    let b = stdout(&qsim(&["--seed", "2", "bb84", "--bits", "500", "--eve"]));
    assert_ne!(a, b);
}
