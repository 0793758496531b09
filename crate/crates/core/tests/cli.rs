use std::process::{Command, Output};

fn compalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compalg")).args(args).output().expect("run compalg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bracket_of_canonical_pair() {
    let o = compalg(&["bracket", "q", "p"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("alpha  = 1"), "{text}");
    assert!(text.contains("beta+  = q*p + 1/2*J"), "{text}");
}

#[test]
fn parse_errors_exit_with_two() {
    let o = compalg(&["bracket", "q^", "p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 2"));
}

#[test]
fn unsupported_combinations_exit_with_two() {
    let o = compalg(&["--class", "parabolic", "--rep", "matrix", "audit", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = compalg(&["--class", "hyperbolic", "--rep", "phase", "audit", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = compalg(&["chsh", "--angles", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn audit_passes_and_is_reproducible() {
    let args = ["--rep", "matrix", "--seed", "7", "--json", "audit", "--samples", "4"];
    let (a, b) = (compalg(&args), compalg(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
}

#[test]
fn forged_table_fails_audit() {
    let o = compalg(&["--rep", "composite-matrix", "audit", "--samples", "3", "--entry", "a11=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_json_is_reproducible() {
    let args = ["--rep", "phase", "--seed", "3", "--json", "solve-coproduct"];
    let (a, b) = (compalg(&args), compalg(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["family"]["fixed"]["a12"], "1");
    assert_eq!(v["family"]["free"][0], "b11");
}

#[test]
fn contradictory_assumption_exits_with_one() {
    let o = compalg(&["--rep", "matrix", "solve-coproduct", "--assume", "a12=2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no solution"));
}

#[test]
fn chsh_is_flagged_as_extension() {
    let o = compalg(&["--help"]);
    assert!(stdout(&o).contains("extension"));
    let o = compalg(&["chsh"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2*sqrt(2)"));
    let o = compalg(&["chsh", "--classical"]);
    assert!(stdout(&o).contains("classical max S = 2"));
}
