//! End-to-end tests of every CLI subcommand and the exit-code contract:
//! 0 success, 1 validation/domain/comparison failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use odewb::circuit::write_circuit;
use odewb::fixtures::parity_circuit;

fn bin() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_BIN_EXE_odewb"));
    assert!(p.is_absolute() || { p = p.canonicalize().unwrap(); true });
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn odewb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn eval_check_gen_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("cmod2.prog");

    // gen writes a program that check accepts
    let o = run(&["gen", "cmodn", "-n", "2", "-o", prog.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["check", prog.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // eval: parity of 11 = 1011₂ is 1
    let o = run(&["eval", prog.to_str().unwrap(), "11"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1");

    // eval an inner definition with a trace
    let o = run(&["eval", prog.to_str().unwrap(), "11", "11", "-e", "cmodn_f", "--trace"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().count() > 2, "expected trace lines:\n{out}");
    assert_eq!(out.lines().last().unwrap().trim(), "1");
}

#[test]
fn eval_identity_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(
        dir.path(),
        "id.prog",
        ";; odewb-program v1\n(def id (x) x)\n(entry id)\n",
    );
    let o = run(&["eval", id.to_str().unwrap(), "42"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "42");

    // schema with g out of range: validation failure → exit 1
    let bad = write(
        dir.path(),
        "bad.prog",
        ";; odewb-program v1\n(def g (y) 7)\n(def k (w y) 1)\n(def f (x y) (2ode g k))\n(entry f)\n",
    );
    let o = run(&["eval", bad.to_str().unwrap(), "3"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("g"), "diagnostic should mention g: {}", stderr(&o));

    // missing file and malformed text are usage errors → exit 2
    let o = run(&["eval", dir.path().join("nope.prog").to_str().unwrap(), "1"]);
    assert_eq!(code(&o), 2);
    let junk = write(dir.path(), "junk.prog", "not a program\n");
    let o = run(&["eval", junk.to_str().unwrap(), "1"]);
    assert_eq!(code(&o), 2);
    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_rejects_bad_circuit() {
    let dir = tempfile::tempdir().unwrap();
    // layer-skipping wire: level-2 gate fed by a level-0 gate
    let bad = write(
        dir.path(),
        "skip.circ",
        "# odewb-circuit v1\nwidth 2 outputs 1\n0 0 in 0\n1 2 and 0\n",
    );
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));

    let good = write(dir.path(), "parity.circ", &write_circuit(&parity_circuit(3)));
    let o = run(&["check", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn compile_diff_roundtrip_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("cmod2.prog");
    let circ = dir.path().join("cmod2.circ");
    let back = dir.path().join("back.prog");
    let notes = dir.path().join("notes.txt");

    let o = run(&["gen", "cmodn", "-n", "2", "-o", prog.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // diff against the builtin reference, exhaustive then sampled
    let o = run(&["diff", prog.to_str().unwrap(), "popcount-mod:2", "--max", "4096"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("no counterexample"), "{}", stdout(&o));
    let o = run(&["diff", prog.to_str().unwrap(), "popcount-mod:2", "--seed", "7", "--count", "50"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("seed=7"), "seed must be recorded: {}", stdout(&o));

    // diff against a disagreeing reference fails with exit 1
    let o = run(&["diff", prog.to_str().unwrap(), "popcount-mod:3", "--max", "64"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("mismatch"), "{}", stdout(&o));

    // lower to a circuit, validate, round-trip, compile back
    let o = run(&[
        "compile", "to-circuit", prog.to_str().unwrap(),
        "--width", "4", "-o", circ.to_str().unwrap(), "--notes", notes.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(std::fs::read_to_string(&notes).unwrap().contains("depth"));
    let o = run(&["check", circ.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["roundtrip", circ.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}\n{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS"), "{}", stdout(&o));

    let o = run(&[
        "compile", "to-program", circ.to_str().unwrap(), "-o", back.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // the compiled program needs its circuit's connection table to evaluate
    let o = run(&["eval", back.to_str().unwrap(), "11", "--circuit", circ.to_str().unwrap(), "-e", "main"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1"); // parity of 1011₂
}

#[test]
fn gen_families_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    for (family, extra) in [("cmodn", vec!["-n", "3"]), ("bcount", vec![]), ("modn-via-bcount", vec!["-n", "5"])] {
        let p = dir.path().join(format!("{family}.prog"));
        let mut args = vec!["gen", family, "-o", p.to_str().unwrap()];
        args.extend(extra);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{family}: {}", stderr(&o));
        let o = run(&["check", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{family}: {}", stderr(&o));
    }
    // gen cmodn evaluates 7 ↦ popcount(7) mod 3 = 0
    let p = dir.path().join("cmodn.prog");
    let o = run(&["eval", p.to_str().unwrap(), "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0");
    // bad modulus is a usage error
    let o = run(&["gen", "cmodn", "-n", "1"]);
    assert_eq!(code(&o), 2);
}
