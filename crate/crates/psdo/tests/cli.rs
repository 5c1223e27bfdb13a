use std::path::Path;
use std::process::Command;

use psdo::cli::main_with_args;
use psdo::format::{load_symbol, LoadedSymbol, SymbolFile};
use psdo_core::scalar::{exact, rational, Exact};
use psdo_core::symbol::PolySymbol;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["psdo"];
    full.extend_from_slice(args);
    let code = main_with_args(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_poly(dir: &Path, name: &str, p: &PolySymbol<Exact>) -> String {
    let path = dir.join(name);
    SymbolFile::from_poly(p).write(&path).unwrap();
    path.display().to_string()
}

fn xxi() -> PolySymbol<Exact> {
    PolySymbol::x(1, 0).mul(&PolySymbol::xi(1, 0))
}

fn osc() -> PolySymbol<Exact> {
    let (x, xi) = (PolySymbol::<Exact>::x(1, 0), PolySymbol::xi(1, 0));
    PolySymbol::one(1).add(&x.mul(&x)).add(&xi.mul(&xi))
}

#[test]
fn change_quant_of_x_xi_to_weyl() {
    let dir = TempDir::new().unwrap();
    let input = write_poly(dir.path(), "a.json", &xxi());
    let out = dir.path().join("b.json");
    let (code, text, err) = run(&[
        "calc",
        "change-quant",
        "--symbol",
        &input,
        "--from",
        "0",
        "--to",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{text}{err}");
    let (file, LoadedSymbol::Poly(b)) = load_symbol(&out).unwrap() else { panic!("poly expected") };
    assert_eq!(b, xxi().add(&PolySymbol::constant(1, exact(rational(0, 1), rational(1, 2)))));
    assert_eq!(file.tau.as_deref(), Some("1/2"));
}

#[test]
fn identities_exit_zero() {
    let (code, text, _) = run(&["calc", "identities"]);
    assert_eq!(code, 0);
    assert!(text.contains("PASS  vandermonde") && text.contains("0 violations"));
}

#[test]
fn parametrix_verify_reports_vanishing_grades() {
    let dir = TempDir::new().unwrap();
    let p = write_poly(dir.path(), "p.json", &osc());
    let report = dir.path().join("r.json");
    let (code, text, _) = run(&[
        "--seed",
        "42",
        "--report",
        report.to_str().unwrap(),
        "parametrix",
        "verify",
        "--symbol",
        &p,
        "--order",
        "4",
    ]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("r_1..r_4 = 0"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["config"]["command"]["Parametrix"]["Verify"]["args"]["order"], 4);
}

#[test]
fn compose_in_both_conventions() {
    let dir = TempDir::new().unwrap();
    let a = write_poly(dir.path(), "a.json", &PolySymbol::xi(1, 0));
    let b = write_poly(dir.path(), "b.json", &PolySymbol::x(1, 0));
    let out = dir.path().join("c.json");
    let (code, ..) =
        run(&["calc", "compose", "--symbol", &a, "--with", &b, "--tau", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let LoadedSymbol::Poly(c) = load_symbol(&out).unwrap().1 else { panic!() };
    // ξ ∘ x = xξ − i at τ = 0.
    assert_eq!(c, xxi().add(&PolySymbol::constant(1, exact(rational(0, 1), rational(-1, 1)))));
    let (code, ..) = run(&[
        "calc",
        "compose",
        "--symbol",
        &a,
        "--with",
        &b,
        "--tau",
        "0",
        "--convention",
        "paper",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(SymbolFile::read(&out).unwrap().two_pi_power, Some(1));
}

#[test]
fn parse_errors_name_the_line_and_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"dim\": 1,\n  \"representation\": \"poly\",\n  \"terms\": [oops]\n}\n").unwrap();
    let (code, _, err) = run(&["calc", "transpose", "--symbol", bad.to_str().unwrap(), "--tau", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
    let (code, _, err) = run(&["weights", "check", "--weight", "gevrey:a=1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("gevrey"), "{err}");
    let (code, ..) = run(&["calc", "nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn failed_assertion_exits_one() {
    let dir = TempDir::new().unwrap();
    let half = exact(rational(1, 2), rational(0, 1));
    let a = PolySymbol::xi(2, 0).sub(&PolySymbol::x(2, 1).scale(&half));
    let b = PolySymbol::xi(2, 1).sub(&PolySymbol::x(2, 0).scale(&half));
    let tw = write_poly(dir.path(), "tw.json", &a.mul(&a).add(&b.mul(&b)));
    let (code, text, _) = run(&["hypo", "check", "--symbol", &tw, "--weight", "gevrey:a=0.5", "--max-order", "2"]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL  lower bound (i)"), "{text}");
}

#[test]
fn weights_and_oracles() {
    assert_eq!(run(&["weights", "check", "--weight", "gevrey:a=0.5"]).0, 0);
    assert_eq!(run(&["weights", "conj", "--weight", "logpower:s=2"]).0, 0);
    let dir = TempDir::new().unwrap();
    let a = write_poly(dir.path(), "a.json", &xxi());
    let (code, text, _) = run(&[
        "oracle",
        "compare",
        "--symbol",
        &a,
        "--tau",
        "0",
        "--tau2",
        "1/2",
        "--test",
        "hermite:k=0+3",
        "--test",
        "hermite:k=7",
    ]);
    assert_eq!(code, 0, "{text}");
    let (code, text, _) = run(&[
        "oracle",
        "grid-apply",
        "--symbol",
        &a,
        "--tau",
        "1/2",
        "--test",
        "gaussian:center=0.5,width=1",
        "--grid",
        "n=256,xmax=12",
    ]);
    assert_eq!(code, 0, "{text}");
}

#[test]
fn binary_honours_thread_override_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_psdo");
    let ok = Command::new(exe).env("PSDO_THREADS", "2").args(["suite", "all", "--only", "3,6"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("weyl benchmark"));
    let bad = Command::new(exe).env("PSDO_THREADS", "zero").args(["calc", "identities"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
