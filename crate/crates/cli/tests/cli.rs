use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use leastper::format::{load_dfa, load_dfao, save_dfao};
use leastper::sequences::Builtin;
use tempfile::TempDir;

fn leastper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leastper"))
        .args(args)
        .env_remove("LEASTPER_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn build(dir: &Path, seq: &str, extra: &[&str]) -> Output {
    let mut args = vec!["build", seq, "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = leastper(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn thue_morse_build_accepts_every_positive_n() {
    let dir = TempDir::new().unwrap();
    let out = build(dir.path(), "thue-morse", &[]);
    assert!(stdout(&out).contains("accepts every n >= 1"));
    let l = dir.path().join("L.dfa");
    let q = leastper(&["query", l.to_str().unwrap(), "1"]);
    assert_eq!((code(&q), stdout(&q).trim()), (0, "accept"));
    let listed = leastper(&["enumerate", l.to_str().unwrap(), "--max", "100"]);
    let expected: String = (1..=100).map(|n| format!("{n}\n")).collect();
    assert_eq!(stdout(&listed), expected);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["accepts_every_positive"], true);
    assert_eq!(report["lsd_states"], 1);
}

#[test]
fn paperfolding_build_query_enumerate_density() {
    let dir = TempDir::new().unwrap();
    build(dir.path(), "paperfolding", &["--msd", "--dot"]);
    for file in [
        "P.dfa",
        "LP.dfa",
        "L.dfa",
        "L.msd.dfa",
        "L.dot",
        "report.json",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let msd = load_dfa(&fs::read_to_string(dir.path().join("L.msd.dfa")).unwrap()).unwrap();
    assert_eq!(msd.state_count(), 12);

    let l = dir.path().join("L.dfa");
    let l = l.to_str().unwrap();
    let q18 = leastper(&["query", l, "18"]);
    assert_eq!((code(&q18), stdout(&q18).trim()), (1, "reject"));
    let q17 = leastper(&["query", l, "17"]);
    assert_eq!((code(&q17), stdout(&q17).trim()), (0, "accept"));

    let omitted = leastper(&["enumerate", l, "--max", "24", "--complement"]);
    assert_eq!(stdout(&omitted).lines().next(), Some("18"));

    let d = leastper(&["density", l]);
    assert_eq!(stdout(&d).lines().next(), Some("57/64"));
    let json: serde_json::Value =
        serde_json::from_slice(&leastper(&["density", l, "--json"]).stdout).unwrap();
    assert_eq!(json["cesaro_density"]["numerator"], "57");
    assert_eq!(json["least_omitted"], 18);
}

#[test]
fn build_is_deterministic_and_cache_is_transparent() {
    let (a, b, cache) = (
        TempDir::new().unwrap(),
        TempDir::new().unwrap(),
        TempDir::new().unwrap(),
    );
    let cache_arg = ["--cache-dir", cache.path().to_str().unwrap()];
    build(a.path(), "rudin-shapiro", &cache_arg);
    let second = build(b.path(), "rudin-shapiro", &cache_arg);
    assert!(stdout(&second).contains("(cached)"));
    for file in ["P.dfa", "LP.dfa", "L.dfa", "report.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file} differs"
        );
    }
}

#[test]
fn build_from_dfao_file() {
    let dir = TempDir::new().unwrap();
    let seq = dir.path().join("custom.dfao");
    fs::write(&seq, save_dfao(&Builtin::PeriodDoubling.dfao())).unwrap();
    let out_dir = dir.path().join("out");
    let out = build(&out_dir, seq.to_str().unwrap(), &[]);
    assert!(stdout(&out).starts_with("custom "));
    assert!(stdout(&out).contains("accepts every n >= 1"));
}

#[test]
fn enumerate_on_empty_automaton() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.dfa");
    let out = leastper(&["eval", "n < 0", "--out", empty.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let listed = leastper(&["enumerate", empty.to_str().unwrap(), "--max", "10"]);
    assert_eq!((code(&listed), stdout(&listed).as_str()), (0, ""));
}

#[test]
fn density_of_simple_sets() {
    let dir = TempDir::new().unwrap();
    for (text, expected) in [("n >= 0", "1"), ("Em n = m+m", "1/2")] {
        let path = dir.path().join("set.dfa");
        assert_eq!(
            code(&leastper(&["eval", text, "--out", path.to_str().unwrap()])),
            0
        );
        let d = leastper(&["density", path.to_str().unwrap()]);
        assert_eq!(stdout(&d).lines().next(), Some(expected), "{text}");
    }
}

#[test]
fn verify_passes_and_lists_omissions() {
    let rs = leastper(&["verify", "rudin-shapiro", "--max-n", "256"]);
    assert_eq!(code(&rs), 0, "{}", stdout(&rs));
    let pf = leastper(&["verify", "paperfolding", "--max-n", "256"]);
    assert_eq!(code(&pf), 0);
    assert!(stdout(&pf).contains("omitted: 18 34 50"));
}

#[test]
fn verify_reports_short_prefix_as_not_converged() {
    let out = leastper(&["verify", "thue-morse", "--max-n", "64", "--prefix", "2^7"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("not converged"));
}

#[test]
fn eval_matches_period_doubling() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("eq.dfao");
    let out = leastper(&[
        "eval",
        "x[n]=x[n+1]",
        "--seq",
        "x=thue-morse",
        "--dfao",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let equal = load_dfao(&fs::read_to_string(&path).unwrap()).unwrap();
    let pd = Builtin::PeriodDoubling.dfao();
    for n in 0..1024 {
        assert_eq!(equal.eval(n), 1 - pd.eval(n), "n = {n}");
    }
}

#[test]
fn eval_sentences_and_definitions() {
    let t = leastper(&["eval", "En x[n]=1", "--seq", "x=thue-morse"]);
    assert_eq!((code(&t), stdout(&t).trim()), (0, "true"));
    let cube_free = leastper(&[
        "eval",
        "En,i (n >= 1 & $Cube(n,i))",
        "--seq",
        "x=tm",
        "--define",
        "Cube(n,i)=At (t < n+n) => x[i+t] = x[i+t+n]",
    ]);
    assert_eq!((code(&cube_free), stdout(&cube_free).trim()), (0, "false"));
}

#[test]
fn eval_track_order() {
    let out = leastper(&["eval", "x < y", "--free", "y,x,z"]);
    assert_eq!(code(&out), 0);
    let a = load_dfa(&stdout(&out)).unwrap();
    assert_eq!(a.tracks(), ["y", "x", "z"]);
    assert!(a.run(&[2, 1, 9]).unwrap());
}

#[test]
fn errors_exit_with_two() {
    let syntax = leastper(&["eval", "x[n]=x[n+1", "--seq", "x=tm"]);
    assert_eq!(code(&syntax), 2);
    assert!(String::from_utf8_lossy(&syntax.stderr).contains("syntax error"));
    assert_eq!(code(&leastper(&["query", "/nonexistent/L.dfa", "3"])), 2);
    assert_eq!(code(&leastper(&["build", "no-such-sequence"])), 2);
    assert_eq!(code(&leastper(&["frobnicate"])), 2);
}
