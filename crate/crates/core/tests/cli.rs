use std::path::Path;
use std::process::{Command, Output};

use rand::Rng;

fn hookrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hookrec"))
        .args(args)
        .env_remove("HOOKREC_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_terms(dir: &Path, name: &str, terms: &[String]) -> String {
    let path = dir.join(name);
    std::fs::write(&path, terms.join("\n")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn seq_prints_from_one() {
    let out = hookrec(&["seq", "-k", "2", "-l", "1", "-z", "1", "-n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1, 2, 4, 10, 26, 71");
    let out = hookrec(&["seq", "-k", "2", "-l", "2", "-z", "2", "-n", "8"]);
    assert_eq!(stdout(&out).trim(), "1, 2, 6, 24, 120, 720, 5040, 40320");
    let out = hookrec(&["seq", "-k", "0", "-l", "1", "-z", "1", "-n", "3"]);
    assert_eq!(stdout(&out).trim(), "1, 1, 1");
}

#[test]
fn seq_json_has_explicit_start_and_same_numbers() {
    let text = stdout(&hookrec(&["seq", "-k", "2", "-l", "2", "-z", "1", "-n", "12"]));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&hookrec(&["--format", "json", "seq", "-k", "2", "-l", "2", "-z", "1", "-n", "12"])))
            .unwrap();
    assert_eq!(json["start"], 0);
    let terms: Vec<&str> = json["terms"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert_eq!(terms[0], "1");
    assert_eq!(terms[1..].join(", "), text.trim());
}

#[test]
fn invalid_flags_exit_two() {
    assert_eq!(hookrec(&["seq", "-z", "0", "-n", "3"]).status.code(), Some(2));
    assert_eq!(hookrec(&["seq", "-n", "-3"]).status.code(), Some(2));
    assert_eq!(hookrec(&["seq", "-n", "3", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn fit_reproduces_operators() {
    let out = hookrec(&["fit", "-k", "2", "-l", "1", "-z", "1", "--terms", "60", "--holdout", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("(3*n^2 + 9*n + 6) + (-n^2 - 2*n)*N + (-3*n^2 - 11*n - 9)*N^2 + (n^2 + 4*n + 3)*N^3"), "{text}");
    assert!(text.contains("PASS"));

    let out = hookrec(&["--format", "json", "fit", "-k", "2", "-l", "2", "-z", "1", "--terms", "60", "--holdout", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["operator"]["order"], 5);
    assert_eq!(json["operator"]["coeffs"][5], serde_json::json!(["20", "9", "1"]));
    assert_eq!(json["passed"], true);
}

#[test]
fn random_sequence_has_no_operator() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand::thread_rng();
    let terms: Vec<String> = (0..80).map(|_| rng.gen::<u64>().to_string()).collect();
    let path = write_terms(dir.path(), "random.txt", &terms);
    assert_eq!(hookrec(&["fit", "--input", &path]).status.code(), Some(3));
}

#[test]
fn broken_holdout_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let mut terms: Vec<String> = (0..70u32).map(|n| (1u128 << n).to_string()).collect();
    terms[65] = "1".into();
    let path = write_terms(dir.path(), "pow2.txt", &terms);
    let out = hookrec(&["fit", "--input", &path, "--terms", "60", "--holdout", "10"]);
    assert_eq!(out.status.code(), Some(4), "{}", stdout(&out));
}

#[test]
fn fibonacci_asymptotics_are_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let mut fib = vec![1u128, 1];
    while fib.len() < 60 {
        fib.push(fib[fib.len() - 1] + fib[fib.len() - 2]);
    }
    let path = write_terms(dir.path(), "fib.txt", &fib.iter().map(u128::to_string).collect::<Vec<_>>());
    let out = hookrec(&["asy", "--input", &path]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mu^2 - mu - 1"));
}

#[test]
fn asy_prints_exact_expansion_and_constant() {
    let out = hookrec(&["asy", "-k", "2", "-l", "1", "-z", "1", "-J", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in ["mu = 3", "theta = -1/2", "a_1 = -3/16", "a_2 = 1/512", "a_3 = 135/8192", "matched: (1/4) * sqrt(3) * pi^(-1/2)"] {
        assert!(text.contains(line), "missing {line:?} in {text}");
    }
    assert!(!text.contains("a_4"));

    let out = hookrec(&["--format", "json", "asy", "-k", "2", "-l", "2", "-z", "2", "-J", "3"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["mu"], "16");
    assert_eq!(json["theta"], "-7/2");
    assert_eq!(json["coeffs"], serde_json::json!(["33/8", "2145/128", "81723/1024"]));
    assert_eq!(json["constant"]["matched"], serde_json::json!({"p": 1, "q": 32, "m": 1, "pi_exp": "-3/2"}));
}

#[test]
fn const_and_extend_commands() {
    let out = hookrec(&["const", "-k", "2", "-l", "2", "-z", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("matched: (1/4) * pi^(-1)"));

    let out = hookrec(&["extend", "-k", "2", "-l", "1", "-z", "1", "--terms", "30", "--to", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).trim().ends_with("64498427, 188689685"));
}

#[test]
fn cache_directory_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = hookrec(&["--cache-dir", d, "fit", "-k", "2", "-l", "1", "-z", "2"]);
    assert_eq!(first.status.code(), Some(0));
    let entry: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("series_k2_l1_z2.json")).unwrap()).unwrap();
    assert_eq!(entry["terms"].as_array().unwrap().len(), 80);
    assert_eq!(entry["operator"]["order"], 3);
    let seq = hookrec(&["--cache-dir", d, "seq", "-k", "2", "-l", "1", "-z", "2", "-n", "6"]);
    assert_eq!(stdout(&seq).trim(), "1, 2, 6, 24, 120, 695");
}

#[test]
fn paper_passes_and_is_deterministic() {
    let a = hookrec(&["--format", "json", "paper", "--holdout", "40"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = Command::new(env!("CARGO_BIN_EXE_hookrec"))
        .args(["--format", "json", "paper", "--holdout", "40"])
        .env("RAYON_NUM_THREADS", "1")
        .env_remove("HOOKREC_CACHE_DIR")
        .output()
        .unwrap();
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn paper_names_a_perturbed_term() {
    let out = hookrec(&["paper", "--perturb", "1:7"]);
    assert_ne!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("first mismatch: (k,l)=(2,1), z=2: terms: term n=7: expected 4404, computed 4403"), "{text}");
}
