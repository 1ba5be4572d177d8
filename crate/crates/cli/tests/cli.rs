use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const PSI1: &str = r#"
[group]
rank = 2

[psi]
a = "a"
b = "abA"

[psi_inv]
a = "a"
b = "Aba"

[subgroup]
words = ["b"]

[config]
max_level = 5
"#;

const PSI3: &str = r#"
[group]
rank = 2

[psi]
a = "b"
b = "ab"

[psi_inv]
a = "bA"
b = "a"

[subgroup]
words = ["a"]
"#;

fn triplefold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplefold")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn certify_psi1() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "psi1.toml", PSI1);
    let o = triplefold(&["certify", &spec]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("rr: (1, 1)\n"), "{out}");
    assert!(out.contains("chi: -1\n"));
    assert!(out.contains("injective_up_to_N: true\n"));
}

#[test]
fn certify_json_lines() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "psi1.toml", PSI1);
    let o = triplefold(&["certify", &spec, "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["chi"], -1);
    assert_eq!(v["E"][0], "b");
}

#[test]
fn bad_inverse_table_names_generator() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bad.toml", &PSI1.replace("b = \"Aba\"", "b = \"ab\""));
    let o = triplefold(&["check-auto", &spec]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("(b)") || err.contains("(a)"), "{err}");
}

#[test]
fn parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bad.toml", &PSI1.replace("abA", "ab?"));
    assert_eq!(triplefold(&["certify", &spec]).status.code(), Some(2));
    let spec = write(&dir, "missing.toml", "[group]\nrank = 2\n");
    assert_eq!(triplefold(&["certify", &spec]).status.code(), Some(2));
    assert_eq!(triplefold(&["stallings", "a1"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_three() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "big.toml", &PSI1.replace("[\"b\"]", "[\"b\", \"aaaaabAAAAA\"]"));
    let o = triplefold(&["triple", "tighten", &spec, "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn stallings_dot() {
    let o = triplefold(&["stallings", "abA", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches(" -> ").count(), 2);
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with('v') && !l.contains("->")).count(), 2);
}

#[test]
fn random_fold_order_gives_same_graph() {
    let base = stdout(&triplefold(&["stallings", "abAB", "aab", "Ba"]));
    for seed in ["1", "2", "3"] {
        let o = triplefold(&["stallings", "abAB", "aab", "Ba", "--fold-order", "random", "--seed", seed]);
        assert_eq!(stdout(&o), base);
    }
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "psi1.toml", &PSI1.replace("[\"b\"]", "[\"b\", \"aaabAAA\"]"));
    let a = triplefold(&["triple", "minimize", &spec, "--format", "dot"]);
    let b = triplefold(&["triple", "minimize", &spec, "--format", "dot"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tighten_json_lines_are_events() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.toml", &PSI3.replace("[\"a\"]", "[\"a\", \"aab\"]"));
    let o = triplefold(&["triple", "tighten", &spec, "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(!out.is_empty());
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["class"].is_string());
    }
}

#[test]
fn presentation_full_group() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "psi3.toml", PSI3);
    let o = triplefold(&["presentation", &spec]);
    assert_eq!(stdout(&o), "gens: a,b,t\nrel: t^-1 a t = b\nrel: t^-1 b t = ab\n");
}

#[test]
fn embed_then_verify() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "psi1.toml", PSI1);
    let cert = triplefold(&["decompose", &spec]);
    assert_eq!(cert.status.code(), Some(0));
    let cert_path = write(&dir, "cert.txt", &stdout(&cert));
    let emb = triplefold(&["embed", &spec, "--certificate", &cert_path]);
    assert_eq!(emb.status.code(), Some(0));
    assert!(stdout(&emb).contains("power: 3\n"));
    let emb_path = write(&dir, "emb.txt", &stdout(&emb));
    let o = triplefold(&["verify-embed", &spec, "--certificate", &cert_path, "--embedding", &emb_path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let broken = stdout(&emb).replace("theta: a -> ab\n", "theta: a -> ba\n");
    let emb_path = write(&dir, "broken.txt", &broken);
    let o = triplefold(&["verify-embed", &spec, "--certificate", &cert_path, "--embedding", &emb_path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("intertwining: fail"));
    assert!(Path::new(&cert_path).exists());
}
