use std::path::Path;
use std::process::{Command, Output};

fn freearr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freearr")).args(args).current_dir(dir).env_remove("FREEARR_BUDGET").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn catalog_file(dir: &Path, name: &str) {
    let o = freearr(&["catalog", "get", name], dir);
    assert!(o.status.success());
    write(dir, &format!("{name}.txt"), &stdout(&o));
}

#[test]
fn catalog_get_emits_the_embedded_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = freearr(&["catalog", "get", "A"], dir.path());
    assert_eq!(stdout(&o), freearr::catalog::A_TXT);
    let o = freearr(&["catalog", "get", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = freearr(&["--json", "catalog", "list"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|e| e["name"] == "Dpp" && e["hyperplanes"] == 16));
}

#[test]
fn chi_prints_expanded_and_factored() {
    let dir = tempfile::tempdir().unwrap();
    catalog_file(dir.path(), "D");
    let o = freearr(&["chi", "D.txt"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("(t - 1)(t - 5)^4"));
    let o = freearr(&["--json", "chi", "D.txt"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exponents"], serde_json::json!([1, 5, 5, 5, 5]));
    assert_eq!(v["coefficients"][4], -21);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.txt", "dim 2\n1 0\n0 1 1\n");
    let o = freearr(&["chi", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    write(dir.path(), "dup.txt", "dim 2\n1 0\n-2 0\n");
    assert!(freearr(&["chi", "dup.txt"], dir.path()).status.success());
    let o = freearr(&["--strict", "chi", "dup.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn constructions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    catalog_file(p, "D");
    catalog_file(p, "Dpp");
    let o = freearr(&["restrict", "D.txt", "--flat", "21"], p);
    write(p, "r.txt", &stdout(&o));
    let o = freearr(&["iso", "r.txt", "Dpp.txt"], p);
    assert!(stdout(&o).contains("linear isomorphism: yes"), "{}", stdout(&o));
    write(p, "x4.txt", "dim 5\n0 0 0 1 0\n");
    let o = freearr(&["restrict", "D.txt", "--flat", "x4.txt"], p);
    assert_eq!(stdout(&o), std::fs::read_to_string(p.join("r.txt")).unwrap());

    let o = freearr(&["delete", "D.txt", "--hyperplane", "0,0,0,-1,0"], p);
    assert_eq!(stdout(&o).lines().count(), 21);
    let o = freearr(&["delete", "D.txt", "--hyperplane", "1,1,1,1,1"], p);
    assert_eq!(o.status.code(), Some(1));

    let o = freearr(&["--json", "localize", "D.txt", "--flat", "20,21"], p);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 5);

    write(p, "line.txt", "dim 1\n1\n");
    let o = freearr(&["product", "Dpp.txt", "line.txt"], p);
    assert_eq!(stdout(&o).lines().next(), Some("dim 5"));
    assert_eq!(stdout(&o).lines().count(), 18);
}

#[test]
fn is_free_and_certificate_replay() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    catalog_file(p, "Dpp");
    let o = freearr(&["is-free", "Dpp.txt", "--out", "cert.json"], p);
    assert!(stdout(&o).starts_with("free, exponents {1, 5, 5, 5}"));
    let o = freearr(&["verify-cert", "Dpp.txt", "cert.json"], p);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // The same certificate does not fit a different arrangement.
    catalog_file(p, "D");
    let o = freearr(&["verify-cert", "D.txt", "cert.json"], p);
    assert_ne!(o.status.code(), Some(0));

    catalog_file(p, "ex4.1");
    let o = freearr(&["--json", "is-free", "ex4.1.txt"], p);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "not_free");
}

#[test]
fn classify_and_replay_class_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    catalog_file(p, "D");
    for class in ["af", "sf"] {
        let out = format!("{class}.json");
        let o = freearr(&["classify", "D.txt", "--class", class, "--out", &out], p);
        assert!(stdout(&o).contains("member"), "{}", stdout(&o));
        let o = freearr(&["verify-cert", "D.txt", &out], p);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let o = freearr(&["--json", "classify", "D.txt", "--class", "if"], p);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "non_member");

    let o = Command::new(env!("CARGO_BIN_EXE_freearr"))
        .args(["classify", "D.txt", "--class", "df"])
        .current_dir(p)
        .env("FREEARR_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("undecided"));
}

#[test]
fn induction_table_text_is_accepted_by_verify_cert() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    catalog_file(p, "C");
    write(p, "table.txt", freearr::catalog::TABLE_C_TXT);
    let o = freearr(&["verify-cert", "C.txt", "table.txt"], p);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut rows: Vec<&str> = freearr::catalog::TABLE_C_TXT.lines().collect();
    rows.swap(3, 4);
    write(p, "tampered.txt", &(rows.join("\n") + "\n"));
    let o = freearr(&["verify-cert", "C.txt", "tampered.txt"], p);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("rejected"));
}

#[test]
fn verify_paper_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = freearr(&["verify-paper", "--only", "ex4.1"], p);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 6);
    let o = freearr(&["--json", "verify-paper", "--only", "B-not-IF", "--budget", "0"], p);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["verdict"], "undecided");
    assert_eq!(v[0]["id"], "B-not-IF");
}

#[test]
fn verify_paper_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |o: &Output| -> Vec<serde_json::Value> {
        let mut v: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
        for r in &mut v {
            r.as_object_mut().unwrap().remove("runtime_ms");
        }
        v
    };
    let a = freearr(&["--json", "verify-paper", "--only", "D"], dir.path());
    let b = Command::new(env!("CARGO_BIN_EXE_freearr"))
        .args(["--json", "verify-paper", "--only", "D"])
        .env("RAYON_NUM_THREADS", "3")
        .env_remove("FREEARR_BUDGET")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(&a), strip(&b));
}
