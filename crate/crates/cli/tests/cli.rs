use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-zeta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-zeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn read_json(path: &PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn census_q3_matches_orbit_formulas() {
    let out = run(&["orbit-census", "--q", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["count 128, formula 128", "count 1536, formula 1536", "count 3456, formula 3456", "count 864, formula 864"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn small_identity_suite_passes_and_mutation_fails() {
    let ok = run(&["verify-identities", "--q", "3", "--order", "5"]);
    assert!(ok.status.success());
    let bad = run(&["verify-identities", "--q", "3", "--order", "5", "--inject-mutation", "perturb-t0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL  strata sum equals T0 summary [split q=3]"));
    let bad = run(&["verify-identities", "--q", "3", "--order", "5", "--inject-mutation", "perturb-f2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL  double-sum lemma exact"));
}

#[test]
fn local_zeta_emits() {
    let out = run(&["local-zeta", "--p", "3", "--class", "ramified", "--lambda", "0", "--emit", "eval", "--s", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("96/1183"));
    let out = run(&["local-zeta", "--p", "5", "--class", "split", "--lambda", "q+1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS  1 + R q t^2 = (1 - q t^2)(1 - t^2)"));
    let out = run(&["local-zeta", "--p", "3", "--class", "inert", "--emit", "eval", "--lambda", "0", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["local-zeta", "--p", "3", "--class", "hyperbolic"]);
    assert!(!out.status.success());
}

#[test]
fn oracle_and_sym_volume() {
    let out = run(&["oracle", "--p", "3", "--class", "inert", "--lambda", "0", "--s", "2", "--depth", "2"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["sym-volume", "--p", "3", "--N", "4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("12/12 items passed"));
}

#[test]
fn euler_reports_per_field_records() {
    let hecke: String = std::iter::once("p,lambda".to_string())
        .chain([2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29].iter().map(|p| format!("{p},1")))
        .collect::<Vec<_>>()
        .join("\n");
    let hecke = scratch("hecke.csv", &hecke);
    let fields = scratch("fields.txt", "-4\n5\n-7\n");
    let json = scratch("euler.json", "");
    let args = |cutoff: &str| {
        vec![
            "--json".to_string(),
            json.display().to_string(),
            "euler".to_string(),
            "--hecke".to_string(),
            hecke.display().to_string(),
            "--fields".to_string(),
            fields.display().to_string(),
            "--s".to_string(),
            "1.5".to_string(),
            "--cutoff".to_string(),
            cutoff.to_string(),
        ]
    };
    let a: Vec<String> = args("29");
    let out = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success());
    let report = read_json(&json);
    assert_eq!(report["command"], "euler");
    assert_eq!(report["pass"], true);
    let items = report["items"].as_array().unwrap();
    assert_eq!(items.iter().filter(|i| i["name"].as_str().unwrap().starts_with("E = ")).count(), 3);

    // Deterministic apart from wall_time.
    let mut first = report.clone();
    run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let mut second = read_json(&json);
    first["wall_time"] = 0.into();
    second["wall_time"] = 0.into();
    assert_eq!(first, second);

    let b: Vec<String> = args("31");
    let out = run(&b.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no Hecke eigenvalue for prime 31"));

    let out = run(&["euler", "--fields", &fields.display().to_string(), "--s", "2", "--cutoff", "300", "--onedim"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("one-dimensional factorization [D0=-7]"));
}
