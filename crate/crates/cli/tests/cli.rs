use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_diffmod"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_reports_square_zero() {
    let out = run(&["check", &fixture("example-normal.json"), "--summary"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out).contains("square-zero: yes"));

    let out = run(&["check", &fixture("not-square-zero.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["square_zero"], Value::Bool(false));
}

#[test]
fn malformed_json_gives_byte_offset() {
    let out = run(&["check", &fixture("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("at byte 34"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // graded input without a cutoff
    assert_eq!(
        run(&["homology", &fixture("notaflag.json")]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["koszul", "--ring", "Q[x]"]).status.code(), Some(2));
    assert_eq!(
        run(&["koszul", "--ring", "Q[x]", "--vars", "t"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn homology_of_notaflag() {
    let out = run(&["homology", &fixture("notaflag.json"), "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let hilbert = v["hilbert"].as_object().expect("hilbert table");
    let nonzero: Vec<(&String, &Value)> = hilbert
        .iter()
        .filter(|(_, n)| n.as_u64() != Some(0))
        .collect();
    assert_eq!(nonzero, vec![(&"1".to_string(), &Value::from(1))]);
    assert_eq!(v["annihilator_verified"], serde_json::json!(["x", "y"]));

    let out = run(&[
        "homology",
        &fixture("notaflag.json"),
        "--cutoff",
        "8",
        "--annihilator",
        "x+1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn koszul_pipes_into_verify() {
    let k = run(&["koszul", "--vars", "x,y", "--ring", "Q[x,y]"]);
    assert_eq!(k.status.code(), Some(0));
    let module = json_of(&k);
    assert_eq!(module["rows"], 4);
    // emitted modules parse back to the same value
    let d = diffmod::json::module_from_json(&module).unwrap();
    assert_eq!(
        diffmod::json::module_to_json(&d)["entries"],
        module["entries"]
    );

    let out = run_stdin(&["verify", "--class"], &k.stdout);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    let report = &v["reports"][0];
    assert_eq!(report["quantities"]["l"], 2);
    assert_eq!(report["quantities"]["d"], 2);
    assert_eq!(report["checks"][0]["status"], "holds");
}

#[test]
fn koszul_on_three_variables() {
    let k = run(&["koszul", "--vars", "x,y,z", "--ring", "Q[x,y,z]"]);
    assert_eq!(json_of(&k)["rows"], 8);
    let out = run_stdin(&["homology", "--summary"], &k.stdout);
    assert_eq!(out.status.code(), Some(0));
    let v = run_stdin(&["homology"], &k.stdout);
    let total: u64 = json_of(&v)["hilbert"]
        .as_object()
        .unwrap()
        .values()
        .map(|n| n.as_u64().unwrap())
        .sum();
    assert_eq!(total, 1);
}

#[test]
fn verify_classifies_notaflag() {
    let out = run(&["verify", &fixture("notaflag.json"), "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let reports = v["reports"].as_array().unwrap();
    let rank = reports
        .iter()
        .find(|r| r["instance"] == "rank inequality")
        .unwrap();
    assert_eq!(rank["checks"][0]["status"], "out-of-hypothesis");
    let formulas = reports
        .iter()
        .find(|r| r["instance"] == "rank formulas")
        .unwrap();
    assert_eq!(formulas["quantities"]["rank_H"], 0);
    assert_eq!(formulas["quantities"]["rank_delta"], 1);
}

#[test]
fn contractibility_and_standard_form() {
    let out = run(&[
        "contractible",
        &fixture("example-normal-local.json"),
        "--cutoff",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["contractible"], false);
    assert_eq!(v["residue_rank"], 0);

    let out = run(&["standard-form", &fixture("dold2.json")]);
    assert_eq!(json_of(&out)["verdict"], "no");
    // non-local graded rings are not decided
    let out = run(&[
        "standard-form",
        &fixture("example-normal.json"),
        "--cutoff",
        "4",
    ]);
    assert_eq!(json_of(&out)["verdict"], "unknown");
}

#[test]
fn flag_and_spectral() {
    let out = run(&["flag", &fixture("section-two.json")]);
    let v = json_of(&out);
    assert_eq!(v["class_upper_bound"], 2);
    assert_eq!(v["fold_ranks"], serde_json::json!([1, 2, 1]));

    let out = run(&["flag", &fixture("notaflag.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["flag"], Value::Null);

    let out = run(&["spectral", &fixture("section-two.json"), "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["convergence"]["holds"], true);
    assert_eq!(v["pages"].as_array().unwrap().len(), 3);

    let out = run(&["spectral", &fixture("notaflag.json"), "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn complexes_cones_and_tensors() {
    let out = run(&["compress", &fixture("complex-x.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_of(&out)["entries"],
        serde_json::json!([["0", "x"], ["0", "0"]])
    );

    let out = run(&[
        "tensor",
        &fixture("complex-x.json"),
        &fixture("cone-x.json"),
    ]);
    assert_eq!(json_of(&out)["rows"], 4);

    let cone = |map: &str| {
        run(&[
            "cone",
            "--map",
            &fixture(map),
            &fixture("cone-x.json"),
            &fixture("cone-x.json"),
        ])
    };
    let out = cone("phi.json");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["rows"], 4);
    assert_eq!(cone("wrong-map.json").status.code(), Some(1));
}

#[test]
fn rank_and_factor() {
    let out = run(&["rank", &fixture("rank1.json")]);
    assert_eq!(json_of(&out)["rank"], 1);
    let out = run(&["factor", &fixture("rank1.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["column"], serde_json::json!([["2"], ["3"]]));
    assert_eq!(v["row"], serde_json::json!([["1", "2"]]));
    assert_eq!(v["product_matches"], true);

    let out = run(&["factor", &fixture("notaflag.json")]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "Q[x,y] is not a supported factorization backend"
    );
}

#[test]
fn search_ledger() {
    let out = run(&[
        "search",
        "--ring",
        "F2[x,y]",
        "--max-size",
        "4",
        "--jobs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["min_rank"], 4);
    assert_eq!(v["d"], 2);
    for key in ["ring", "witnesses", "instances_scanned", "cutoff"] {
        assert!(v.get(key).is_some(), "ledger lacks {key}");
    }

    let sampled = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_diffmod"))
            .args([
                "search",
                "--ring",
                "F2[x,y]",
                "--max-size",
                "4",
                "--sample",
                "30",
            ])
            .env("DIFFMOD_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(sampled("5").stdout, sampled("5").stdout);
}

#[test]
fn out_writes_sorted_json() {
    let dir = std::env::temp_dir().join(format!("diffmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rank.json");
    let out = run(&[
        "rank",
        &fixture("rank1.json"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let keys: Vec<&str> = written
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    std::fs::remove_dir_all(&dir).ok();
}
