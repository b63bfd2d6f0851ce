use binocoll::cli::{dispatch, EXIT_FAILS, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(std::iter::once("binocoll").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn search_writes_seven_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let (code, _, _) = cli(&["--format", "jsonl", "search", "--max-value", "25000", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["command"], "search");
    assert_eq!(lines[0]["version"], env!("CARGO_PKG_VERSION"));
    let values: Vec<u64> = lines[1..].iter().map(|r| r["N"].as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(values, [120, 210, 1540, 3003, 7140, 11628, 24310]);
}

#[test]
fn sum_threshold_prints_crossover() {
    let (code, out, _) = cli(&["lemma", "threshold32"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["f_star"], 871155);
}

#[test]
fn flag_typo_is_a_usage_error() {
    let (code, out, err) = cli(&["search", "--max-valu", "100"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let (code, _, err) = cli(&["search", "--max-value", "100", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(!err.is_empty());
}

#[test]
fn text_lemma_report_shows_sides_and_verdict() {
    let (code, out, _) = cli(&["--format", "text", "lemma", "check21", "--delta", "1", "--n", "51", "--m", "11", "--k", "12", "--l", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("# binocoll "));
    for key in ["lhs: [", "rhs: [", "verdict: HOLDS"] {
        assert!(out.contains(key), "missing {key:?} in\n{out}");
    }
}

#[test]
fn certify_failures_exit_one() {
    let (code, out, _) = cli(&["certify", "--qmax", "100000", "--gap-min", "40"]);
    assert_eq!(code, EXIT_FAILS);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(!v["result"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn certify_echoes_configuration() {
    let (code, out, err) = cli(&["certify", "--qmax", "1000000"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["qmax"], 1000000);
    assert_eq!(v["config"]["windows"], "152-156,303-308");
    let echo = &v["result"]["config"];
    assert_eq!(echo["q_max"], 1000000);
    assert_eq!(echo["gap_min"], 158);
    assert_eq!(echo["windows"], serde_json::json!([[152, 156], [303, 308]]));
    assert_eq!(v["result"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["result"]["certified"], true);
    assert!(err.starts_with("# threads="), "{err}");
}

#[test]
fn certify_resume_matches_uninterrupted_output() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let cp = cp.to_str().unwrap();
    let base = ["certify", "--qmax", "20000000", "--segment-size", "16384"];
    let (code, _, _) = cli(&[&base[..], &["--checkpoint", cp, "--stop-after", "20"]].concat());
    assert_eq!(code, EXIT_OK);
    let (code, resumed, _) = cli(&[&base[..], &["--checkpoint", cp]].concat());
    assert_eq!(code, EXIT_OK);
    let (_, fresh, _) = cli(&base);
    assert_eq!(resumed, fresh);
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.conf");
    std::fs::write(&good, "qmax = 100000\ngap-min = 500\n").unwrap();
    let (code, out, _) = cli(&["--config", good.to_str().unwrap(), "certify"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["gap_min"], 500);
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(cli(&["--config", bad.to_str().unwrap(), "certify"]).0, EXIT_USAGE);
}

#[test]
fn jsonl_has_header_then_one_line_per_item() {
    let (code, out, _) = cli(&["--format", "jsonl", "sieve", "gaps", "--hi", "2000000", "--min-gap", "100"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["command"], "sieve gaps");
    let gaps: Vec<(u64, u64)> = lines[1..].iter().map(|r| (r["p"].as_u64().unwrap(), r["gap"].as_u64().unwrap())).collect();
    // gaps of at least 100 below 2e6
    assert_eq!(gaps.first(), Some(&(370261, 112)));
    assert!(gaps.iter().all(|&(_, g)| g >= 100));
}
