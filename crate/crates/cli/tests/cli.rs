use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn listcolor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listcolor"))
        .current_dir(dir)
        .env_remove("LISTCOLOR_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const C6: &[&str] = &["--gen", "cycle:6", "--uniform-q", "2", "--palette", "2", "--L", "1", "--seed", "1"];

fn color_c6(dir: &Path, out: &str, extra: &[&str]) -> Output {
    let mut args = vec!["color"];
    args.extend_from_slice(C6);
    args.extend_from_slice(&["-o", out]);
    args.extend_from_slice(extra);
    listcolor(dir, &args)
}

#[test]
fn color_then_verify() {
    let dir = TempDir::new().unwrap();
    let o = color_c6(dir.path(), "out.json", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("seed = 1"));
    let v = listcolor(dir.path(), &["verify", "out.json"]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
    assert!(String::from_utf8_lossy(&v.stdout).contains("ok"));

    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    let meta = &json["meta"];
    assert_eq!(meta["seed"], 1);
    assert_eq!(meta["version"], format!("v{}", env!("CARGO_PKG_VERSION")));
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert!(meta["stats"]["executions"].is_u64());
}

#[test]
fn verify_reports_monochromatic_edge() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("g.txt"), "0 1\n1 2\n").unwrap();
    std::fs::write(dir.path().join("lists.json"), r#"{"0": ["a", "b"], "1": ["a", "b"], "2": ["a", "b"]}"#).unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"0": "a", "1": "b", "2": "b"}"#).unwrap();
    std::fs::write(dir.path().join("good.json"), r#"{"0": "a", "1": "b", "2": "a"}"#).unwrap();
    let base = ["--graph", "g.txt", "--lists", "lists.json", "--L", "1", "--q", "2"];

    let mut args = vec!["verify", "bad.json"];
    args.extend_from_slice(&base);
    let o = listcolor(dir.path(), &args);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("(1, 2)"), "{out}");

    args[1] = "good.json";
    assert_eq!(code(&listcolor(dir.path(), &args)), 0);
}

#[test]
fn partial_verification_accepts_blank() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("g.txt"), "0 1\n1 2\n").unwrap();
    std::fs::write(dir.path().join("p.json"), r#"{"0": 0, "1": null, "2": 1}"#).unwrap();
    let base = ["--graph", "g.txt", "--uniform-q", "2", "--L", "1"];
    let mut args = vec!["verify", "p.json"];
    args.extend_from_slice(&base);
    assert_eq!(code(&listcolor(dir.path(), &args)), 1);
    args.push("--partial");
    assert_eq!(code(&listcolor(dir.path(), &args)), 0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&listcolor(dir.path(), &["color", "--no-such-flag"])), 2);
    assert_eq!(code(&listcolor(dir.path(), &["color"])), 2);
    assert_eq!(code(&listcolor(dir.path(), &["verify", "missing.json", "--gen", "cycle:5"])), 2);
    // A triangle under the triangle-free variant.
    let o = listcolor(dir.path(), &["color", "--gen", "complete:3", "--uniform-q", "3", "--L", "1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn execution_cap_exits_three() {
    let dir = TempDir::new().unwrap();
    // Two colours on an odd cycle: the flaws can never all be repaired properly.
    let o = listcolor(
        dir.path(),
        &[
            "color", "--gen", "cycle:7", "--uniform-q", "2", "--L", "2", "--cap", "5", "--retries", "0",
        ],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let extra = ["--gen", "regular-bipartite:40,6", "--uniform-q", "12", "--L", "3", "--seed", "9"];
    for name in ["a.json", "b.json"] {
        let mut args = vec!["color"];
        args.extend_from_slice(&extra);
        args.extend_from_slice(&["-o", name, "--transcript"]);
        let t = format!("{name}.jsonl");
        args.push(&t);
        let o = listcolor(dir.path(), &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.json.jsonl"), read("b.json.jsonl"));
}

#[test]
fn config_replay_matches() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&color_c6(dir.path(), "first.json", &[])), 0);
    let o = listcolor(dir.path(), &["color", "--config", "first.json", "-o", "second.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("first.json"), read("second.json"));
}

#[test]
fn out_dir_env_is_honoured() {
    let dir = TempDir::new().unwrap();
    let out = TempDir::new().unwrap();
    let mut args = vec!["color"];
    args.extend_from_slice(C6);
    args.extend_from_slice(&["-o", "x.json"]);
    let o = Command::new(env!("CARGO_BIN_EXE_listcolor"))
        .current_dir(dir.path())
        .env("LISTCOLOR_OUT_DIR", out.path())
        .args(&args)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.path().join("x.json").exists());
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn reconstruct_recovers_every_state() {
    let dir = TempDir::new().unwrap();
    let o = listcolor(
        dir.path(),
        &[
            "color",
            "--gen",
            "regular-bipartite:30,5",
            "--uniform-q",
            "8",
            "--L",
            "3",
            "--seed",
            "4",
            "-o",
            "out.json",
            "--transcript",
            "t.jsonl",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = listcolor(
        dir.path(),
        &["reconstruct", "--transcript", "t.jsonl", "--final", "out.json", "--states", "s.jsonl"],
    );
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    let steps = json["meta"]["stats"]["executions"].as_u64().unwrap();
    let states = std::fs::read_to_string(dir.path().join("s.jsonl")).unwrap();
    assert_eq!(states.lines().count() as u64, steps);

    // A transcript that disagrees with the final colouring must be rejected.
    let text = std::fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
    if steps > 0 {
        let tampered: String = text
            .lines()
            .filter(|l| !l.contains("\"return\"") && !l.contains("\"Return\""))
            .map(|l| format!("{l}\n"))
            .collect();
        std::fs::write(dir.path().join("bad.jsonl"), tampered).unwrap();
        let r = listcolor(dir.path(), &["reconstruct", "--transcript", "bad.jsonl", "--final", "out.json"]);
        assert_ne!(code(&r), 0);
    }
}

#[test]
fn gen_round_trips_through_color() {
    let dir = TempDir::new().unwrap();
    for (fmt, file) in [("dimacs", "g.col"), ("edgelist", "g.txt")] {
        let o = listcolor(
            dir.path(),
            &["gen", "--gen", "bipartite:20,20,0.2", "--seed", "3", "--format", fmt, "-o", file],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let a = listcolor(dir.path(), &["flaws", "--graph", "g.col", "--uniform-q", "3", "--L", "2"]);
    let b = listcolor(dir.path(), &["flaws", "--graph", "g.txt", "--uniform-q", "3", "--L", "2"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let all_blank = String::from_utf8_lossy(&a.stdout);
    assert!(all_blank.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()));
}

#[test]
fn complete_methods() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("g.txt"), "0 1\n1 2\n2 3\n").unwrap();
    std::fs::write(dir.path().join("p.json"), r#"{"0": 0, "1": null, "2": null, "3": 1}"#).unwrap();
    for method in ["mt", "greedy"] {
        let out = format!("{method}.json");
        let o = listcolor(
            dir.path(),
            &[
                "complete", "p.json", "--graph", "g.txt", "--uniform-q", "40", "--L", "12", "--method", method, "-o",
                &out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v = listcolor(dir.path(), &["verify", &out, "--graph", "g.txt", "--uniform-q", "40", "--L", "12"]);
        assert_eq!(code(&v), 0, "{}", stderr(&v));
    }
}

#[test]
fn lab_smoke() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["lab", "shearer", "--max-n", "4", "--csv", "s.csv", "--summary", "s.json"],
        vec!["lab", "negcorr", "--fixtures", "5", "--csv", "n.csv", "--summary", "n.json"],
        vec!["lab", "lncv", "--fixtures", "2", "--degree", "10", "--q", "8", "--trials", "2000", "--csv", "l.csv"],
        vec!["lab", "flawprob", "--fixtures", "2", "--trials", "2000", "--csv", "f.csv"],
    ] {
        let o = listcolor(dir.path(), &args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("n.json")).unwrap()).unwrap();
    assert_eq!(summary["urn"]["pr_all_zero"], "1/6");
    assert_eq!(summary["urn"]["pr_zero_product"], "1/8");
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("n,r,"));
}

#[test]
fn bench_sweeps_q() {
    let dir = TempDir::new().unwrap();
    let o = listcolor(
        dir.path(),
        &[
            "bench", "--gen", "cycle:8", "--uniform-q", "2", "--L", "1", "--q-from", "2", "--q-to", "4", "--runs", "3",
            "--linear",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().count(), 4, "{out}");
}

#[test]
fn bench_binary_search_finds_threshold() {
    let dir = TempDir::new().unwrap();
    let o = listcolor(
        dir.path(),
        &[
            "bench", "--gen", "regular-bipartite:40,6", "--L", "1.5", "--uniform-q", "2", "--q-from", "2", "--q-to",
            "30", "--runs", "2", "--target", "0",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    // log2(29) bisection steps plus the upper end, not all 29 values.
    assert!(out.lines().count() <= 8, "{out}");
    let err = stderr(&o);
    let summary: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    let q = summary["smallest_q_meeting_target"].as_u64().expect("threshold found");
    let row = out.lines().find(|l| l.starts_with(&format!("{q},"))).unwrap();
    assert!(row.starts_with(&format!("{q},2,2,")), "{row}");
}
