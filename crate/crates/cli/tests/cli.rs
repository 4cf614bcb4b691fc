use std::fs;
use std::path::PathBuf;
use std::process::Command;

use indexmap::IndexMap;
use sbt_core::ts::{enumerate, GraphDump, Limits};
use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", &format!("{name}.sbt")]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

/// Exit code, stdout and stderr of an in-process run.
fn sbt(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = sbt_cli::run(std::iter::once("sbt").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn records(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn check_accepts_the_corpus() {
    for name in ["grid", "counter", "patrol", "quorum", "resume", "single_check"] {
        let (code, out, _) = sbt(&["check", &corpus(name)]);
        assert_eq!(code, 0, "{name}");
        assert!(out.ends_with(": ok\n"));
    }
}

#[test]
fn check_reports_one_positioned_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sbt");
    fs::write(&path, "tree t {\n    blackboard { x: int[0..3] = 0; }\n    root: check c { x + 1 }\n}\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, out, err) = sbt(&["check", p]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].starts_with(&format!("{p}:3:")), "{err}");
    assert!(lines[0].contains(": error: "), "{err}");
}

#[test]
fn check_missing_file() {
    let (code, _, err) = sbt(&["check", "/nonexistent/x.sbt"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"), "{err}");
}

#[test]
fn engines_give_identical_traces() {
    for name in ["grid", "counter", "patrol", "quorum", "resume"] {
        for seed in ["0", "7", "123456789"] {
            let big = sbt(&["simulate", &corpus(name), "--seed", seed, "--ticks", "25"]);
            let small = sbt(&["simulate", &corpus(name), "--seed", seed, "--ticks", "25", "--engine", "small"]);
            assert_eq!(big.0, 0);
            assert_eq!(big, small, "{name} seed {seed}");
        }
    }
    let (_, out, _) = sbt(&["simulate", &corpus("grid"), "--seed", "7", "--ticks", "5"]);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn trace_records_are_well_formed() {
    let (_, out, _) = sbt(&["simulate", &corpus("patrol"), "--seed", "3", "--ticks", "30"]);
    for line in out.lines() {
        // parse preserving key order
        let r: IndexMap<String, Value> = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = r.keys().map(String::as_str).collect();
        assert_eq!(keys, ["tick", "env", "blackboard", "statuses", "root"]);
    }
    let rs = records(&out);
    for (i, r) in rs.iter().enumerate() {
        assert_eq!(r["tick"], i as u64 + 1);
        assert_eq!(r["root"], r["statuses"]["__root"]);
    }
    // the first key of each map is the first declared name
    assert!(out.starts_with(r#"{"tick":1,"env":{"battery":"#));
}

#[test]
fn frozen_goals_stay_put() {
    let (_, out, _) = sbt(&["simulate", &corpus("grid"), "--seed", "99", "--ticks", "20"]);
    let rs = records(&out);
    for r in &rs {
        assert_eq!(r["env"], rs[0]["env"]);
    }
    // the robot arrives within 8 ticks and then stays
    assert_eq!(rs[19]["root"], "success");
    assert_eq!(rs[19]["blackboard"]["x"], rs[19]["env"]["x_g"]);
}

#[test]
fn zero_ticks_is_a_usage_error() {
    assert_eq!(sbt(&["simulate", &corpus("grid"), "--ticks", "0"]).0, 2);
    assert_eq!(sbt(&["simulate"]).0, 2);
    assert_eq!(sbt(&["frobnicate"]).0, 2);
}

#[test]
fn enumerate_prints_counts_and_honours_limits() {
    let (code, out, _) = sbt(&["enumerate", &corpus("single_check")]);
    assert_eq!((code, out.as_str()), (0, "states=2 edges=2\n"));
    let (code, _, err) = sbt(&["enumerate", &corpus("single_check"), "--max-states", "1"]);
    assert_eq!(code, 3);
    assert!(err.contains("state limit"), "{err}");
    let (code, out, _) = sbt(&["enumerate", &corpus("grid")]);
    assert_eq!((code, out.as_str()), (0, "states=150 edges=150\n"));
}

#[test]
fn dump_reads_back_as_the_same_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let (code, _, _) = sbt(&["enumerate", &corpus("resume"), "--dump", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&path).unwrap();
    let dump = GraphDump::parse(&text).unwrap();
    let m = sbt_core::dsl::compile(&fs::read_to_string(corpus("resume")).unwrap()).unwrap().model;
    let ts = enumerate(&m, Limits::default()).unwrap();
    assert_eq!(dump.states, ts.states().len());
    assert_eq!(dump.initials, ts.initials().len());
    let mut edges = Vec::new();
    for s in 0..ts.states().len() {
        edges.extend(ts.edges(s).iter().map(|&t| (s, t)));
    }
    assert_eq!(dump.edges, edges);
    assert_eq!(text, ts.dump());
}

#[test]
fn max_states_defaults_from_the_environment() {
    let run = |limit: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sbt"));
        cmd.args(["enumerate", &corpus("grid")]);
        match limit {
            Some(l) => cmd.env("SBT_MAX_STATES", l),
            None => cmd.env_remove("SBT_MAX_STATES"),
        };
        cmd.output().unwrap()
    };
    assert_eq!(run(None).status.code(), Some(0));
    assert_eq!(run(Some("10")).status.code(), Some(3));
    assert_eq!(run(Some("150")).status.code(), Some(0));
    let out = run(Some("10"));
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_grid_holds() {
    let (code, out, _) = sbt(&["verify", &corpus("grid")]);
    assert_eq!((code, out.as_str()), (0, "spec reach_goal: HOLDS\n"));
}

#[test]
fn verify_prints_a_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid_fail.sbt");
    let src = fs::read_to_string(corpus("grid")).unwrap().replace(
        "spec reach_goal",
        "spec never_fails: G (status(__root) == failure);\n    spec reach_goal",
    );
    fs::write(&path, src).unwrap();
    let (code, out, _) = sbt(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "spec never_fails: VIOLATED");
    // the configuration before the first tick already violates it
    assert!(lines[1].starts_with("stem: "));
    let first: Value = serde_json::from_str(&lines[1]["stem: ".len()..]).unwrap();
    assert_eq!((first["tick"].as_u64(), first["root"].as_str()), (Some(0), Some("invalid")));
    assert!(lines[2].starts_with("loop: "));
    assert_eq!(*lines.last().unwrap(), "spec reach_goal: HOLDS");

    let (code, out, _) = sbt(&["verify", path.to_str().unwrap(), "--spec", "reach_goal"]);
    assert_eq!((code, out.as_str()), (0, "spec reach_goal: HOLDS\n"));
}

#[test]
fn verify_rejects_unknown_specs() {
    let (code, out, err) = sbt(&["verify", &corpus("grid"), "--spec", "nope"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("unknown spec `nope`"));
}

#[test]
fn verify_counterexamples_replay() {
    // every loop record must be reachable from the previous one
    let (code, out, _) = sbt(&["verify", &corpus("quorum"), "--spec", "not_always_success"]);
    assert_eq!(code, 1);
    let stem = out.lines().filter(|l| l.starts_with("stem: ")).count();
    let cycle = out.lines().filter(|l| l.starts_with("loop: ")).count();
    assert!(stem >= 1 && cycle >= 1);
}

#[test]
fn emit_matches_the_golden_file() {
    let golden: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "golden", "grid.full_opt.smv"]
        .iter()
        .collect();
    let (code, out, _) = sbt(&["emit", &corpus("grid"), "--level", "full_opt"]);
    assert_eq!(code, 0);
    assert_eq!(out, fs::read_to_string(golden).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.full_opt.smv");
    let (code, out, _) = sbt(&["emit", &corpus("grid"), "-o", path.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, ""));
    assert!(fs::read_to_string(path).unwrap().contains("MODULE main"));
}

#[test]
fn every_level_survives_the_cross_check() {
    for name in ["grid", "patrol", "counter"] {
        for level in ["no_opt", "first_opt", "last_opt", "full_opt"] {
            let (code, _, err) = sbt(&["emit", &corpus(name), "--level", level, "--cross-check"]);
            assert_eq!(code, 0, "{name} {level}: {err}");
            assert!(err.contains(&format!("cross-check {level}: ok")), "{err}");
        }
    }
}

#[test]
fn unknown_level_is_a_usage_error() {
    let (code, _, err) = sbt(&["emit", &corpus("grid"), "--level", "max_opt"]);
    assert_eq!(code, 2);
    assert!(err.contains("max_opt"));
}

#[test]
fn reports_are_reproducible_unless_timed() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let r = report.to_str().unwrap();
    sbt(&["verify", &corpus("quorum"), "--report", r]);
    let a = fs::read_to_string(&report).unwrap();
    sbt(&["verify", &corpus("quorum"), "--report", r]);
    assert_eq!(a, fs::read_to_string(&report).unwrap());
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["command"], "verify");
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["outcome"]["specs"][2]["verdict"], "VIOLATED");
    assert!(v.get("wall_time").is_none());

    sbt(&["enumerate", &corpus("grid"), "--report", r, "--timing"]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["wall_time"].is_u64());
    assert_eq!(v["outcome"]["states"], 150);

    sbt(&["check", "/nonexistent.sbt", "--report", r]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["exit_code"], 2);
    assert!(v["outcome"]["error"].as_str().unwrap().contains("cannot read"));
}

#[test]
fn binary_exit_codes() {
    let code = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_sbt")).args(args).output().unwrap().status.code();
    assert_eq!(code(&["check", &corpus("grid")]), Some(0));
    assert_eq!(code(&["verify", &corpus("quorum")]), Some(1));
    assert_eq!(code(&["check", "/nonexistent.sbt"]), Some(2));
    assert_eq!(code(&["enumerate", &corpus("grid"), "--max-states", "3"]), Some(3));
    assert_eq!(code(&["--help"]), Some(0));
}
