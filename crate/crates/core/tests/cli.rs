use std::path::Path;
use std::process::{Command, Output};

use edge_mta::harness::sweep::{SWEEP_HEADER, TRACE_HEADER};
use edge_mta::parse_instance;

fn edge_mta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edge-mta"))
        .args(args)
        .env_remove("EDGE_MTA_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_then_solve_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.json");
    let inst = inst_path.to_str().unwrap();
    let o = edge_mta(&["gen", "--seed", "3", "--servers", "4", "--tasks", "8", "--out", inst]);
    assert!(o.status.success(), "{}", stderr(&o));
    let parsed = parse_instance(&std::fs::read_to_string(&inst_path).unwrap()).unwrap();
    assert_eq!((parsed.num_servers(), parsed.num_tasks()), (4, 8));

    let o = edge_mta(&["solve", "--solver", "greedy", "--instance", inst]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("total_reward: "), "{out}");
    assert!(out.contains("assigned: "), "{out}");
}

#[test]
fn gen_to_stdout_is_reproducible() {
    let a = edge_mta(&["gen", "--seed", "9"]);
    let b = edge_mta(&["gen", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let inst = parse_instance(&stdout(&a)).unwrap();
    assert_eq!((inst.num_servers(), inst.num_tasks()), (20, 50));
}

#[test]
fn solve_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = edge_mta(&[
        "solve",
        "--seed",
        "1",
        "--episodes",
        "25",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRACE_HEADER);
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn oracle_refuses_full_size_instance() {
    let o = edge_mta(&["oracle", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("budget"), "{}", stderr(&o));
}

#[test]
fn oracle_solves_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "num_servers = 2\nnum_tasks = 4\n");
    let o = edge_mta(&["oracle", "--seed", "5", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("optimum: "));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(edge_mta(&["solve", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(edge_mta(&["solve", "--solver", "magic"]).status.code(), Some(2));
    assert_eq!(edge_mta(&[]).status.code(), Some(2));
}

#[test]
fn invalid_instance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"lambda\": 0.1,\n \"delta\": oops}").unwrap();
    let o = edge_mta(&["solve", "--instance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn sweep_csv_is_stable_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "episodes = 20\nnum_servers = 3\nnum_tasks = 6\naxis = \"price_scale\"\nvalues = [0, 50, 100]\nseeds = [1, 2]\n",
    );
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = edge_mta(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a.lines().next().unwrap(), SWEEP_HEADER);
    assert_eq!(a.lines().count(), 1 + 3 * 2 * 3);
    // Everything but the wall clock column is reproducible.
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn round_appends_to_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.jsonl");
    let cfg = write_config(dir.path(), "num_servers = 3\nnum_tasks = 5\nepisodes = 20\n");
    for expected in ["round: 0", "round: 1"] {
        let o = edge_mta(&[
            "round",
            "--config",
            &cfg,
            "--solver",
            "greedy",
            "--out",
            ledger.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).starts_with(expected), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read_to_string(&ledger).unwrap().lines().count(), 2);
}

#[test]
fn seed_flag_beats_environment() {
    let with_env = |env: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_edge-mta"))
            .args(args)
            .env("EDGE_MTA_SEED", env)
            .output()
            .unwrap()
            .stdout
    };
    let from_env = with_env("4", &["gen"]);
    let from_flag = with_env("999", &["gen", "--seed", "4"]);
    assert_eq!(from_env, from_flag);
    assert_ne!(from_env, edge_mta(&["gen"]).stdout);
}

#[test]
fn in_process_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = edge_mta::cli::run(["edge-mta", "gen", "--seed", "2", "--servers", "1", "--tasks", "1"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(parse_instance(std::str::from_utf8(&out).unwrap()).is_ok());
}
