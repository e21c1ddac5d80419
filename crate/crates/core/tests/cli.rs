use std::fs;
use std::path::Path;
use std::process::Command;

use rsim::formats;
use rsim::Strictness;

const EXAMPLE_MODEL: &str = "a b, c, a b\na, b c, d\nd, c, b\n";

fn rsim() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rsim"));
    c.env_remove("RSIM_SEED");
    c
}

fn write_example(dir: &Path) {
    fs::write(dir.join("m.rsys"), EXAMPLE_MODEL).unwrap();
    fs::write(dir.join("c.ctx"), "b d\n.").unwrap();
}

fn simulate(dir: &Path, model: &str, ctx: &str, engine: &str, out: &str) -> i32 {
    rsim()
        .current_dir(dir)
        .args(["simulate", "--model", model, "--context", ctx, "--engine", engine, "--output", out])
        .status()
        .unwrap()
        .code()
        .unwrap()
}

#[test]
fn simulate_example_every_engine() {
    let dir = tempfile::tempdir().unwrap();
    write_example(dir.path());
    for engine in ["direct", "graph", "matrix"] {
        let out = format!("{engine}.traj");
        assert_eq!(simulate(dir.path(), "m.rsys", "c.ctx", engine, &out), 0);
        assert_eq!(fs::read_to_string(dir.path().join(out)).unwrap(), ".\nb\n.\n");
    }
}

#[test]
fn simulate_steps_pads_context() {
    let dir = tempfile::tempdir().unwrap();
    write_example(dir.path());
    let status = rsim()
        .current_dir(dir.path())
        .args(["simulate", "--model", "m.rsys", "--context", "c.ctx", "--output", "o.traj", "--steps", "4"])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(fs::read_to_string(dir.path().join("o.traj")).unwrap(), ".\nb\n.\n.\n.\n");
}

#[test]
fn simulate_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write_example(dir.path());
    assert_eq!(simulate(dir.path(), "missing.rsys", "c.ctx", "direct", "o.traj"), 2);

    fs::write(dir.path().join("bad.rsys"), "a, a, b\n").unwrap();
    let out = rsim()
        .current_dir(dir.path())
        .args(["simulate", "--model", "bad.rsys", "--context", "c.ctx", "--output", "o.traj"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1, column 4"), "{err}");

    fs::write(dir.path().join("z.ctx"), "z\n").unwrap();
    assert_eq!(simulate(dir.path(), "m.rsys", "z.ctx", "direct", "o.traj"), 2);

    let out = rsim().args(["simulate", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
}

#[test]
fn relaxed_inhibitors_flag() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("r.rsys"), "a, , b\nb, , a\n").unwrap();
    fs::write(dir.path().join("c.ctx"), "a\n.\n.\n").unwrap();
    assert_eq!(simulate(dir.path(), "r.rsys", "c.ctx", "direct", "o.traj"), 2);
    let status = rsim()
        .current_dir(dir.path())
        .args(["simulate", "--model", "r.rsys", "--context", "c.ctx", "--output", "o.traj", "--allow-empty-inhibitors"])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(fs::read_to_string(dir.path().join("o.traj")).unwrap(), ".\nb\na\nb\n");
}

#[test]
fn generate_then_simulate_direct_matches_matrix_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = rsim()
        .current_dir(dir.path())
        .args(["generate", "--entities", "60", "--reactions", "80", "--alpha", "0.05", "--ctx-steps", "200", "--seed", "5", "--out-prefix", "g"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "60x80x0.05");

    assert_eq!(simulate(dir.path(), "g.rsys", "g.ctx", "direct", "d.traj"), 0);
    assert_eq!(simulate(dir.path(), "g.rsys", "g.ctx", "matrix", "m.traj"), 0);
    let status = rsim()
        .current_dir(dir.path())
        .args(["simulate", "--model", "g.rsys", "--context", "g.ctx", "--engine", "graph", "--output", "g.traj", "--candidate-csv", "cand.csv"])
        .status()
        .unwrap();
    assert!(status.success());
    let d = fs::read(dir.path().join("d.traj")).unwrap();
    assert_eq!(d, fs::read(dir.path().join("m.traj")).unwrap());
    assert_eq!(d, fs::read(dir.path().join("g.traj")).unwrap());
    let cand = fs::read_to_string(dir.path().join("cand.csv")).unwrap();
    assert_eq!(cand.lines().next(), Some("step,candidates,fired"));
    assert_eq!(cand.lines().count(), 201);
}

#[test]
fn generate_is_deterministic_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    for prefix in ["a", "b"] {
        let status = rsim()
            .current_dir(dir.path())
            .args(["generate", "--entities", "10", "--reactions", "10", "--alpha", "0.1", "--seed", "1", "--out-prefix", prefix])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
    assert_eq!(read("a.rsys"), read("b.rsys"));
    assert_eq!(read("a.ctx"), read("b.ctx"));
    let sys = formats::parse_model(&read("a.rsys"), Strictness::Strict).unwrap();
    assert_eq!(sys.n_entities(), 10);
    assert_eq!(sys.n_reactions(), 10);
    assert_eq!(formats::parse_context(&read("a.ctx"), &sys).unwrap().len(), 1000);
}

#[test]
fn seed_env_var_is_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |prefix: &str, env: Option<&str>, flag: Option<&str>| {
        let mut c = rsim();
        c.current_dir(dir.path())
            .args(["generate", "--entities", "20", "--reactions", "20", "--alpha", "0.1", "--out-prefix", prefix]);
        if let Some(v) = env {
            c.env("RSIM_SEED", v);
        }
        if let Some(v) = flag {
            c.args(["--seed", v]);
        }
        assert!(c.status().unwrap().success());
        fs::read_to_string(dir.path().join(format!("{prefix}.rsys"))).unwrap()
    };
    assert_eq!(gen("env", Some("99"), None), gen("flag", None, Some("99")));
    assert_ne!(gen("env", Some("99"), None), gen("default", None, None));
}

#[test]
fn generate_large_model_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let status = rsim()
        .current_dir(dir.path())
        .args(["generate", "--entities", "1000", "--reactions", "1000", "--alpha", "0.01", "--ctx-steps", "1000", "--seed", "3", "--out-prefix", "big"])
        .status()
        .unwrap();
    assert!(status.success());
    let model = fs::read_to_string(dir.path().join("big.rsys")).unwrap();
    let ctx = fs::read_to_string(dir.path().join("big.ctx")).unwrap();
    // ~10+10+10 names of ~4 bytes per reaction; ~500 names per context line
    assert!((50_000..500_000).contains(&model.len()), "model {} bytes", model.len());
    assert!((1_000_000..5_000_000).contains(&ctx.len()), "context {} bytes", ctx.len());
    let sys = formats::parse_model(&model, Strictness::Strict).unwrap();
    assert_eq!((sys.n_entities(), sys.n_reactions()), (1000, 1000));
    assert_eq!(formats::parse_context(&ctx, &sys).unwrap().len(), 1000);
}

#[test]
fn generate_invalid_spec_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let status = rsim()
        .current_dir(dir.path())
        .args(["generate", "--entities", "1", "--reactions", "10", "--alpha", "0.1", "--out-prefix", "x"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = rsim()
        .current_dir(dir.path())
        .args(["generate", "--entities", "10", "--reactions", "10", "--alpha", "2", "--out-prefix", "x"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn bench_generated_three_engines() {
    let dir = tempfile::tempdir().unwrap();
    let out = rsim()
        .current_dir(dir.path())
        .args(["bench", "--gen", "100", "100", "0.05", "--reps", "3", "--engines", "direct,graph,matrix", "--csv", "b.csv"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("b.csv"));
    let runs = rows.iter().filter(|r| !r[0].ends_with(":setup")).count();
    let setups = rows.iter().filter(|r| r[0].ends_with(":setup")).count();
    assert_eq!((runs, setups), (9, 9));
    assert!(rows.iter().all(|r| r[1] == "100x100x0.05" && r[2] == "1000"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("mean_ms") && stdout.contains("std_ms"));
}

#[test]
fn bench_example_model_summary_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    write_example(dir.path());
    let out = rsim()
        .current_dir(dir.path())
        .args(["bench", "--model", "m.rsys", "--context", "c.ctx", "--engines", "direct", "--reps", "30", "--csv", "b.csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("b.csv"));
    let times: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "direct")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(times.len(), 30);
    assert!(rows.iter().all(|r| r[1] == "m" && r[2] == "2"));

    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let std = (times.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = stdout
        .lines()
        .find(|l| l.starts_with("direct "))
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(row[2].parse::<f64>().unwrap(), mean);
    assert_eq!(row[3].parse::<f64>().unwrap(), std);
}

#[test]
fn bench_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| {
        rsim().current_dir(dir.path()).args(args).status().unwrap().code().unwrap()
    };
    assert_eq!(code(&["bench", "--csv", "b.csv"]), 2);
    assert_eq!(code(&["bench", "--gen", "10", "10", "0.1", "--engines", "gpu", "--csv", "b.csv"]), 2);
    assert_eq!(code(&["bench", "--gen", "10", "ten", "0.1", "--csv", "b.csv"]), 2);
    assert_eq!(code(&["bench", "--gen", "10", "10", "0.1", "--reps", "0", "--csv", "b.csv"]), 2);
}
