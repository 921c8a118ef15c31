use std::path::Path;
use std::process::{Command, Output};

use cubic_minimax_bench::trace::{HEADER, WALL_COLUMN};

fn bench(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minimax-bench"))
        .args(args)
        .env("MINIMAX_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn without_wall_clock(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|line| {
            let mut cells: Vec<&str> = line.split(',').collect();
            cells.remove(WALL_COLUMN);
            cells.join(",")
        })
        .collect()
}

#[test]
fn run_writes_trace_instance_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(
        &["run", "--algo", "lfcr", "--problem", "cubic", "--n", "8", "--rho", "10", "--seed", "7", "--grad-tol", "1e-6"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("algorithm=lfcr"));
    assert!(stdout.contains("status=grad_tol_reached") || stdout.contains("status=stationary"), "{stdout}");

    let stem = dir.path().join("lfcr-n8-rho10-seed7");
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), HEADER.join(","));
    assert!(csv.lines().skip(1).all(|l| l.starts_with("minimax-trace-v1,")));
    let instance = std::fs::read_to_string(stem.with_extension("instance")).unwrap();
    assert!(instance.contains("b_seed=7"));
    let summary = std::fs::read_to_string(stem.with_extension("summary")).unwrap();
    let g: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("final_grad_norm="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(g <= 1e-6);
}

#[test]
fn identical_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let out = bench(
            &["run", "--algo", "ffcr", "--n", "6", "--seed", "3", "--eps", "1e-4", "--trace", path.to_str().unwrap()],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        traces.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(without_wall_clock(&traces[0]), without_wall_clock(&traces[1]));
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&["run", "--algo", "lfcr", "--c", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--c"));

    let out = bench(&["run", "--algo", "eg", "--rho", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--eta"));

    let out = bench(&["run", "--no-such-flag", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "algo=lfcr\n\nfoo=1\n").unwrap();
    let out = bench(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config line 3"));
}

#[test]
fn algorithm_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(
        &["run", "--algo", "ffcr", "--n", "6", "--eps", "1e-12", "--max-outer", "1", "--max-inner-iters", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status=failed"));
    // the partial trace is kept
    assert!(dir.path().join("ffcr-n6-rho10-seed0.csv").exists());
}

#[test]
fn compare_needs_two_matching_configs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.conf");
    let b = dir.path().join("b.conf");
    std::fs::write(&a, "algo=lfcr\nn=6\ngrad_tol=1e-6\n").unwrap();
    std::fs::write(&b, "# first-order baseline\nalgo=eg\neta=0.01\nn=6\nmax_iters=100000\ngrad_tol=1e-6\n").unwrap();

    let out = bench(&["compare", a.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let table = dir.path().join("table.csv");
    let out = bench(
        &["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", table.to_str().unwrap(), "--write-traces"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(table).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(dir.path().join("eg-n6-rho10-seed0.csv").exists());

    let c = dir.path().join("c.conf");
    std::fs::write(&c, "algo=eg\neta=0.01\nn=7\n").unwrap();
    let out = bench(&["compare", a.to_str().unwrap(), c.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
