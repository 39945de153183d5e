use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIG1: &str = r#"[meta]
name = "fig1"

[payoff]
kind = "quadratic"
c = 0.0

[[groups]]
alpha = 10.0
alpha_hat = 5.0
q = 0.5

[[groups]]
alpha = 12.0
alpha_hat = 15.0
q = 0.5

[peer]
rows = [[0.5, 0.5], [0.5, 0.5]]
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_peerpress"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("PEERPRESS_THREADS", t);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pressure_prints_efficient_weights() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1.toml", FIG1);
    let o = run(&["pressure", f.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "group,lambda_star,regime,x_induced,equilibrium_class");
    assert_eq!(lines[1], "1,0.833333333333,Interior,10,NashAndSCE");
    assert_eq!(lines[2], "2,0.75,Interior,12,NashAndSCE");
    assert!(!text.contains('\r'));
}

#[test]
fn figure_writes_hundred_rows_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1.toml", FIG1);
    let out = dir.path().join("fig.csv");
    let o = run(
        &["figure", f.to_str().unwrap(), "--p-grid", "0:0.99:100", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rows = text.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let p_col = header.iter().position(|c| *c == "p").unwrap();
    let l_col = header.iter().position(|c| *c == "lambda_star_1").unwrap();
    let rows: Vec<Vec<&str>> = rows.map(|r| r.split(',').collect()).collect();
    assert_eq!(rows.len(), 100);
    for r in rows {
        let p: f64 = r[p_col].parse().unwrap();
        let l: f64 = r[l_col].parse().unwrap();
        assert!((l - 5.0 / (7.0 - 2.0 * p)).abs() < 1e-10, "p = {p}");
    }
}

#[test]
fn invade_reports_stable_incumbent() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1.toml", FIG1);
    let o = run(
        &["invade", f.to_str().unwrap(), "--group", "1", "--lambda-mutant", "0.5", "--epsilon", "0.01"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|c| *c == name).unwrap();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let inc: f64 = row[col("incumbent_fitness")].parse().unwrap();
    let mu: f64 = row[col("mutant_fitness")].parse().unwrap();
    assert!(inc > mu);
    assert_eq!(row[col("verdict")], "StableAgainst");
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_rows = write(
        dir.path(),
        "rows.toml",
        &FIG1.replace("[[0.5, 0.5], [0.5, 0.5]]", "[[0.5, 0.4], [0.5, 0.5]]"),
    );
    let o = run(&["pressure", bad_rows.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("peer row 0"));

    let garbage = write(dir.path(), "garbage.toml", "this is not toml = = =");
    assert_eq!(run(&["solve", garbage.to_str().unwrap()], None).status.code(), Some(2));

    let missing = dir.path().join("absent.toml");
    assert_eq!(run(&["solve", missing.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn dominance_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"[meta]
name = "degenerate"

[[groups]]
alpha = 2.0
alpha_hat = 3.0
q = 0.0

[peer]
rows = [[1.0]]

[lambdas]
misspecified = [1.0]
"#;
    let f = write(dir.path(), "k1.toml", text);
    let o = run(&["solve", f.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn output_is_byte_identical_across_runs_and_pools() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1.toml", FIG1);
    let path = f.to_str().unwrap();
    for args in [
        vec!["invade", path, "--group", "2"],
        vec!["figure", path],
        vec!["sweep", path, "--p-grid", "0:0.9:10", "--run", "cstat"],
    ] {
        let first = run(&args, None);
        let again = run(&args, None);
        let single = run(&args, Some("1"));
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, again.stdout);
        assert_eq!(first.stdout, single.stdout);
    }
}
