use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_xy-discord");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("XY_DISCORD_QUAD_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(csv: &str, row: usize, col: usize) -> String {
    csv.lines().nth(row).unwrap().split(',').nth(col).unwrap().to_string()
}

#[test]
fn bit_phase_flip_sudden_change() {
    let o = run(&["psc", "--lambda", "0.7", "--gamma", "0.7", "--channel", "bpf"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let v: f64 = field(&out, 0, 1).parse().unwrap();
    assert!((v - 0.114).abs() < 1e-3);
    assert!(out.trim_end().ends_with("type,II"));
}

#[test]
fn phase_flip_sudden_change() {
    let o = run(&["psc", "--lambda", "0.7", "--gamma", "0.7", "--channel", "pf"]);
    let v: f64 = field(&stdout(&o), 0, 1).parse().unwrap();
    assert!((v - 0.173).abs() < 1e-3);
}

#[test]
fn negative_anisotropy_has_no_sudden_change() {
    let o = run(&["psc", "--lambda", "0.7", "--gamma", "-0.7", "--channel", "bpf"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p_sc,absent,type,III\n");
}

#[test]
fn state_row_and_json_matrix() {
    let o = run(&["state", "--lambda", "0.7", "--gamma", "0.7", "--r", "1"]);
    let out = stdout(&o);
    assert!(out.starts_with("a,b,d,z,f,c1,c2,c3,c4,I,C,Q,branch\n"));
    assert_eq!(field(&out, 1, 12), "Q2");
    let o = run(&["state", "--lambda", "0.7", "--gamma", "0.7", "--format", "json"]);
    let m: Vec<Vec<f64>> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m.len(), 4);
    assert!((m[0][3] - 0.12620531480393005).abs() < 1e-12);
}

#[test]
fn trajectory_rows() {
    let o = run(&["trajectory", "--lambda", "0.7", "--gamma", "0.7", "--channel", "pf", "--p-points", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 12);
    assert_eq!(out.lines().next().unwrap(), "p,I,C,Q,branch");
    for line in out.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').take(4).map(|c| c.parse().unwrap()).collect();
        assert!((cells[1] - cells[2] - cells[3]).abs() < 1e-9);
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["psc", "--lambda", "0.7", "--gamma", "0.7", "--channel", "amplitude"],
        vec!["psc", "--lambda", "0.7", "--gamma", "1.5", "--channel", "bpf"],
        vec!["psc", "--lambda", "-0.1", "--gamma", "0.5", "--channel", "bpf"],
        vec!["state", "--gamma", "0.5"],
        vec!["profile", "--lambda", "0.7", "--gamma", "0.7", "--channel", "pf", "--p", "1.2"],
        vec!["qcp", "--gamma", "1", "--channel", "pf"],
        vec!["sweep", "--lambda", "0.7", "--gamma", "0.7", "--channel", "pf", "--sweep-var", "lambda", "--sweep-range", "1:0:5"],
        vec!["teleport"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn degenerate_state_exits_one() {
    let o = run(&["psc", "--lambda", "0", "--gamma", "0.5", "--channel", "bpf"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DegenerateState"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_reproducible() {
    let args = ["sweep", "--lambda", "0.7", "--gamma", "0.7", "--channel", "bpf", "--sweep-var", "lambda", "--sweep-range", "0.5:0.9:5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "# nearest neighbours\nlambda = 0.7\ngamma = 0.7\nchannel = \"pf\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&run(&["psc", "--config", cfg]));
    assert_eq!(from_file, stdout(&run(&["psc", "--lambda", "0.7", "--gamma", "0.7", "--channel", "pf"])));
    let overridden = stdout(&run(&["psc", "--config", cfg, "--channel", "bpf"]));
    assert_eq!(overridden, stdout(&run(&["psc", "--lambda", "0.7", "--gamma", "0.7", "--channel", "bpf"])));
}

#[test]
fn quadrature_tolerance_from_environment() {
    let args = ["state", "--lambda", "0.7", "--gamma", "0.7"];
    let loose = Command::new(BIN).args(args).env("XY_DISCORD_QUAD_TOL", "1e-6").output().unwrap();
    assert_eq!(loose.status.code(), Some(0));
    let bad = Command::new(BIN).args(args).env("XY_DISCORD_QUAD_TOL", "tight").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let neg = Command::new(BIN).args(args).env("XY_DISCORD_QUAD_TOL", "-1").output().unwrap();
    assert_eq!(neg.status.code(), Some(2));
}

#[test]
fn file_output_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = run(&[
        "trajectory", "--lambda", "0.7", "--gamma", "0.7", "--channel", "bpf", "--p-points", "21",
        "--out", out.to_str().unwrap(), "--emit-plot",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 22);
    let script = std::fs::read_to_string(dir.path().join("traj.csv.gp")).unwrap();
    assert!(script.contains("traj.csv"));
}

#[test]
fn failed_run_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("psc.csv");
    let o = run(&["psc", "--lambda", "0", "--gamma", "0.5", "--channel", "bpf", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    let o = run(&["psc", "--lambda", "0.7", "--gamma", "0.7", "--channel", "bpf", "--emit-plot"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new("psc.csv.gp").exists());
}
