use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plap-eig"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    write_config_named(dir, "run.toml", body)
}

fn write_config_named(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn uniform_all_reproduces_joint_layout() {
    let cfg = configs().join("uniform_all.toml");
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,z_n,inv_delta,inv_delta_prime,inv_delta_bar"));
    assert_eq!(lines.next(), Some("0,0.000458009,0.000255829,0.00160159,0.000458009"));
    assert_eq!(lines.next(), Some("1,0.000271491,0.000269664,0.000283578,0.000271491"));
    assert!(text.contains("# inverse: lambda = 0.000271277"));
    assert!(text.contains("# sigma_p = "));
}

#[test]
fn graded_inverse_row_ten() {
    let cfg = configs().join("graded_inverse.toml");
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k,z_k\n0,0.828685\n"));
    assert!(text.lines().any(|l| l == "10,0.785253"));
    assert!(text.contains("lambda = 0.782379"));
}

#[test]
fn single_site_approx() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p = 2.5\nn_max = 0\nmethod = \"approx\"\nmu = { values = [1] }\nnu = { values = [1] }\n",
    );
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["n,inv_delta,inv_delta_prime,inv_delta_bar", "0,1,1,1"]);
    assert!(text.contains("approx: lambda = 1,"));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_max = 3\nmu = { expr = \"1\" }\nnu = { expr = \"1\" }\n");
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`p`"));
    assert!(o.stdout.is_empty());

    let cfg = write_config(dir.path(), "p = 1\nn_max = 3\nmu = { expr = \"1\" }\nnu = { expr = \"1\" }\n");
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must exceed 1"));

    let o = run(&["run", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let big = "p = 3\nn_max = 70\nmethod = \"oracle\"\nmu = { expr = \"1\" }\nnu = { expr = \"1\" }\n";
    let cfg = write_config(dir.path(), big);
    assert_eq!(run(&["run", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn exhausted_budget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p = 4.5\nn_max = 80\nmethod = \"inverse\"\nmu = { expr = \"20^k\" }\nnu = { expr = \"20^(k+1)\" }\n[stop]\nmax_iter = 5\n",
    );
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
    assert!(text.contains("converged = false"));
}

#[test]
fn output_is_deterministic() {
    let cfg = configs().join("dn_geometric.toml");
    let a = run(&["run", cfg.to_str().unwrap()]);
    let b = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn command_line_overrides_file_values() {
    let cfg = configs().join("uniform_all.toml");
    let o = run(&["run", cfg.to_str().unwrap(), "--method", "inverse", "--output", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k\tz_k\n0\t0.000458009\n"));

    let o = run(&["run", cfg.to_str().unwrap(), "--method", "oracle", "--output", "pretty"]);
    assert_eq!(stdout(&o).lines().nth(1).map(str::trim), Some("0.000271277"));

    let o = run(&["run", cfg.to_str().unwrap(), "--method", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn full_precision_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let cfg = configs().join("uniform_all.toml");
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--method",
        "inverse",
        "--full-precision",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let z0: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((z0 - 0.000458009).abs() < 5e-10);
    assert_ne!(format!("{z0}").len(), "0.000458009".len());
}

#[test]
fn initial_file_resolves_next_to_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("start.txt"), "1\n1\n1\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "p = 2\nn_max = 2\nmethod = \"inverse\"\ninitial = { file = \"start.txt\" }\nmu = { expr = \"1\" }\nnu = { expr = \"1\" }\n",
    );
    let ones = write_config_named(
        dir.path(),
        "ones.toml",
        "p = 2\nn_max = 2\nmethod = \"inverse\"\ninitial = \"ones\"\nmu = { expr = \"1\" }\nnu = { expr = \"1\" }\n",
    );
    let a = run(&["run", cfg.to_str().unwrap()]);
    let b = run(&["run", ones.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn truncated_method_lists_steps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p = 3\nn_max = 8\nmethod = \"truncated\"\ntruncated_steps = 4\nmu = { expr = \"1\" }\nnu = { expr = \"1\" }\n",
    );
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,inv_delta_prime,inv_delta_bar");
    assert_eq!(rows.len(), 5);
    assert!(rows[4].starts_with("4,"));
}
