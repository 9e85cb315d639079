use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn simo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simo"))
        .args(args)
        .env("SIMO_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    for rec in r.records() {
        rows.push(rec.unwrap().iter().map(String::from).collect());
    }
    rows
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn bounds_row_has_reference_density() {
    let dir = TempDir::new().unwrap();
    let out = simo(dir.path(), &["bounds", "n_r=12", "alpha=4", "k=6", "snr=inf"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&fs::read_to_string(dir.path().join("bounds.csv")).unwrap());
    let (b, v) = (column(&rows, "bound"), column(&rows, "value"));
    let row = rows.iter().find(|r| r[b] == "pzf_density_lb_markov").unwrap();
    let value: f64 = row[v].parse().unwrap();
    assert_eq!(format!("{value:.4}"), "0.4502");
}

#[test]
fn malformed_value_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let out = simo(dir.path(), &["outage", "alpha=-1", "--trials", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

    for bad in [&["outage", "colour=blue"][..], &["outage", "alpha"], &["density", "receiver=magic"]] {
        let out = simo(dir.path(), bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn vacuous_hard_bound_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = simo(
        dir.path(),
        &["bounds", "n_r=12", "alpha=4", "k=11", "bound=pzf_density_lb_markov"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    let out = simo(dir.path(), &["bounds", "n_r=12", "alpha=4", "k=6", "bound=pzf_density_lb_markov"]);
    assert!(out.status.success());
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["outage", "n_r=4", "receiver=pzf", "k=2", "lambda=0.2", "--trials", "3000", "--seed", "11"];
    let mut first: Vec<&str> = common.to_vec();
    first.extend(["--threads", "1", "-o", a.to_str().unwrap()]);
    let mut second: Vec<&str> = common.to_vec();
    second.extend(["--threads", "3", "-o", b.to_str().unwrap()]);
    assert!(simo(dir.path(), &first).status.success());
    assert!(simo(dir.path(), &second).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_is_overridden_by_arguments_and_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# fig4 point\nalpha = 4\nn_r = 2\nseed = 5\ntrials = 1500\n").unwrap();
    let out = simo(
        dir.path(),
        &["density", "-c", cfg.to_str().unwrap(), "n_r=3", "seed=6", "--seed", "7"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert!(text.contains("# n_r=3\n"));
    assert!(text.contains("# seed=7\n"));
    assert!(text.contains("# trials=1500\n"));
    assert!(text.starts_with("# simo "));
}

#[test]
fn density_preset_gives_one_row_with_interval() {
    let dir = TempDir::new().unwrap();
    let out = simo(dir.path(), &["density", "preset=fig4", "n_r=8", "--trials", "2000"]);
    assert!(out.status.success());
    let rows = data_rows(&fs::read_to_string(dir.path().join("density.csv")).unwrap());
    assert_eq!(rows.len(), 2);
    let get = |c: &str| rows[1][column(&rows, c)].parse::<f64>().unwrap();
    assert!(get("ci_low") <= get("value") && get("value") <= get("ci_high"));
    assert!(get("value") > 0.5 && get("value") < 1.5);
}

#[test]
fn fig7_marks_one_optimum_per_curve() {
    let dir = TempDir::new().unwrap();
    let out = simo(
        dir.path(),
        &["fig7", "n_r_list=1,2", "p_grid=0.03,0.1,0.3", "--trials", "200"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&fs::read_to_string(dir.path().join("fig7.csv")).unwrap());
    let (n, opt, series) = (column(&rows, "n_r"), column(&rows, "optimal"), column(&rows, "series"));
    for nr in ["1", "2"] {
        let marked = rows[1..].iter().filter(|r| r[n] == nr && r[opt] == "true").count();
        assert_eq!(marked, 1);
        let fixed = rows[1..].iter().filter(|r| r[n] == nr && r[series] == "fixed-rate").count();
        assert_eq!(fixed, 1);
    }
}

#[test]
fn sweep_rejects_keys_the_measure_ignores() {
    let dir = TempDir::new().unwrap();
    let out = simo(dir.path(), &["sweep", "vary=lambda", "values=0.1,0.2", "measure=density"]);
    assert_eq!(out.status.code(), Some(2));
    let out = simo(
        dir.path(),
        &["sweep", "vary=beta", "values=1,4", "measure=outage", "--trials", "2000"],
    );
    assert!(out.status.success());
    let rows = data_rows(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap());
    let v = column(&rows, "value");
    let (lo, hi): (f64, f64) = (rows[1][v].parse().unwrap(), rows[2][v].parse().unwrap());
    assert!(hi > lo, "higher threshold must raise outage");
}
