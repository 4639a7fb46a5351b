use std::path::PathBuf;
use std::process::{Command, Output};

fn input(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "inputs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coherence")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--seed", "3", "--jobs", "2"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{err}");
    assert!(err.contains("selftest passed"));
    assert!(!err.contains("FAIL"));
}

#[test]
fn relations_are_byte_identical_across_thread_counts() {
    let args = ["relations", "--dims", "2,3,8", "--trials", "40", "--seed", "11", "--f", "sld,wy,wyd:0.5"];
    let one = run(&[&args[..], &["--jobs", "1"]].concat());
    let four = run(&[&args[..], &["--jobs", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    assert!(text.starts_with("relation,f_name,dim,seed,lhs,rhs,slack,holds,config_hash\n"));
    let rows = csv_rows(&text);
    // robertson once, then lemma1/type1/type3 per f, and type2 for wy and wyd only
    assert_eq!(rows.len(), 3 * 40 * (1 + 3 * 3 + 2));
    assert!(rows.iter().all(|r| r[7] == "true"));
    assert!(rows.iter().all(|r| r[0] != "type2" || r[1] != "sld"));
    let other_seed = run(&[&args[..], &["--seed", "12"]].concat());
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let cfg = input("relations_config.json");
    let from_file = run(&["--config", &cfg, "relations"]);
    assert!(from_file.status.success());
    let rows = csv_rows(&stdout(&from_file));
    assert!(rows.iter().all(|r| r[2] == "2" || r[2] == "3"));
    let overridden = run(&["--config", &cfg, "relations", "--dims", "4", "--trials", "2"]);
    let rows = csv_rows(&stdout(&overridden));
    assert!(!rows.is_empty() && rows.iter().all(|r| r[2] == "4"));
    assert_ne!(csv_rows(&stdout(&from_file))[0][8], rows[0][8], "config hash tracks overrides");
}

#[test]
fn construct_sweep_reproduces_qubit_numbers() {
    let out = run(&["construct-sweep", "--spec", &input("qubit_spec.json"), "--eps", "0.1,0.05,0.01", "--grid", "20,60"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&stdout(&out));
    let want = [(0.1, 6.0, 0.083261048), (0.05, 11.0, 0.045442809), (0.01, 51.0, 0.009803804)];
    assert_eq!(rows.len(), 3);
    for (row, (eps, xi, exact)) in rows.iter().zip(want) {
        let num = |k: usize| row[k].parse::<f64>().unwrap();
        assert_eq!(num(0), eps);
        assert!((num(1) - xi).abs() < 1e-12);
        assert!((num(2) - exact).abs() < 1e-8 && num(2) <= eps);
        assert!(num(2) <= num(3));
        assert!((num(4) - xi * xi).abs() < 1e-9);
    }
    // only the ξ = 6 row fits inside the grid
    let grid: f64 = rows[0][5].parse().unwrap();
    assert!((grid - 0.083261048).abs() < 1e-6);
    assert!(rows[1][5].is_empty() && rows[2][5].is_empty());
}

#[test]
fn cost_table_sld() {
    let out = run(&["cost-table", "--norm-comm", "1", "--norm-a", "1", "--eps", "0.1,0.05,0.01", "--f", "sld"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let want = [(4.5, 6.0), (9.5, 11.0), (49.5, 51.0)];
    for (row, (lo, up)) in rows.iter().zip(want) {
        let num = |k: usize| row[k].parse::<f64>().unwrap();
        assert!((num(2) - lo).abs() < 1e-12 && (num(3) - up).abs() < 1e-12);
        assert!(((num(6) - num(5)) - 1.5 * num(0)).abs() < 1e-12);
        assert_eq!(row[7], "true");
    }
}

#[test]
fn measures_on_the_saturating_qubit() {
    let out = run(&["measures", "--rho", &input("rho_qubit.json"), "--obs", &input("sigma_x.json"), "--f", "sld,wy"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((reports[0]["skew"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((reports[1]["u"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn way_on_a_swap_implementation() {
    let out = run(&["way", "--impl", &input("swap_impl.json"), "--b", &input("sigma_x.json"), "--rho", &input("rho_qubit.json")]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["report"]["epsilon_sq"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["transfer"]["holds"], true);
    let worst = run(&["way", "--impl", &input("swap_impl.json"), "--b", &input("sigma_x.json")]);
    let w: serde_json::Value = serde_json::from_slice(&worst.stdout).unwrap();
    assert_eq!(w["state"], "worst-case");
}

#[test]
fn bad_inputs_exit_with_an_error() {
    let out = run(&["measures", "--rho", &input("sigma_x.json"), "--obs", &input("sigma_x.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a density matrix"));
    let out = run(&["relations", "--f", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["construct-sweep", "--spec", &input("qubit_spec.json"), "--eps", "0.1", "--grid", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("coherence-cost-{}.csv", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let args = ["cost-table", "--norm-comm", "2", "--norm-a", "1", "--eps", "0.1,0.2"];
    let to_file = run(&[&args[..], &["--out", &p]].concat());
    assert!(to_file.status.success() && to_file.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, run(&args).stdout);
}
