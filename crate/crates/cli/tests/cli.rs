use std::process::{Command, Output};

fn disclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disclab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn gen_writes_the_van_der_corput_file() {
    let o = disclab(&["gen", "--set", "vdc", "--k", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let points: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(points, ["0.0 0.0", "0.25 0.5", "0.5 0.25", "0.75 0.75"]);
    assert!(text.starts_with("# {"), "provenance line");
}

#[test]
fn gen_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    let p = path.to_str().unwrap();
    let o = disclab(&["gen", "--set", "random", "--N", "7", "--d", "3", "--seed", "5", "--out", p]);
    assert!(o.status.success());
    let from_file = json(&disclab(&["disc", "--set", "file", "--points", p, "--json"]));
    let direct = json(&disclab(&["disc", "--set", "random", "--N", "7", "--d", "3", "--seed", "5", "--json"]));
    assert_eq!(from_file["result"]["value"], direct["result"]["value"]);
}

#[test]
fn disc_l2_is_exact_with_provenance() {
    let v = json(&disclab(&["disc", "--set", "vdc", "--k", "6", "--norm", "l2", "--json"]));
    assert_eq!(v["tool"], "disclab");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["command"], "disc");
    assert_eq!(v["config"]["k"], 6);
    assert_eq!(v["result"]["exact"], true);
    assert_eq!(v["result"]["N"], 64);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!(value > 0.0 && value < 2.0);
}

#[test]
fn smallball_exhaustive_is_proved() {
    let v = json(&disclab(&["smallball", "--d", "2", "--n", "2", "--method", "exhaustive", "--json"]));
    assert!(v["result"]["value"].as_f64().unwrap() >= 3.0);
    assert_eq!(v["result"]["status"], "proved");
}

#[test]
fn output_is_deterministic() {
    let args = ["mc", "--n", "3", "--n-max", "5", "--trials", "30", "--seed", "11", "--json"];
    assert_eq!(disclab(&args).stdout, disclab(&args).stdout);
    let args = ["riesz", "--method", "sine", "--set", "vdc-shifted", "--k", "5", "--json"];
    assert_eq!(disclab(&args).stdout, disclab(&args).stdout);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"set": "vdc", "k": 3, "norm": "sup"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&disclab(&["disc", "--config", c, "--json"]));
    assert_eq!(v["result"]["N"], 8);
    assert_eq!(v["result"]["norm"], "sup");
    let v = json(&disclab(&["disc", "--config", c, "--k", "4", "--json"]));
    assert_eq!(v["result"]["N"], 16);
    assert_eq!(v["config"]["k"], 4);

    std::fs::write(&cfg, r#"{"set": "vdc", "kk": 3}"#).unwrap();
    assert_eq!(disclab(&["disc", "--config", c]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(disclab(&["disc"]).status.code(), Some(1));
    assert_eq!(disclab(&["disc", "--set", "vdc", "--k", "3", "--norm", "lp:0.5"]).status.code(), Some(1));
    assert_eq!(disclab(&["nonsense"]).status.code(), Some(1));
    assert_eq!(disclab(&["suite", "--tol", "no.such=1"]).status.code(), Some(1));
    assert_eq!(disclab(&["suite", "--criteria", "12"]).status.code(), Some(1));
    let o = disclab(&["disc", "--set", "file", "--points", "/nonexistent/p.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn budget_errors_suggest_parameters() {
    let o = disclab(&["disc", "--set", "vdc", "--k", "4", "--norm", "l1", "--level", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("suggestion"));
}

#[test]
fn tampered_tolerance_fails_with_exit_2() {
    let o = disclab(&["suite", "--criteria", "1", "--tol", "algebra.parseval=0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn suite_json_report() {
    let o = disclab(&["suite", "--criteria", "2,9", "--json"]);
    let v = json(&o);
    let criteria = v["result"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 2);
    assert_eq!(criteria[0]["id"], 2);
    assert_eq!(criteria[1]["passed"], true);
    assert!(criteria[0]["tolerances"]["riesz.duality"].as_f64().is_some());
    assert!(criteria[0].get("elapsed").is_none());
    assert_eq!(o.stdout, disclab(&["suite", "--criteria", "2,9", "--json"]).stdout);
}

#[test]
fn csv_tables_have_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let o = disclab(&["haar", "--set", "vdc", "--k", "2", "--n", "1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("r_1,r_2,k_1,k_2,coefficient"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    let c: f64 = rows[0].rsplit(',').next().unwrap().parse().unwrap();
    assert!(rows[0].rsplit(',').next().unwrap().contains("e"));
    assert!(c.abs() < 1.0);
}

#[test]
fn failed_checks_exit_2_only_on_violation() {
    let o = disclab(&["chain", "--set", "vdc", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let o = disclab(&["riesz", "--n", "5", "--model", "gaussian"]);
    assert_eq!(o.status.code(), Some(0));
}
