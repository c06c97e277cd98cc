use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn mixgap(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mixgap"));
    cmd.args(args).env_remove("MIXGAP_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        write(dir.path(), "id.json", &json!({"inputs": 1, "gates": [], "outputs": [0]}));
        write(dir.path(), "zero.json", &json!({"inputs": 1, "gates": [{"op": "CONST", "value": false}], "outputs": [1]}));
        write(dir.path(), "cycle.json", &json!({"rows": [[[0, 1], [1, 1]], [[1, 1], [0, 1]]]}));
        write(dir.path(), "lazy.json", &json!({"weights": [[0, 0, 2], [1, 1, 2], [2, 2, 2], [0, 1, 1], [1, 2, 1], [2, 0, 1]]}));
        write(dir.path(), "third.json", &json!({"rows": [["1/3", "2/3"], ["1/2", "1/2"]]}));
        Self { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }
}

fn strip_clock(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

#[test]
fn generated_yes_instance_decides_yes() {
    let f = Fixture::new();
    let inst = f.path("inst.json");
    let o = mixgap(
        &["gadget", "sd-chain", "--c1", &f.path("id.json"), "--c2", &f.path("zero.json"), "--m", "4", "--t", "3", "--delta", "1/10", "--out", &inst],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = mixgap(&["decide", "--instance", &inst], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_out(&o);
    assert_eq!(r["results"]["decision"], "YES");
    assert_eq!(r["results"]["before_t"]["d"]["exact"], "1/8");
}

#[test]
fn unresolved_tau_exits_two() {
    let f = Fixture::new();
    let o = mixgap(&["analyze", "tau", "--matrix", &f.path("cycle.json"), "--eps", "1/4"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not reached"), "{}", stderr(&o));
}

#[test]
fn periodic_instance_violates_the_promise() {
    let f = Fixture::new();
    let inst = write(
        f.dir.path(),
        "periodic.json",
        &json!({"kind": "GTC", "chain": {"matrix": {"rows": [[[0, 1], [1, 1]], [[1, 1], [0, 1]]]}}, "x": "0", "t": 3, "c": 1, "delta": [1, 10]}),
    );
    let o = mixgap(&["decide", "--instance", inst.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_out(&o)["results"]["decision"], "PROMISE_VIOLATED");
}

#[test]
fn schema_and_budget_errors_exit_one() {
    let f = Fixture::new();
    let chain = json!({"matrix": {"rows": [[[1, 2], [1, 2]], [[1, 2], [1, 2]]]}});
    let missing = write(f.dir.path(), "missing.json", &json!({"kind": "GPTC", "chain": chain, "x": "0", "t": 2, "c": 1, "delta": 0}));
    let o = mixgap(&["decide", "--instance", missing.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.json: field `t_max`"), "{}", stderr(&o));

    let huge = write(
        f.dir.path(),
        "huge.json",
        &json!({"kind": "GPTC", "chain": chain, "x": "0", "t": 20_000_000u64, "t_max": 30_000_000u64, "c": 1, "delta": 0}),
    );
    let o = mixgap(&["decide", "--instance", huge.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unary t"), "{}", stderr(&o));

    let o = mixgap(&["frobnicate"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn estimator_refuses_non_dyadic_matrices() {
    let f = Fixture::new();
    let o = mixgap(&["estimate", "--matrix", &f.path("third.json"), "--t", "1", "--delta", "0.1"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("1/3") && e.contains("k/2^m"), "{e}");
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let f = Fixture::new();
    let args = ["protocol", "am-sd", "--c1", &f.path("id.json"), "--c2", &f.path("zero.json"), "--rounds", "3000", "--seed", "9"];
    let one = strip_clock(json_out(&mixgap(&args, &[("MIXGAP_THREADS", "1")])));
    let two = strip_clock(json_out(&mixgap(&args, &[("MIXGAP_THREADS", "2")])));
    assert_eq!(one, two);
    assert_eq!(one["results"]["acceptance"]["provenance"], "estimated(3000, 9)");
    let o = mixgap(&args, &[("MIXGAP_THREADS", "0")]);
    assert_eq!(o.status.code(), Some(1));
}

fn walk<'a>(v: &'a Value, found: &mut Vec<&'a Value>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("provenance") {
                found.push(v);
            }
            m.values().for_each(|x| walk(x, found));
        }
        Value::Array(a) => a.iter().for_each(|x| walk(x, found)),
        _ => {}
    }
}

#[test]
fn every_number_carries_a_provenance() {
    let f = Fixture::new();
    let o = mixgap(&["estimate", "--matrix", &f.path("lazy.json"), "--t", "2", "--delta", "0.1", "--seed", "4"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_out(&o);
    let mut found = Vec::new();
    walk(&r["results"], &mut found);
    assert!(found.len() > 5);
    let tag = format!("estimated({}, 4)", r["results"]["N"]["exact"].as_str().unwrap());
    for n in found {
        let p = n["provenance"].as_str().unwrap();
        assert!(p == "exact" || p == tag, "{p}");
        assert!(n["value"].is_string());
    }
}

#[test]
fn d_table_exports_csv() {
    let f = Fixture::new();
    let csv = f.path("d.csv");
    let o = mixgap(&["analyze", "d-of-t", "--matrix", &f.path("lazy.json"), "--horizon", "2", "--csv", &csv], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "t,d,d_exact\n0,1.00000000000000,1\n1,0.250000000000000,1/4\n2,0.0625000000000000,1/16\n");
}

#[test]
fn conductance_reports_phi_and_bound() {
    let f = Fixture::new();
    let o = mixgap(&["analyze", "conductance", "--matrix", &f.path("lazy.json")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_out(&o);
    assert_eq!(r["results"]["phi"]["exact"], "1/2");
    assert_eq!(r["results"]["pi_min"]["exact"], "1/3");
}

#[test]
fn suite_subset_prints_one_line_per_criterion() {
    let o = mixgap(&["suite", "acceptance", "--only", "1,11", "--seed", "3"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let e = stderr(&o);
    let lines: Vec<_> = e.lines().filter(|l| l.starts_with("criterion ")).collect();
    assert_eq!(lines.len(), 2, "{e}");
    assert!(lines[0].starts_with("criterion 1: PASS") && lines[1].starts_with("criterion 11: PASS"), "{e}");
    assert_eq!(json_out(&o)["results"]["passed"]["exact"], "2");
}
