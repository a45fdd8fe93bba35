use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linclique"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).expect("valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn density_prints_exact_rationals() {
    let v = json(&["density", "--clique", "4", "--k", "3"]);
    assert_eq!(v["m_k"], "5/7");
    assert_eq!(v["closed_form_m_k"], "5/7");
    let v = json(&["density", "--clique", "6", "--asym-clique", "3", "--remark"]);
    assert_eq!(v["asym_m_k"], "10/13");
    assert_eq!(v["remark_holds"], true);
}

#[test]
fn clique_gen_round_trips_through_contains() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok_stdout(&["clique", "gen", "--t", "4", "--k", "3", "--format", "csv"]);
    assert!(text.starts_with("n=10 k=3\n"));
    assert_eq!(text.lines().count(), 7);
    let f = write(dir.path(), "k4.txt", &text);
    let v = json(&["clique", "contains", "--edges", &f, "--t", "4"]);
    assert_eq!(v["found"], true);
    assert_eq!(v["certificate"]["branch"].as_array().unwrap().len(), 4);
    let v = json(&["clique", "contains", "--edges", &f, "--t", "5"]);
    assert_eq!(v["found"], false);
}

#[test]
fn sample_is_seeded() {
    let a = ok_stdout(&["sample", "--n", "10", "--p", "0.3", "--seed", "5"]);
    let b = ok_stdout(&["sample", "--n", "10", "--p", "0.3", "--seed", "5"]);
    let c = ok_stdout(&["sample", "--n", "10", "--p", "0.3", "--seed", "6"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("n=10 k=3"));
    let full = ok_stdout(&["sample", "--n", "9", "--p", "0", "--tripartite"]);
    assert_eq!(full.lines().count(), 1 + 27);
}

#[test]
fn arrow_verdicts_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.txt", "n=6 k=3\n0 1 3\n0 2 4\n1 2 5\n");
    let v = json(&[
        "arrow",
        "--edges",
        &k3,
        "--f1",
        "clique:t=2",
        "--f2",
        "clique:t=2",
    ]);
    assert_eq!(v["arrows"], true);
    let v = json(&[
        "arrow",
        "--edges",
        &k3,
        "--f1",
        "clique:t=3",
        "--f2",
        "clique:t=3",
    ]);
    assert_eq!(v["arrows"], false);
    let cert = &v["certificate"];
    assert_eq!(
        cert["red"].as_array().unwrap().len() + cert["blue"].as_array().unwrap().len(),
        3
    );
    // excluding the only triangle from F1 lets red take everything
    let ex = write(dir.path(), "ex.txt", "0 1 2 3 4 5\n");
    let v = json(&[
        "arrow",
        "--edges",
        &k3,
        "--f1",
        "clique:t=3",
        "--f2",
        "clique:t=2",
        "--exclude1",
        &ex,
    ]);
    assert_eq!(v["arrows"], false);
}

#[test]
fn regularity_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = String::from("n=8 k=2\n");
    for a in 0..4 {
        for b in 4..8 {
            g.push_str(&format!("{} {}\n", a, b));
        }
    }
    let gf = write(dir.path(), "g.txt", &g);
    let pf = write(dir.path(), "p.txt", "part 0: 0 1 2 3\npart 1: 4 5 6 7\n");
    let v = json(&[
        "regularity",
        "pair",
        "--edges",
        &gf,
        "--parts",
        &pf,
        "--d",
        "1",
        "--delta",
        "0.1",
        "--mode",
        "exact",
    ]);
    assert_eq!(v["regular"], true);
    let v = json(&[
        "regularity",
        "pair",
        "--edges",
        &gf,
        "--parts",
        &pf,
        "--d",
        "1/2",
        "--delta",
        "0.1",
        "--mode",
        "exact",
    ]);
    assert_eq!(v["regular"], false);

    let tri = ok_stdout(&["sample", "--n", "9", "--p", "0", "--tripartite"]);
    let hf = write(dir.path(), "h.txt", &tri);
    let p3 = write(
        dir.path(),
        "p3.txt",
        "part 0: 0 1 2\npart 1: 3 4 5\npart 2: 6 7 8\n",
    );
    let v = json(&[
        "regularity",
        "weak",
        "--edges",
        &hf,
        "--parts",
        &p3,
        "--d",
        "1",
        "--delta",
        "0.1",
        "--mode",
        "exact",
    ]);
    assert_eq!(v["regular"], true);
    let v = json(&[
        "regularity",
        "strong",
        "--edges",
        &hf,
        "--parts",
        &p3,
        "--d",
        "1",
        "--delta",
        "0.1",
        "--mode",
        "exact",
    ]);
    assert_eq!(v["regular"], true);

    let mut p = String::from("n=9 k=2\n");
    for (x, y) in [(0, 3), (0, 6), (3, 6)] {
        for a in x..x + 3 {
            for b in y..y + 3 {
                p.push_str(&format!("{} {}\n", a, b));
            }
        }
    }
    let pfile = write(dir.path(), "triad.txt", &p);
    let v = json(&[
        "regularity",
        "triad",
        "--edges",
        &pfile,
        "--parts",
        &p3,
        "--d",
        "1",
        "--delta",
        "0.01",
        "--force",
    ]);
    assert_eq!(v["count"], 27);
    assert_eq!(v["pass"], true);
}

#[test]
fn refine_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let h = ok_stdout(&["sample", "--n", "24", "--p", "0.5", "--seed", "2"]);
    let hf = write(dir.path(), "h.txt", &h);
    let trace = dir.path().join("trace.json");
    let part = dir.path().join("v.txt");
    let v = json(&[
        "refine",
        "--edges",
        &hf,
        "--delta3",
        "0.1",
        "--ell0",
        "2",
        "--t0",
        "3",
        "--max-iter",
        "5",
        "--trace",
        trace.to_str().unwrap(),
        "--partition",
        part.to_str().unwrap(),
    ]);
    assert!(v["parts"].as_u64().unwrap() >= 3);
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(t["iterations"].is_array());
    assert!(t["reason"].is_string());
    assert!(std::fs::read_to_string(&part)
        .unwrap()
        .starts_with("part 0:"));
}

#[test]
fn tuple_audit_on_complete_instance() {
    let dir = tempfile::tempdir().unwrap();
    let tri = ok_stdout(&["sample", "--n", "12", "--p", "0", "--tripartite"]);
    let hf = write(dir.path(), "h.txt", &tri);
    let pf = write(
        dir.path(),
        "p.txt",
        "part 0: 0 1 2 3\npart 1: 4 5 6 7\npart 2: 8 9 10 11\n",
    );
    let v = json(&[
        "tuple-audit",
        "--edges",
        &hf,
        "--parts",
        &pf,
        "--t",
        "2",
        "--d3",
        "1",
        "--d2",
        "1",
        "--eps",
        "0.1",
    ]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["tuples"], 16);
    let v = json(&[
        "tuple-audit",
        "--edges",
        &hf,
        "--parts",
        &pf,
        "--t",
        "2",
        "--d3",
        "1",
        "--d2",
        "1",
        "--eps",
        "0.1",
        "--mode",
        "sampled",
        "--samples",
        "50",
    ]);
    assert_eq!(v["bad_fraction_low"], 0.0);
}

#[test]
fn janson_reports_bound_and_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.txt", "n=6 k=3\n0 1 3\n0 2 4\n1 2 5\n");
    let v = json(&[
        "janson",
        "--edges",
        &k3,
        "--pattern",
        "clique:t=2",
        "--p",
        "0.5",
    ]);
    assert_eq!(v["copies"], 3);
    assert!((v["probability"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    assert!((v["bound"].as_f64().unwrap() - (-1.5f64).exp()).abs() < 1e-12);
    assert_eq!(v["delta"], 0.0);
}

#[test]
fn sweep_formats_config_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.cfg",
        "# containment sweep\nn = 12\nt = 4\ntrials_per_point = 10\ngrid = 0,0.02,1\nseed = 3\n",
    );
    let csv = ok_stdout(&["sweep", "--config", &cfg, "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "p,successes,trials,estimate,ci_lo,ci_hi,inconclusive"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,0,10,0,"));
    assert!(lines[3].starts_with("1,10,10,1,"));
    let one = ok_stdout(&["sweep", "--config", &cfg, "--threads", "1"]);
    let four = ok_stdout(&["sweep", "--config", &cfg, "--threads", "4"]);
    assert_eq!(one, four);
    let v: Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    // the command line overrides the config file
    let v = json(&["sweep", "--config", &cfg, "--grid", "0.5"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    let out = dir.path().join("r.csv");
    ok_stdout(&[
        "sweep",
        "--config",
        &cfg,
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), csv);
    let v = json(&[
        "sweep",
        "--n",
        "7",
        "--t",
        "4",
        "--cs",
        "1,100",
        "--rho",
        "3/5",
        "--trials-per-point",
        "2",
    ]);
    assert_eq!(v["points"][1]["p"], 1.0);
}

#[test]
fn embed_certificate_verifies() {
    let v = json(&["embed", "--r", "2", "--s", "16", "--seed", "9"]);
    assert_eq!(v["verified"], true);
    assert_eq!(v["vertices"], 21);
    assert_eq!(v["edges"], 15);
    let v = json(&["embed", "--r", "3", "--s", "15"]);
    assert_eq!(v["verified"], true);
}

#[test]
fn errors_are_reported_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "n=4 k=3\n0 1 2\n0 1\n");
    let out = run(&["clique", "contains", "--edges", &bad, "--t", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = run(&["sweep", "--n", "6", "--t", "4", "--grid", "1.5"]);
    assert!(!out.status.success());
    let out = run(&["embed", "--r", "2", "--s", "5"]);
    assert!(!out.status.success());
}
