use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chemotaxis::integrate;
use chemotaxis::io::{parse_series_csv, parse_snapshot_csv, SERIES_FILE};

fn chemotaxis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemotaxis")).args(args).output().expect("binary runs")
}

fn run_small(out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec!["run", "--scenario", "ex4_1_mu1", "--nx", "21", "--ny", "21", "--t-end", "0.02"];
    args.extend_from_slice(&["--snapshots", "3", "--out", out]);
    args.extend_from_slice(extra);
    chemotaxis(&args)
}

fn sorted_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

#[test]
fn run_writes_outputs_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = run_small(dir, &[]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let names = sorted_files(&a);
    assert_eq!(names, sorted_files(&b));
    for want in ["series.csv", "report.txt", "report.json", "u_0.0.csv", "u_0.01.csv", "u_0.02.csv", "mid_0.02.csv"] {
        assert!(names.iter().any(|n| n == want), "missing {want} in {names:?}");
    }
    for n in &names {
        if n.ends_with(".csv") {
            assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n} differs");
        }
    }
}

#[test]
fn snapshot_mass_matches_series() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run_small(tmp.path(), &[]).status.code(), Some(0));
    let (_, rows) = parse_series_csv(&fs::read_to_string(tmp.path().join(SERIES_FILE)).unwrap()).unwrap();
    let mut matched = 0;
    for t in ["0.0", "0.01", "0.02"] {
        let snap = parse_snapshot_csv(&fs::read_to_string(tmp.path().join(format!("u_{t}.csv"))).unwrap()).unwrap();
        let row = rows.iter().find(|r| r.t == snap.t).expect("snapshot time appears in the series");
        let mass = integrate(&snap.field);
        assert!((mass - row.mass).abs() <= 1e-12 * row.mass.abs().max(1.0), "t={t}: {mass} vs {}", row.mass);
        assert_eq!(snap.field.max(), row.max_u);
        matched += 1;
    }
    assert_eq!(matched, 3);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    assert_eq!(run_small(&first, &["--p-norms", "1,3"]).status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(first.join("report.json")).unwrap()).unwrap();
    let cfg_path = tmp.path().join("echo.cfg");
    let second = tmp.path().join("second");
    let echo = report["config_echo"].as_str().unwrap().replace(&format!("out = {}", first.display()), &format!("out = {}", second.display()));
    fs::write(&cfg_path, echo).unwrap();
    let out = chemotaxis(&["run", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s1 = fs::read_to_string(first.join(SERIES_FILE)).unwrap();
    assert!(s1.starts_with("t,max_u,min_u,mass,linf_diff,L1,L3\n"));
    assert_eq!(s1, fs::read_to_string(second.join(SERIES_FILE)).unwrap());
}

#[test]
fn imaginary_state_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = chemotaxis(&["run", "--scenario", "ex4_9_mu0", "--t-end", "5e-6", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(11));
    let text = fs::read_to_string(tmp.path().join("report.txt")).unwrap();
    assert!(text.starts_with("event: ImaginaryState"), "{text}");
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = chemotaxis(&["run", "--scenario", "ex9_9", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario `ex9_9`"));
}

#[test]
fn bad_config_line_is_reported_with_its_origin() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "scenario = ex4_1\n# comment\nsafety = fast\n").unwrap();
    let out = chemotaxis(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("`safety`"), "{err}");
}

#[test]
fn sweep_with_empty_axis_writes_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = chemotaxis(&["sweep", "--mu", "", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("phase.csv")).unwrap();
    assert_eq!(csv, "k,l,m,mu,amplitude,event,t_event,final_max_u,theorem1_bounded,error\n");
}

#[test]
fn sweep_rows_are_independent_of_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for workers in ["1", "3"] {
        let dir = tmp.path().join(workers);
        let out = Command::new(env!("CARGO_BIN_EXE_chemotaxis"))
            .env("CHEMOTAXIS_WORKERS", workers)
            .args(["sweep", "--scenario", "ex4_1", "--nx", "15", "--ny", "15", "--t-end", "0.005"])
            .args(["--k", "1,1.5", "--mu", "0,1", "--amplitude", "500,1000", "--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        tables.push(fs::read_to_string(dir.join("phase.csv")).unwrap());
    }
    assert_eq!(tables[0].lines().count(), 9);
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn verify_quick_passes_and_injected_fault_fails() {
    let ok = chemotaxis(&["verify", "--quick"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = chemotaxis(&["verify", "--quick", "--inject-fault", "laplacian"]);
    assert_ne!(bad.status.code(), Some(0));
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("first failing check: laplacian oracle"), "{text}");
}
