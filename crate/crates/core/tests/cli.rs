use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fwldg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwldg"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn smooth_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = fwldg(&[
        "--scheme",
        "d1",
        "--problem",
        "smooth_manufactured",
        "--cells",
        "20",
        "--degree",
        "2",
        "--tfinal",
        "0.1",
        "--snapshots",
        "0.05,0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in [
        "solution_t0.050000.csv",
        "solution_t0.100000.csv",
        "diagnostics.csv",
        "report.txt",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("scheme = d1") && report.contains("status = completed"));
    assert!(report.contains("l2 = "));
    let csv = fs::read_to_string(out.join("solution_t0.100000.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,u"));
    assert_eq!(csv.lines().count(), 1 + 20 * 8);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("o");
    fs::write(
        &cfg,
        format!(
            "# two forms, same answer\nscheme = c2\nproblem = smooth_manufactured\ncells = 12\ntfinal = 0.02\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = fwldg(&["--config", cfg.to_str().unwrap(), "--scheme", "d2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("scheme = d2"));
    assert!(report.contains("cells = 12"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let o = fwldg(&["--scheme", "x7", "--problem", "shock1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown scheme"));

    let o = fwldg(&["--problem", "kdv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("two_soliton"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "problem = shock1\ncolour = blue\n").unwrap();
    let o = fwldg(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("colour"));

    let o = fwldg(&["--problem", "periodic_peakon", "--p", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn numerical_failure_exits_with_three_and_still_reports() {
    // p = 4 shock without a limiter at the default step blows up shortly after the shock forms
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("blowup");
    let o = fwldg(&[
        "--scheme",
        "d1",
        "--problem",
        "shock1",
        "--cells",
        "80",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("non-finite state in RK stage"));
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("status = failed") && report.contains("failure_stage = "));
}

#[test]
fn unwritable_output_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("sub");
    let o = fwldg(&[
        "--problem",
        "smooth_manufactured",
        "--cells",
        "8",
        "--tfinal",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn convergence_ladder_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv");
    let o = fwldg(&[
        "--scheme",
        "c1",
        "--problem",
        "smooth_manufactured",
        "--degree",
        "2",
        "--convergence",
        "10,20,40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "N,l2_error,l2_order,linf_error,linf_order,status");
    assert_eq!(rows.len(), 4);
    let order: f64 = rows[3].split(',').nth(2).unwrap().parse().unwrap();
    assert!((2.7..3.3).contains(&order), "{order}");
    assert!(Path::new(&out.join("rung_40").join("report.txt")).exists());
}

#[test]
fn low_degree_conservative_scheme_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = fwldg(&[
        "--scheme",
        "c1",
        "--degree",
        "1",
        "--problem",
        "smooth_manufactured",
        "--cells",
        "8",
        "--tfinal",
        "0.01",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn perturbed_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, seed) in [("a", "5"), ("b", "5"), ("c", "6")] {
        let out = dir.path().join(name);
        let o = fwldg(&[
            "--scheme",
            "d2",
            "--problem",
            "smooth_manufactured",
            "--cells",
            "16",
            "--perturb",
            "0.2",
            "--seed",
            seed,
            "--tfinal",
            "0.05",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(fs::read_to_string(out.join("solution_t0.050000.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_ne!(outputs[0], outputs[2]);
}
