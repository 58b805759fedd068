//! Single runs, convergence ladders and the files they produce.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{DgError, Result};
use crate::field::{project_l2_split, DgField, DgSpace, Norms};
use crate::mesh::build_mesh;
use crate::problems::{problem_with_p, ProblemSpec};
use crate::scheme::Scheme;
use crate::time_loop::{run, RunOutput};

/// Samples per cell in solution CSV files.
pub const CSV_SAMPLES_PER_CELL: usize = 8;

#[derive(Debug)]
pub struct RunResult {
    pub config: RunConfig,
    pub output: RunOutput,
    pub wall: Duration,
    /// Errors of `u_h` at the final time when the problem has an exact solution.
    pub errors: Option<Norms>,
    pub space: Arc<DgSpace>,
}

/// Problem, space, scheme and initial state for a configuration.
pub fn prepare(cfg: &RunConfig) -> Result<(ProblemSpec, Arc<DgSpace>, Scheme, DgField)> {
    let spec = problem_with_p(&cfg.problem, Some(cfg.p))?;
    let mesh = build_mesh(
        cfg.domain.0,
        cfg.domain.1,
        cfg.n_cells,
        cfg.perturb,
        cfg.seed,
    )?;
    let space = DgSpace::new(Arc::new(mesh), cfg.degree)?;
    let mut scheme = Scheme::build(&space, cfg.p, cfg.scheme, spec.source.clone())?;
    scheme.set_residual_check(cfg.residual_check);
    let init = spec.initial.clone();
    let u0 = project_l2_split(&space, |x| init(x), &spec.initial_kinks());
    let state = scheme.initial_state(&u0)?;
    Ok((spec, space, scheme, state))
}

/// Runs one configuration. Numerical failures during time stepping are reported in
/// `output.failure` rather than as an error.
pub fn execute(cfg: &RunConfig) -> Result<RunResult> {
    execute_against(cfg, None)
}

/// Like [`execute`], but measures errors against `reference` (a final-time `u`) when
/// the problem has no exact solution.
pub fn execute_against(cfg: &RunConfig, reference: Option<&DgField>) -> Result<RunResult> {
    let start = Instant::now();
    let (spec, space, scheme, state) = prepare(cfg)?;
    let output = run(&scheme, state, &cfg.time_config())?;
    let errors = if !output.completed() {
        None
    } else if let Some(exact) = &spec.exact {
        let u = scheme.solution(&output.state)?;
        let t = output.t;
        Some(u.error_norms(|x| exact(x, t)))
    } else if let Some(r) = reference {
        let u = scheme.solution(&output.state)?;
        Some(u.error_norms(|x| r.eval(x)))
    } else {
        None
    };
    Ok(RunResult {
        config: cfg.clone(),
        output,
        wall: start.elapsed(),
        errors,
        space,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub l2: f64,
    pub l2_order: Option<f64>,
    pub linf: f64,
    pub linf_order: Option<f64>,
    pub wall: Duration,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

/// `log(e_prev / e) / log(N / N_prev)` for each rung after the first.
pub fn convergence_orders(ns: &[usize], errs: &[f64]) -> Vec<Option<f64>> {
    (0..ns.len())
        .map(|i| {
            if i == 0 || !(errs[i] > 0.0) || !(errs[i - 1] > 0.0) {
                None
            } else {
                Some((errs[i - 1] / errs[i]).ln() / (ns[i] as f64 / ns[i - 1] as f64).ln())
            }
        })
        .collect()
}

impl ConvergenceReport {
    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,l2_error,l2_order,linf_error,linf_order,status\n");
        let o = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.6e},{},{:.6e},{},{}",
                r.n_cells,
                r.l2,
                o(r.l2_order),
                r.linf,
                o(r.linf_order),
                r.failure.as_deref().unwrap_or("ok")
            );
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:>6}  {:>12}  {:>6}  {:>12}  {:>6}\n",
            "N", "L2 error", "order", "Linf error", "order"
        );
        let o = |x: Option<f64>| {
            x.map(|v| format!("{v:6.2}"))
                .unwrap_or_else(|| format!("{:>6}", "--"))
        };
        for r in &self.rows {
            if let Some(f) = &r.failure {
                let _ = writeln!(s, "{:>6}  failed: {f}", r.n_cells);
                continue;
            }
            let _ = writeln!(
                s,
                "{:>6}  {:>12.3e}  {}  {:>12.3e}  {}",
                r.n_cells,
                r.l2,
                o(r.l2_order),
                r.linf,
                o(r.linf_order)
            );
        }
        s
    }
}

/// Cell-count multiplier of the reference run used when there is no exact solution.
pub const REFERENCE_REFINEMENT: usize = 4;

/// Final-time `u` of the same scheme on `REFERENCE_REFINEMENT` times the finest rung.
pub fn reference_solution(cfg: &RunConfig, ladder: &[usize]) -> Result<DgField> {
    let mut c = cfg.clone();
    c.n_cells = REFERENCE_REFINEMENT * ladder.iter().copied().max().unwrap_or(cfg.n_cells);
    c.convergence = None;
    c.snapshots = vec![c.t_final];
    let (_, _, scheme, state) = prepare(&c)?;
    let output = run(&scheme, state, &c.time_config())?;
    if let Some(e) = output.failure {
        return Err(e);
    }
    scheme.solution(&output.state)
}

/// Runs every rung of `ladder` in parallel and tabulates the errors at the final time,
/// against the exact solution or, failing that, a refined reference run.
pub fn run_convergence(
    cfg: &RunConfig,
    ladder: &[usize],
) -> Result<(ConvergenceReport, Vec<Option<RunResult>>)> {
    let spec = problem_with_p(&cfg.problem, Some(cfg.p))?;
    let reference = match spec.exact {
        Some(_) => None,
        None => Some(reference_solution(cfg, ladder)?),
    };
    let results: Vec<std::result::Result<RunResult, String>> = ladder
        .par_iter()
        .map(|&n| {
            let mut c = cfg.clone();
            c.n_cells = n;
            c.convergence = None;
            match execute_against(&c, reference.as_ref()) {
                Ok(r) if r.output.failure.is_some() => {
                    Err(r.output.failure.as_ref().unwrap().to_string())
                }
                Ok(r) => Ok(r),
                Err(e) => Err(e.to_string()),
            }
        })
        .collect();
    let l2: Vec<f64> = results
        .iter()
        .map(|r| {
            r.as_ref()
                .ok()
                .and_then(|r| r.errors)
                .map(|e| e.l2)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let linf: Vec<f64> = results
        .iter()
        .map(|r| {
            r.as_ref()
                .ok()
                .and_then(|r| r.errors)
                .map(|e| e.linf)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let l2_orders = convergence_orders(ladder, &l2);
    let linf_orders = convergence_orders(ladder, &linf);
    let rows = results
        .iter()
        .enumerate()
        .map(|(i, r)| ConvergenceRow {
            n_cells: ladder[i],
            l2: l2[i],
            l2_order: l2_orders[i],
            linf: linf[i],
            linf_order: linf_orders[i],
            wall: r.as_ref().map(|r| r.wall).unwrap_or_default(),
            failure: r.as_ref().err().cloned(),
        })
        .collect();
    let runs = results.into_iter().map(|r| r.ok()).collect();
    Ok((ConvergenceReport { rows }, runs))
}

/// File name for a snapshot at time `t`.
pub fn snapshot_name(t: f64) -> String {
    format!("solution_t{t:.6}.csv")
}

pub fn diagnostics_csv(output: &RunOutput) -> String {
    let mut s = String::from("t,E0,E1,E2,dE2_step\n");
    for r in &output.diagnostics {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.e.e0, r.e.e1, r.e.e2, r.de2
        );
    }
    s
}

pub fn report_text(result: &RunResult) -> String {
    let mut s = String::new();
    let out = &result.output;
    let _ = writeln!(s, "# configuration");
    s.push_str(&result.config.echo());
    let _ = writeln!(s, "\n# run");
    let _ = writeln!(s, "wall_clock_seconds = {:.3}", result.wall.as_secs_f64());
    let _ = writeln!(s, "steps = {}", out.steps);
    let _ = writeln!(s, "dt = {:.6e}", out.dt);
    let _ = writeln!(s, "reached_t = {}", out.t);
    let _ = writeln!(s, "limited_cell_events = {}", out.limited_cells);
    match &out.failure {
        None => {
            let _ = writeln!(s, "status = completed");
        }
        Some(DgError::NonFinite { stage, time }) => {
            let _ = writeln!(s, "status = failed");
            let _ = writeln!(s, "failure_stage = {stage}");
            let _ = writeln!(s, "failure_time = {time}");
        }
        Some(e) => {
            let _ = writeln!(s, "status = failed");
            let _ = writeln!(s, "failure = {e}");
            let _ = writeln!(s, "failure_time = {}", out.t);
        }
    }
    if let (Some(first), Some(last)) = (out.diagnostics.first(), out.diagnostics.last()) {
        let rel = |a: f64, b: f64| {
            if a != 0.0 {
                (b - a).abs() / a.abs()
            } else {
                (b - a).abs()
            }
        };
        let _ = writeln!(s, "\n# conservation");
        let _ = writeln!(
            s,
            "E0 = {:.16e} -> {:.16e} (relative change {:.3e})",
            first.e.e0,
            last.e.e0,
            rel(first.e.e0, last.e.e0)
        );
        let derived = if first.e.e1_derived {
            " (taken equal to E0)"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "E1 = {:.16e} -> {:.16e} (relative change {:.3e}){derived}",
            first.e.e1,
            last.e.e1,
            rel(first.e.e1, last.e.e1)
        );
        let _ = writeln!(
            s,
            "E2 = {:.16e} -> {:.16e} (relative change {:.3e})",
            first.e.e2,
            last.e.e2,
            rel(first.e.e2, last.e.e2)
        );
        let _ = writeln!(s, "max |E2(t) - E2(0)| = {:.6e}", out.max_e2_fluctuation());
    }
    if let Some(e) = result.errors {
        let _ = writeln!(s, "\n# errors at t = {}", out.t);
        let _ = writeln!(s, "l2 = {:.6e}", e.l2);
        let _ = writeln!(s, "linf = {:.6e}", e.linf);
        let _ = writeln!(
            s,
            "note: linf is the maximum over {} Gauss points and both endpoints of every cell",
            result.space.quad().n_points()
        );
    }
    s
}

/// Writes snapshots, diagnostics and the report into `dir`. Returns the written paths.
pub fn emit_outputs(result: &RunResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (t, u) in &result.output.snapshots {
        let path = dir.join(snapshot_name(*t));
        fs::write(&path, u.to_csv(CSV_SAMPLES_PER_CELL))?;
        written.push(path);
    }
    let path = dir.join("diagnostics.csv");
    fs::write(&path, diagnostics_csv(&result.output))?;
    written.push(path);
    let path = dir.join("report.txt");
    fs::write(&path, report_text(result))?;
    written.push(path);
    Ok(written)
}

/// Writes `convergence.csv`, `convergence.txt` and each rung's files under `rung_<N>/`.
pub fn emit_convergence(
    report: &ConvergenceReport,
    runs: &[Option<RunResult>],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("convergence.csv");
    fs::write(&path, report.to_csv())?;
    written.push(path);
    let path = dir.join("convergence.txt");
    fs::write(&path, report.to_text())?;
    written.push(path);
    for r in runs.iter().flatten() {
        written.extend(emit_outputs(
            r,
            &dir.join(format!("rung_{}", r.config.n_cells)),
        )?);
    }
    Ok(written)
}
