use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fwldg::config::{parse_config, read_config_file, ConfigMap};
use fwldg::driver::{emit_convergence, emit_outputs, execute, run_convergence};
use fwldg::DgError;

/// LDG solver for Fornberg-Whitham type equations.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Flat `key = value` file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// d1, c1, d2 or c2.
    #[arg(long)]
    scheme: Option<String>,
    /// Exponent of the nonlinearity u^p/p.
    #[arg(long)]
    p: Option<String>,
    /// Polynomial degree k.
    #[arg(long)]
    degree: Option<String>,
    /// Number of cells.
    #[arg(long)]
    cells: Option<String>,
    /// Domain override `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long)]
    tfinal: Option<String>,
    /// Constant in dt = alpha dx^((k+1)/3).
    #[arg(long)]
    alpha: Option<String>,
    /// Fixed time step, overriding the alpha rule.
    #[arg(long)]
    dt: Option<String>,
    /// Enable the TVB limiter with constant M.
    #[arg(long)]
    limiter: Option<String>,
    /// Limit u instead of w for d2/c2.
    #[arg(long)]
    limit_u: bool,
    /// Problem id.
    #[arg(long)]
    problem: Option<String>,
    /// Snapshot times `t1,t2,...`.
    #[arg(long)]
    snapshots: Option<String>,
    /// Relative jitter of interior mesh nodes, in [0, 1).
    #[arg(long)]
    perturb: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Convergence ladder `N1,N2,...`.
    #[arg(long)]
    convergence: Option<String>,
    /// Record diagnostics every this many steps.
    #[arg(long)]
    diag_every: Option<String>,
    /// Verify every linear solve and the auxiliary energy identity.
    #[arg(long)]
    residual_check: bool,
}

impl Cli {
    fn into_map(self) -> Result<ConfigMap, DgError> {
        let mut map = match &self.config {
            Some(path) => read_config_file(path)?,
            None => ConfigMap::new(),
        };
        let pairs = [
            ("scheme", self.scheme),
            ("p", self.p),
            ("degree", self.degree),
            ("cells", self.cells),
            ("domain", self.domain),
            ("tfinal", self.tfinal),
            ("alpha", self.alpha),
            ("dt", self.dt),
            ("limiter", self.limiter),
            ("problem", self.problem),
            ("snapshots", self.snapshots),
            ("perturb", self.perturb),
            ("seed", self.seed),
            ("out", self.out),
            ("convergence", self.convergence),
            ("diag_every", self.diag_every),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
        if self.limit_u {
            map.insert("limit_u".into(), "true".into());
        }
        if self.residual_check {
            map.insert("residual_check".into(), "true".into());
        }
        Ok(map)
    }
}

fn real_main(cli: Cli) -> Result<(), DgError> {
    let (cfg, warnings) = parse_config(&cli.into_map()?)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(ladder) = cfg.convergence.clone() {
        let (report, runs) = run_convergence(&cfg, &ladder)?;
        emit_convergence(&report, &runs, &cfg.out_dir)?;
        print!("{}", report.to_text());
        if let Some(failed) = report.rows.iter().find(|r| r.failure.is_some()) {
            return Err(DgError::RungFailed {
                n_cells: failed.n_cells,
                reason: failed.failure.clone().unwrap_or_default(),
            });
        }
        return Ok(());
    }
    let result = execute(&cfg)?;
    emit_outputs(&result, &cfg.out_dir)?;
    let out = &result.output;
    println!(
        "{} {} N={} k={} p={}: t={} steps={} wall={:.2}s",
        cfg.scheme,
        cfg.problem,
        cfg.n_cells,
        cfg.degree,
        cfg.p,
        out.t,
        out.steps,
        result.wall.as_secs_f64()
    );
    if let Some(e) = result.errors {
        println!("l2 error {:.6e}, linf error {:.6e}", e.l2, e.linf);
    }
    match result.output.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
