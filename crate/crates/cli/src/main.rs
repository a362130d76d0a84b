//! `pdmcs`: coherent states of the position-dependent-mass oscillator from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical failure.

mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use pdmcs_core::coherent::mean_xbar;
use pdmcs_core::oracle::validate_spectrum;
use pdmcs_core::squeeze::{run_sweep, write_sweep_csv};
use pdmcs_core::verify::{self, Fault, Status, VerifyOptions};
use pdmcs_core::wigner::{default_axes, wigner_diagnostics, wigner_transform};
use pdmcs_core::{coherent_state, evolve, moments, Axis, Complex64, Error, MassProfile, MomentReport, SweepSpec};
use serde::Serialize;
use serde_json::json;

use config::{Format, RunArgs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    VerifyFailed(usize),
}

impl CliError {
    fn usage(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical() || matches!(e, Error::State(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::VerifyFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(Error::Json(e))
    }
}

#[derive(Parser)]
#[command(name = "pdmcs", version, about = "Coherent states of the position-dependent-mass harmonic oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a coherent state (and optionally its evolution) with its moment report.
    State(RunArgs),
    /// Run a squeezing sweep described by a spec file.
    Sweep(SweepArgs),
    /// Wigner function of a coherent state on a phase-space grid.
    Wigner(WignerArgs),
    /// Finite-difference spectrum compared with the analytic eigenstates.
    Oracle(OracleArgs),
    /// Run the invariant battery.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep spec file (`family`, `alphas`, `z`, ... as `key = value`).
    spec: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Also write the grid as a whitespace matrix (`wigner.mat`).
    #[arg(long)]
    matrix: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = -10.0)]
    a: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 10.0)]
    b: f64,
    /// Interior grid points.
    #[arg(long = "n", default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    /// Exit 1 unless spacings are 1 ± 2e-3, |E0| < 1e-3 and overlaps exceed 0.9999 (n ≤ 3).
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only one module's invariants.
    #[arg(long)]
    module: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::State(a) => cmd_state(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Wigner(a) => cmd_wigner(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdmcs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn meta(stamp: bool) -> serde_json::Value {
    let mut m = json!({ "tool": "pdmcs", "version": env!("CARGO_PKG_VERSION") });
    if stamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        m["unix_time"] = json!(secs);
    }
    m
}

fn profile_json(p: &MassProfile) -> serde_json::Value {
    json!({ "family": p.family(), "alpha": p.alpha(), "label": p.label() })
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn grid_values(spec: Option<(f64, f64, usize)>, default: (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
    let (a, b, n) = spec.unwrap_or(default);
    Ok(Axis::linspace(a, b, n)?.values())
}

#[derive(Serialize)]
struct Samples {
    x: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn write_samples(psi: &pdmcs_core::Wavefunction, grid: &[f64], dir: &Path, stem: &str, format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = create(&dir.join(format!("{stem}.csv")))?;
            psi.write_csv(grid, &mut w)?;
            w.flush()?;
        }
        Format::Json => {
            let vals: Vec<Complex64> = grid.iter().map(|&x| psi.value(x)).collect();
            let s = Samples {
                x: grid.to_vec(),
                re: vals.iter().map(|v| v.re).collect(),
                im: vals.iter().map(|v| v.im).collect(),
            };
            write_json(&dir.join(format!("{stem}.json")), &s)?;
        }
    }
    Ok(())
}

fn cmd_state(args: &RunArgs) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let dir = out_dir(&cfg)?;
    let (qa, qb) = cfg.quad.domain;
    let grid = grid_values(cfg.x_grid, (qa, qb, 481))?;

    let psi = coherent_state(&cfg.profile, cfg.z)?;
    write_samples(&psi, &grid, &dir, "state", cfg.format)?;
    let report: MomentReport = moments(&psi, &cfg.quad)?;
    let xbar = mean_xbar(&psi, &cfg.quad)?;

    let mut doc = json!({
        "profile": profile_json(&cfg.profile),
        "z": [cfg.z.re, cfg.z.im],
        "moments": report,
        "mean_xbar": xbar,
        "meta": meta(cfg.stamp),
    });
    if let Some(t) = cfg.t {
        let evolved = evolve(&cfg.profile, cfg.z, t)?;
        write_samples(&evolved, &grid, &dir, "state_t", cfg.format)?;
        let rotated = cfg.z * Complex64::from_polar(1.0, -t);
        doc["evolved"] = json!({
            "t": t,
            "moments": moments(&evolved, &cfg.quad)?,
            "mean_xbar": mean_xbar(&evolved, &cfg.quad)?,
            "expected_mean_xbar": 2.0 * rotated.re,
        });
    }
    write_json(&dir.join("report.json"), &doc)?;
    println!(
        "{}: var_x = {:.10}, var_p = {:.10}, product = {:.10}, <x̄> = {:.10}",
        psi.label(),
        report.var_x,
        report.var_p,
        report.product,
        xbar
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Usage(format!("cannot read sweep spec {}: {e}", args.spec.display())))?;
    let mut spec = SweepSpec::parse(&text).map_err(CliError::usage)?;
    if let Some(v) = args.abs_tol {
        spec.cfg.abs_tol = v;
    }
    if let Some(v) = args.rel_tol {
        spec.cfg.rel_tol = v;
    }
    spec.validate().map_err(CliError::usage)?;
    let rows = run_sweep(&spec)?;

    let mut sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Csv => write_sweep_csv(&rows, &mut sink)?,
        Format::Json => {
            let list: Vec<_> = rows
                .iter()
                .map(|r| match &r.report {
                    Ok(m) => json!({ "family": r.family, "alpha": r.alpha, "z": [r.z.re, r.z.im], "report": m }),
                    Err(e) => json!({ "family": r.family, "alpha": r.alpha, "z": [r.z.re, r.z.im], "error": e }),
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &list)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;

    let failed = rows.iter().filter(|r| r.report.is_err()).count();
    if failed > 0 {
        return Err(CliError::Core(Error::Numerical {
            msg: format!("{failed} of {} sweep cells failed", rows.len()),
            estimate: f64::NAN,
            achieved: f64::NAN,
        }));
    }
    Ok(())
}

fn cmd_wigner(args: &WignerArgs) -> Result<(), CliError> {
    let cfg = args.run.resolve()?;
    let dir = out_dir(&cfg)?;
    let (psi, label_z) = match cfg.t {
        Some(t) => (evolve(&cfg.profile, cfg.z, t)?, cfg.z * Complex64::from_polar(1.0, -t)),
        None => (coherent_state(&cfg.profile, cfg.z)?, cfg.z),
    };
    let (dx, dp) = default_axes(&cfg.profile, label_z)?;
    let x_axis = match cfg.x_grid {
        Some((a, b, n)) => Axis::linspace(a, b, n)?,
        None => dx,
    };
    let p_axis = match cfg.p_grid {
        Some((a, b, n)) => Axis::linspace(a, b, n)?,
        None => dp,
    };
    let grid = wigner_transform(&psi, &x_axis, &p_axis, &cfg.quad)?;
    let diag = wigner_diagnostics(&grid, &psi, &cfg.quad)?;

    match cfg.format {
        Format::Csv => {
            let mut w = create(&dir.join("wigner.csv"))?;
            grid.write_long_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => write_json(&dir.join("wigner.json"), &grid)?,
    }
    if args.matrix {
        let mut w = create(&dir.join("wigner.mat"))?;
        grid.write_matrix(&mut w)?;
        w.flush()?;
    }
    let doc = json!({
        "profile": profile_json(&cfg.profile),
        "z": [cfg.z.re, cfg.z.im],
        "t": cfg.t,
        "diagnostics": diag,
        "meta": meta(cfg.stamp),
    });
    write_json(&dir.join("wigner_diagnostics.json"), &doc)?;
    println!(
        "{}: mass = {:.6}, min W = {:.3e} at ({:.3}, {:.3}), negativity = {}",
        psi.label(),
        diag.total_mass,
        diag.min_value,
        diag.min_location.0,
        diag.min_location.1,
        diag.negative
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let cfg = args.run.resolve()?;
    let report = validate_spectrum(&cfg.profile, args.a, args.b, args.n, args.levels)?;
    let text = report.to_json()?;
    match &cfg.out {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    if args.check {
        let spacing = report.spacings().iter().take(5).fold(0.0_f64, |m, s| m.max((s - 1.0).abs()));
        let ground = report.eigenvalues.first().map_or(f64::INFINITY, |e| e.abs());
        let overlap = report.overlaps.iter().take(4).fold(f64::INFINITY, |m, &o| m.min(o));
        let ok = spacing < 2e-3 && ground < 1e-3 && overlap > 0.9999;
        eprintln!(
            "{} max |ΔE − 1| = {spacing:.3e}, |E0| = {ground:.3e}, min overlap = {overlap:.8}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            return Err(CliError::VerifyFailed(1));
        }
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let fault = match &args.inject_fault {
        Some(s) => Some(s.parse::<Fault>().map_err(CliError::usage)?),
        None => None,
    };
    let opts = VerifyOptions {
        module: args.module.clone(),
        fault,
    };
    let outcomes = verify::run(&opts).map_err(CliError::usage)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&outcomes)?),
        Format::Csv => {
            for o in &outcomes {
                println!("{o}");
            }
        }
    }
    let failed = outcomes.iter().filter(|o| o.status == Status::Fail).count();
    let warned = outcomes.iter().filter(|o| o.status == Status::Warn).count();
    eprintln!(
        "{} checks: {} passed, {warned} warned, {failed} failed",
        outcomes.len(),
        outcomes.len() - failed - warned
    );
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}
