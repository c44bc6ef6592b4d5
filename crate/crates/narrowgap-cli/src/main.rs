//! `narrowgap`: batch front end for solves, ε-sweeps, gap-integral studies
//! and the acceptance suite.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification or invariant
//! failure.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use narrowgap::acceptance::{Suite, SuiteOptions};
use narrowgap::analysis::{
    dirichlet_checks, resolve_phi, structural_checks, sweep, verify_theorems, NamedCheck, SweepTable,
};
use narrowgap::capacity::{gap_integral, reduction_sandwich, verify_claim, GapIntegralSpec, Regime};
use narrowgap::config::ExperimentConfig;
use narrowgap::geometry::Configuration;
use narrowgap::pde::{build_grid, export, gradient_magnitude, Fault, Session};
use narrowgap::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "narrowgap", version, about = "Gradient blow-up between two nearly touching perfect conductors")]
struct Cli {
    /// Worker threads for sweep rows and field kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Overrides `output_dir` of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// What goes to stdout when no output directory is set.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration at a single ε and write the functionals report.
    Solve { config: PathBuf },
    /// Run an ε-sweep, fit the exponents and check the rate theorems.
    Sweep { config: PathBuf },
    /// Check the gap-integral regimes and reduction sandwiches.
    Integrals { config: PathBuf },
    /// Run the built-in acceptance suite and print the pass/fail matrix.
    Verify {
        /// Comma-separated criterion ids; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        /// Corrupt the capacity system to check that the suite notices.
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
        /// Relative quadrature tolerance used by the suite.
        #[arg(long)]
        quad_tol: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    FlipA12,
}

/// A failed run: the exit code and what to say about it.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_invariant_violation() { 2 } else { 1 }, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn verification_failed(what: impl Into<String>) -> Failure {
    Failure { code: 2, message: what.into() }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    verbose: u8,
    out: Option<PathBuf>,
    format: Format,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("narrowgap: {}", msg.as_ref());
        }
    }

    fn output_dir(&self, config: &ExperimentConfig) -> Result<Option<PathBuf>, Failure> {
        let dir = self.out.clone().or_else(|| config.output_dir.clone());
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(dir)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let ctx = Ctx { verbose: cli.verbose, out: cli.out, format: cli.format };
    let outcome = match cli.command {
        Command::Solve { config } => load(&config).and_then(|c| cmd_solve(&ctx, &c)),
        Command::Sweep { config } => load(&config).and_then(|c| cmd_sweep(&ctx, &c)),
        Command::Integrals { config } => load(&config).and_then(|c| cmd_integrals(&ctx, &c)),
        Command::Verify { only, inject_fault, quad_tol } => cmd_verify(&ctx, only, inject_fault, quad_tol),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads(threads: Option<usize>) -> Result<(), String> {
    match threads {
        Some(0) => Err("--threads must be positive".into()),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string()),
        None => Ok(()),
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(threads: Option<usize>) -> Result<(), String> {
    match threads {
        Some(0) => Err("--threads must be positive".into()),
        _ => Ok(()),
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::load(path).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()) })
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()) })
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn cmd_solve(ctx: &Ctx, cfg: &ExperimentConfig) -> Outcome {
    let eps = cfg.single_epsilon()?;
    cfg.h_rule.validate()?;
    let doc = cfg.document(eps);
    let (phi, _) = resolve_phi(&doc, eps, &cfg.phi, &cfg.h_rule, &cfg.sweep_options())?;
    let config = Configuration::from_document(&doc)?;
    let grid = build_grid(&config, &cfg.h_rule.spec(eps))?;
    ctx.log(format!("{} at eps = {eps}: {} nodes", cfg.preset, grid.len()));
    let session = Session::new(&config, &grid, cfg.solver_options())?;
    let (report, u) = session.report_with(&phi.boundary_value(&config)?, Fault::None)?;

    let body = to_json(&json!({ "phi": phi, "report": report }));
    match ctx.output_dir(cfg)? {
        Some(dir) => {
            write_file(&dir.join("report.json"), &body)?;
            if cfg.dumps.csv {
                export::write_csv(&grid, &u, BufWriter::new(File::create(dir.join("field.csv"))?))?;
            }
            if cfg.dumps.binary {
                export::write_binary(&grid, &u, BufWriter::new(File::create(dir.join("field.bin"))?))?;
            }
            if cfg.dumps.svg {
                let mag = gradient_magnitude(&grid, &u)?;
                export::write_svg(&grid, &mag, BufWriter::new(File::create(dir.join("grad_u.svg"))?))?;
            }
            ctx.log(format!("wrote {}", dir.display()));
        }
        None => print!("{body}"),
    }
    let failed = report.failed_checks();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(verification_failed(format!("invariant checks failed: {}", failed.join(", "))))
    }
}

fn cmd_sweep(ctx: &Ctx, cfg: &ExperimentConfig) -> Outcome {
    ctx.log(format!("sweeping {} over {} epsilons", cfg.preset, cfg.eps_list.len()));
    let top = cfg.eps_list.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let table = sweep(&cfg.document(top), &cfg.eps_list, &cfg.phi, &cfg.h_rule, &cfg.sweep_options())?;
    let theorems = verify_theorems(&table, table.gamma, cfg.tolerances.exponent)?;
    let mut checks = structural_checks(&table);
    checks.extend(dirichlet_checks(&table));
    let pass = theorems.pass && checks.iter().all(|c| c.pass);
    let summary = sweep_summary(&table, &theorems, &checks, pass);

    let csv = table.to_csv();
    match ctx.output_dir(cfg)? {
        Some(dir) => {
            write_file(&dir.join("sweep.csv"), &csv)?;
            write_file(&dir.join("summary.json"), &summary)?;
            ctx.log(format!("wrote {}", dir.display()));
        }
        None => match ctx.format {
            Format::Csv => print!("{csv}"),
            Format::Json => print!("{summary}"),
        },
    }
    for n in &theorems.notes {
        ctx.log(n);
    }
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(verification_failed(format!(
            "sweep verification failed (theorem check {}; failed checks: [{}])",
            if theorems.pass { "passed" } else { "failed" },
            failed.join(", ")
        )))
    }
}

fn sweep_summary(
    table: &SweepTable,
    theorems: &narrowgap::analysis::TheoremReport,
    checks: &[NamedCheck],
    pass: bool,
) -> String {
    let sup_exponent = theorems.sup_fit.as_ref().map(|f| f.exponent);
    let energy_exponent = theorems.energy_fit.as_ref().map(|f| f.exponent);
    to_json(&json!({
        "preset": table.base.preset,
        "phi": table.phi_id,
        "gamma": table.gamma,
        "sup_exponent": sup_exponent,
        "energy_exponent": energy_exponent,
        "search": table.search,
        "theorems": theorems,
        "checks": checks,
        "flagged_rows": table.rows.iter().filter(|r| r.is_flagged()).map(|r| r.epsilon).collect::<Vec<_>>(),
        "pass": pass,
    }))
}

fn cmd_integrals(ctx: &Ctx, cfg: &ExperimentConfig) -> Outcome {
    let tol = cfg.tolerances.quadrature;
    let mut csv = String::from("orders,n,r,epsilon,integral,predicted,ratio,lower,upper,sandwich\n");
    let mut ok = true;
    let mut summary = Vec::new();
    for study in cfg.integral_studies()? {
        let orders = study.orders.to_string();
        let gamma = study.orders.gamma();
        ctx.log(format!("orders ({orders}) n = {}: gamma = {gamma}", study.n));
        let sandwiches = gamma > 0.0;
        let bound = if sandwiches {
            Some(verify_claim(&study.orders, study.r, study.n, &study.eps_list, study.factor, tol)?)
        } else {
            None
        };
        let mut exact_ok = true;
        for &eps in &study.eps_list {
            let integral = gap_integral(&GapIntegralSpec::new(study.orders.clone(), study.r, study.n, eps)?, tol)?;
            let predicted = Regime::of(gamma).predicted(gamma, eps);
            let (lower, upper, holds) = if sandwiches {
                let s = reduction_sandwich(&study.orders, study.r, study.n, eps, tol)?;
                (s.lower, s.upper, s.holds)
            } else {
                // No finite direction: I(ε) = (2r)^{n-1}/ε exactly.
                let exact = (2.0 * study.r).powi(study.n as i32 - 1) / eps;
                let holds = (integral - exact).abs() <= 1e-10 * exact;
                exact_ok &= holds;
                (exact, exact, holds)
            };
            ok &= holds;
            csv.push_str(&format!(
                "\"{orders}\",{},{:e},{eps:e},{integral:e},{predicted:e},{:e},{lower:e},{upper:e},{holds}\n",
                study.n,
                study.r,
                integral / predicted
            ));
        }
        let regime_ok = bound.as_ref().map_or(exact_ok, |b| b.success);
        ok &= regime_ok;
        summary.push(json!({
            "orders": study.orders,
            "n": study.n,
            "gamma": gamma,
            "regime": Regime::of(gamma),
            "bound": bound,
            "pass": regime_ok,
        }));
    }
    let body = to_json(&json!({ "studies": summary, "pass": ok }));
    match ctx.output_dir(cfg)? {
        Some(dir) => {
            write_file(&dir.join("integrals.csv"), &csv)?;
            write_file(&dir.join("integrals.json"), &body)?;
        }
        None => match ctx.format {
            Format::Csv => print!("{csv}"),
            Format::Json => print!("{body}"),
        },
    }
    if ok {
        Ok(())
    } else {
        Err(verification_failed("a regime window or reduction sandwich failed"))
    }
}

fn cmd_verify(ctx: &Ctx, only: Option<Vec<String>>, fault: Option<FaultArg>, quad_tol: Option<f64>) -> Outcome {
    let mut opts = SuiteOptions::default();
    if let Some(FaultArg::FlipA12) = fault {
        opts.fault = Fault::FlipA12;
    }
    if let Some(t) = quad_tol {
        opts.quad_tol = t;
    }
    let suite = Suite::new(opts);
    let ids: Vec<String> = match only {
        Some(list) => list,
        None => narrowgap::acceptance::IDS.iter().map(|s| s.to_string()).collect(),
    };
    let mut failed = Vec::new();
    let stdout = std::io::stdout();
    for id in &ids {
        ctx.log(format!("criterion {id}"));
        let r = suite.run(id)?;
        let mut out = stdout.lock();
        writeln!(out, "{r}")?;
        out.flush()?;
        if !r.pass {
            failed.push(r.id);
        }
    }
    println!("{}/{} criteria passed", ids.len() - failed.len(), ids.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(verification_failed(format!("failed criteria: {}", failed.join(", "))))
    }
}
