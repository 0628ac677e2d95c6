use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracpq::config::Value;
use fracpq::criteria::{self, Context};
use fracpq::{artifacts, report, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "fracpq", version, about = "Fractional (p,q)-Laplacian experiments on intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Dirichlet problem with the configured source.
    Solve(Common),
    /// Solve the singular problem along the ε-schedule.
    Singular(Common),
    /// Check the barrier supersolution and q-boundedness statements.
    Barrier(Common),
    /// Run the maximum/comparison/Caccioppoli principle checks.
    Principles(Common),
    /// Fit the boundary exponent of the regular or singular solution.
    Exponent(Common),
    /// Run one sub-experiment per value of `sweep.key`.
    Sweep(Common),
    /// Run every acceptance criterion and write report.md.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exponent fit window in distance units, `LO:HI`.
    #[arg(long, value_name = "LO:HI")]
    fit_window: Option<String>,
    /// Interior node count (overrides `grid.n`).
    #[arg(long, value_name = "N")]
    resolution_override: Option<usize>,
}

fn configure(common: &Common, kind: Option<ExperimentKind>) -> fracpq::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(kind) = kind {
        cfg.set("experiment.kind", Value::Str(kind.as_str().into()))?;
    }
    if let Some(out) = &common.out {
        cfg.set("out_dir", Value::Str(out.to_string_lossy().into_owned()))?;
    }
    if let Some(seed) = common.seed {
        let seed = i64::try_from(seed).map_err(|_| fracpq::Error::config("seed", "too large"))?;
        cfg.set("seed", Value::Int(seed))?;
    }
    if let Some(n) = common.resolution_override {
        cfg.set("grid.n", Value::Int(n as i64))?;
    }
    if let Some(window) = &common.fit_window {
        let (lo, hi) = window
            .split_once(':')
            .ok_or_else(|| fracpq::Error::config("fit.d_lo", format!("expected LO:HI, got `{window}`")))?;
        cfg.set_text("fit.d_lo", lo)?;
        cfg.set_text("fit.d_hi", hi)?;
    }
    Ok(cfg)
}

fn run_experiment(common: &Common, kind: ExperimentKind) -> fracpq::Result<bool> {
    let settings = configure(common, Some(kind))?.resolve()?;
    let outcome = fracpq::run(&settings)?;
    for v in &outcome.verdicts {
        println!("{:<48} {:<6} margin {:.3e}", v.name, artifacts::passed_field(v.outcome), v.margin);
    }
    for (kind, fit) in &outcome.fits {
        println!("{kind} exponent {:.4} (r² {:.4})", fit.exponent, fit.r_squared);
    }
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    println!("wrote {} files to {}", outcome.files.len(), outcome.out_dir.display());
    Ok(outcome.success())
}

fn run_report(common: &Common) -> fracpq::Result<bool> {
    let cfg = configure(common, None)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| fracpq::Error::Io { path: out.clone(), source: e })?;
    let ctx = Context::new(out.join("criteria"));
    let mut results = Vec::new();
    for id in 1..=criteria::COUNT {
        let r = criteria::run(id, &ctx);
        println!("{}", r.line());
        results.push(r);
    }
    let path = out.join(report::RUN_REPORT);
    artifacts::write_text(&path, &report::criteria_report(&results))?;
    println!("wrote {}", path.display());
    Ok(results.iter().all(|r| r.passed))
}

fn apply_thread_cap() {
    if let Ok(v) = std::env::var("FRACPQ_THREADS") {
        if v.trim().parse::<usize>().map_or(true, |n| n == 0) {
            eprintln!("warning: ignoring FRACPQ_THREADS={v}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    apply_thread_cap();
    let result = match &cli.command {
        Command::Solve(c) => run_experiment(c, ExperimentKind::Solve),
        Command::Singular(c) => run_experiment(c, ExperimentKind::Singular),
        Command::Barrier(c) => run_experiment(c, ExperimentKind::Barrier),
        Command::Principles(c) => run_experiment(c, ExperimentKind::Principles),
        Command::Exponent(c) => run_experiment(c, ExperimentKind::Exponent),
        Command::Sweep(c) => run_experiment(c, ExperimentKind::Sweep),
        Command::Report(c) => run_report(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
