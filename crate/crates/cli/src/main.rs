//! `plpcov`: analytic, Monte Carlo, sweep and validation runs from a config file.

mod config;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};

use plpcov::geometry::sample_realization;
use plpcov::validation::{run_all, ValidationConfig};

use config::RunConfig;
use run::{evaluate, write_logs, Mode, Sweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliMode {
    /// Analytic values only.
    Analytic,
    /// Monte Carlo estimates only.
    Mc,
    /// Acceptance checks with PASS/FAIL verdicts.
    Validate,
    /// Analytic and Monte Carlo side by side over a sweep.
    Sweep,
}

#[derive(Debug, Parser)]
#[command(name = "plpcov", version, about = "Coverage of direct and relayed vehicular links on Poisson line road networks")]
struct Cli {
    /// Configuration file (`key = value` lines); built-in defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "analytic")]
    mode: CliMode,

    /// Sweep one variable: VAR:FROM:TO:STEP with VAR one of threshold_db,
    /// lambda_ru, rho, r1.
    #[arg(long)]
    sweep: Option<Sweep>,

    /// CSV destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Monte Carlo drops per point (0 disables the simulation in sweep mode).
    #[arg(long)]
    drops: Option<u64>,

    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,

    /// Write one sampled network (at the run's seed) to this file.
    #[arg(long)]
    dump_realization: Option<PathBuf>,

    /// Write the per-drop relay records to this file.
    #[arg(long)]
    event_log: Option<PathBuf>,

    /// Only errors on standard error; nothing on standard output but CSV.
    #[arg(long)]
    quiet: bool,
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn validate(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<bool> {
    let vc = ValidationConfig {
        seed: cli.seed.unwrap_or(ValidationConfig::default().seed),
        spec: cfg.spec,
        ..Default::default()
    };
    // CSV produced twice by the A7 check, under one and four threads
    let small = RunConfig {
        drops: 2_000,
        batch: 64,
        window_radius: Some(4.0),
        ..cfg.clone()
    };
    let sweep: Sweep = "threshold_db:-2:2:2".parse().map_err(anyhow::Error::msg)?;
    let render = || Ok(evaluate(&small, Some(&sweep), Mode::MonteCarlo).0.into_bytes());
    let verdicts = run_all(&cfg.params, &vc, Some(&render));
    let mut csv = String::from("criterion,title,verdict,seconds,details\n");
    for v in &verdicts {
        if !cli.quiet {
            println!("{v}");
            for d in &v.details {
                println!("    {d}");
            }
        }
        let details = v.details.join(" | ").replace([',', '\n', '"'], " ");
        csv.push_str(&format!("{},{},{},{:.1},{details}\n", v.id, v.title, v.label(), v.seconds));
    }
    if let Some(p) = &cli.out {
        std::fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(verdicts.iter().all(|v| v.outcome != Some(false)))
}

fn main_inner(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = cli.drops {
        cfg.drops = d;
    }
    if let Some(p) = &cli.dump_realization {
        let radius = cfg.window_radius.unwrap_or(3.0);
        let real = sample_realization(&cfg.params, radius, cfg.seed)?;
        let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        real.dump(BufWriter::new(f))?;
    }
    let mode = match cli.mode {
        CliMode::Validate => return validate(&cli, &cfg),
        CliMode::Analytic => Mode::Analytic,
        CliMode::Mc => Mode::MonteCarlo,
        CliMode::Sweep => {
            if cli.sweep.is_none() {
                bail!("--mode sweep needs --sweep VAR:FROM:TO:STEP");
            }
            Mode::Both
        }
    };
    if mode == Mode::MonteCarlo && cfg.drops == 0 {
        bail!("--mode mc needs at least one drop");
    }
    let (csv, recs) = evaluate(&cfg, cli.sweep.as_ref(), mode);
    emit(&cli.out, &csv)?;
    if let Some(p) = &cli.event_log {
        let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        let mut w = BufWriter::new(f);
        write_logs(&recs, &mut w)?;
        w.flush()?;
    }
    if !cli.quiet {
        if let Some(p) = &cli.out {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
