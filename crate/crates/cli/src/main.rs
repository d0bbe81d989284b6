use clap::{Args, Parser, Subcommand};
use stairlam_cli::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "stairlam", version, about = "Staircase laminates and their convex-integration maps")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Exponent of the equation; overrides the config file.
    #[arg(long)]
    p: Option<f64>,
    /// Flat JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of levels; overrides the config file.
    #[arg(long)]
    levels: Option<usize>,
    /// Accept p = 2 as a diagnostic run.
    #[arg(long)]
    allow_p2: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Resolve c, t0, I and eps and print the model.
    Params(Common),
    /// Run the check battery; nonzero exit on any failure.
    Verify(Common),
    /// Build the maps level by level.
    Build {
        #[command(flatten)]
        common: Common,
        /// Build even if the check battery fails.
        #[arg(long)]
        force: bool,
        /// Continue a run in the output directory after its last completed level.
        #[arg(long)]
        resume: bool,
    },
    /// Tables and rasters for a completed run.
    Report {
        /// Run directory; defaults to --out.
        run_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if c.p.is_some() {
        cfg.p = c.p;
    }
    if c.out.is_some() {
        cfg.output_dir = c.out.clone();
    }
    if c.levels.is_some() {
        cfg.levels = c.levels;
    }
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn save_json<T: serde::Serialize>(dir: Option<&Path>, name: &str, v: &T) -> Result<(), CliError> {
    if let Some(d) = dir {
        write_atomic(&d.join(name), &serde_json::to_vec_pretty(v)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Params(c) => {
            let cfg = config(&c)?;
            let r = cmd_params(&resolve(&cfg, c.allow_p2)?);
            eprintln!("G_p on [c, 2c]: [{:.6}, {:.6}], threshold {}", r.g_bounds.0, r.g_bounds.1, r.threshold);
            save_json(cfg.output_dir.as_deref(), "params.json", &r)?;
            print_json(&r)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(c) => {
            let cfg = config(&c)?;
            let r = resolve(&cfg, c.allow_p2)?;
            let b = cmd_verify(&r)?;
            save_json(cfg.output_dir.as_deref(), "verify.json", &b)?;
            for f in &b.failures {
                eprintln!("FAIL {f}");
            }
            println!("{} (I = {})", if b.pass() { "verify: pass" } else { "verify: FAIL" }, r.model.i_start);
            Ok(if b.pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Build { common, force, resume } => {
            let cfg = config(&common)?;
            let out = cfg
                .output_dir
                .clone()
                .ok_or_else(|| CliError::Config("build needs --out or output_dir".into()))?;
            let r = resolve(&cfg, common.allow_p2)?;
            let b = cmd_build(&r, &out, force, resume)?;
            for l in &b.manifest.levels {
                let f = l.audit.failures();
                println!(
                    "level {}: {} cells, delta {:e}, audit {}",
                    l.n,
                    l.cell_count,
                    l.delta,
                    if f.is_empty() { "ok".to_string() } else { f.join("; ") }
                );
            }
            match &b.manifest.stopped {
                Some(s) => {
                    eprintln!("stopped at {s}");
                    Ok(ExitCode::from(1))
                }
                None => Ok(ExitCode::SUCCESS),
            }
        }
        Cmd::Report { run_dir, out } => {
            let dir = run_dir.or(out).ok_or_else(|| CliError::Config("report needs a run directory".into()))?;
            let r = cmd_report(&dir)?;
            for (n, lo, hi, ok) in &r.m12 {
                println!("level {n}: m12 in [{lo:.4}, {hi:.4}] {}", if *ok { "ok" } else { "OUT OF RANGE" });
            }
            println!("tables written to {}", dir.join("report").display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
