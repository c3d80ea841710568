//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::metrics::Metrics;
use crate::output::{emit_outputs, Manifest, SWEEP_CSV};
use crate::records::read_records;
use crate::reference::ReferenceCurve;
use crate::runner::{execute, Command};

pub const THREADS_ENV: &str = "DIMERLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dimerlab", version, about = "Spin-dimer quantum battery laboratory")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON config file, or `default` for the built-in settings.
    #[arg(long, global = true, default_value = "default")]
    pub config: String,
    /// Override the master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Switch gate noise on (Table 1 unless the config carries a model) or off.
    #[arg(long, global = true)]
    pub noise: Option<Switch>,
    /// Worker threads; defaults to $DIMERLAB_THREADS, then all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Exact thermal curves.
    Oracle,
    /// Variational sweep over the temperature grid.
    Vqt,
    /// Extraction protocol over oracle or VQT states.
    Extract,
    /// Metrics of a sweep CSV against a reference curve.
    Compare {
        /// Sweep to score; defaults to <out>/sweep.csv.
        #[arg(long)]
        sim: Option<PathBuf>,
        /// `T_K,ergotropy_norm` CSV; defaults to the oracle curve for the config.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Label for the reference in the report.
        #[arg(long)]
        source: Option<String>,
    },
    /// Print the resolved noise model.
    NoiseInfo,
    /// Re-run the command recorded in a manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn resolve_config(g: &GlobalArgs) -> LabResult<RunConfig> {
    let mut cfg = RunConfig::load(&g.config)?;
    apply_overrides(&mut cfg, g);
    cfg.validate()?;
    Ok(cfg)
}

fn apply_overrides(cfg: &mut RunConfig, g: &GlobalArgs) {
    if let Some(seed) = g.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.output_dir = out.clone();
    }
    if let Some(n) = g.noise {
        cfg.set_noise(n == Switch::On);
    }
}

fn thread_count(flag: Option<usize>) -> LabResult<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| LabError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
            Err(_) => 0,
        },
    };
    if flag == Some(0) {
        return Err(LabError::Config("--threads must be at least 1".into()));
    }
    Ok(n)
}

fn run_sweep(command: Command, cfg: &RunConfig, threads: usize, out: &mut (dyn Write + Send)) -> LabResult<()> {
    let run = execute(command, cfg)?;
    let files = emit_outputs(&cfg.output_dir, &run, threads)?;
    let _ = writeln!(out, "{} sweep: {} points, {:.2} s", command.as_str(), run.records.len(), run.wall_time_s);
    report_metrics(&run.metrics, out);
    for f in files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(())
}

fn report_metrics(m: &Metrics, out: &mut (dyn Write + Send)) {
    if let (Some(e), Some(src)) = (m.avg_error_accumulation, &m.reference_source) {
        let _ = writeln!(out, "avg_error_accumulation vs {src}: {e:.6}");
    }
    if let Some(n) = m.avg_function_evaluations {
        let _ = writeln!(out, "avg_function_evaluations: {n:.1}");
    }
    if let Some(p) = m.low_t_populations {
        let _ = writeln!(out, "mean populations below 100 K: {:.4} {:.4} {:.4} {:.4}", p[0], p[1], p[2], p[3]);
    }
}

fn dispatch(cli: Cli, out: &mut (dyn Write + Send)) -> LabResult<()> {
    let threads = thread_count(cli.global.threads)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| LabError::Config(e.to_string()))?;
    let used = pool.current_num_threads();
    pool.install(|| match cli.command {
        Cmd::Oracle => run_sweep(Command::Oracle, &resolve_config(&cli.global)?, used, out),
        Cmd::Vqt => run_sweep(Command::Vqt, &resolve_config(&cli.global)?, used, out),
        Cmd::Extract => run_sweep(Command::Extract, &resolve_config(&cli.global)?, used, out),
        Cmd::Rerun { manifest } => {
            let m = Manifest::read(&manifest)?;
            let mut cfg = m.config;
            apply_overrides(&mut cfg, &cli.global);
            run_sweep(m.command, &cfg, used, out)
        }
        Cmd::Compare { sim, reference, source } => {
            let cfg = resolve_config(&cli.global)?;
            let sim_path = sim.unwrap_or_else(|| cfg.output_dir.join(SWEEP_CSV));
            let records = read_records(&sim_path)?;
            let curve = match reference {
                Some(path) => ReferenceCurve::read(&path, source.as_deref())?,
                None => {
                    let grid: Vec<f64> = records.iter().map(|r| r.t_k).collect();
                    let mut c = ReferenceCurve::oracle(&cfg.dimer, &grid)?;
                    if let Some(s) = source {
                        c.source = s;
                    }
                    c
                }
            };
            let metrics = Metrics::collect(Some(&curve), &records)?;
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&metrics)?);
            Ok(())
        }
        Cmd::NoiseInfo => {
            let cfg = resolve_config(&cli.global)?;
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&cfg.noise.resolve())?);
            Ok(())
        }
    })
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
