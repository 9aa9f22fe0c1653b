use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use planted::config::ExperimentConfig;
use planted::harness::{read_results, run_sweep, write_plotdata, PlotKind};
use planted::io::{load_observation, save_observation, write_class_table, write_signal};
use planted::reports::{
    cumulant_report, oracle_report, parse_multigraph, parse_prior, parse_rational, pds_params, recover_report,
    stpca_params, RecoverArgs,
};
use planted::verify::{verify_all, Level};
use planted_core::hypertrees::build_class_table;
use planted_core::lowdeg::{LowDegModel, Mode, PdsExact, SparsePcaExact};
use planted_core::models::{sample_pds, sample_sparse_tpca, NoiseMode, Observation, PdsParams, PriorSpec, TpcaParams};

#[derive(Parser)]
#[command(name = "planted", version, about = "Planted hypergraph and tensor recovery with exact low-degree checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Pds,
    Stpca,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an observation and its signal.
    Sample {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        q0: Option<f64>,
        #[arg(long)]
        q1: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        symmetrized: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Observation file; `.txt` writes an edge list, anything else a PLNT container.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        signal: Option<PathBuf>,
    },
    /// Run color-coded recovery on an observation file.
    Recover {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        q0: Option<f64>,
        #[arg(long)]
        q1: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        symmetrized: bool,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_preprocess: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moment system, certificate, correlation and bound tables as JSON.
    Oracle {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        q0: Option<String>,
        #[arg(long)]
        q1: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint cumulant, complexity and envelope of one multigraph.
    Cumulant {
        /// Edges with optional multiplicities, e.g. `0-1:2,1-2`.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "rademacher")]
        prior: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a hypertree class table.
    Classes {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a configured sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the exact verification suites.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: LevelArg,
        #[arg(long)]
        inject_fault: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn sweep results into plot data.
    Plotdata {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "threshold")]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(value: &serde_json::Value, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    match v {
        Some(v) => Ok(v),
        None => bail!("--{name} is required for this model"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sample { model, n, r, rho, q0, q1, lambda, symmetrized, seed, out, signal } => {
            let (obs, sig) = match model {
                ModelArg::Pds => {
                    let p = PdsParams::new(n, r, rho, need(q0, "q0")?, need(q1, "q1")?)?;
                    let (s, h) = sample_pds(&p, seed)?;
                    (Observation::Hypergraph(h), s)
                }
                ModelArg::Stpca => {
                    let mode = if symmetrized { NoiseMode::Symmetrized } else { NoiseMode::NoiseReduced };
                    let p = TpcaParams::new(n, r, need(lambda, "lambda")?, PriorSpec::bernoulli(rho), mode)?;
                    let (s, t) = sample_sparse_tpca(&p, seed)?;
                    (Observation::Tensor(t), s)
                }
            };
            save_observation(&obs, &out)?;
            if let Some(path) = signal {
                write_signal(&sig, fs::File::create(path)?)?;
            }
        }
        Command::Recover { model, input, rho, q0, q1, lambda, symmetrized, eps, ell, trials, seed, no_preprocess, out } => {
            let obs = load_observation(&input)?;
            let (n, r) = (obs.n(), obs.r());
            let params = match model {
                ModelArg::Pds => pds_params(n, r, rho, need(q0, "q0")?, need(q1, "q1")?)?,
                ModelArg::Stpca => stpca_params(n, r, rho, need(lambda, "lambda")?, symmetrized)?,
            };
            let args = RecoverArgs { eps, ell, trials, seed, preprocess: !no_preprocess };
            emit(&recover_report(&obs, &params, &args)?, out.as_ref())?;
        }
        Command::Oracle { model, n, r, d, rho, q0, q1, lambda, mode, out } => {
            let rho = parse_rational(&rho)?;
            let m = match model {
                ModelArg::Pds => LowDegModel::Pds(PdsExact {
                    n,
                    r,
                    rho,
                    q0: parse_rational(&need(q0, "q0")?)?,
                    q1: parse_rational(&need(q1, "q1")?)?,
                }),
                ModelArg::Stpca => LowDegModel::SparsePca(SparsePcaExact {
                    n,
                    r,
                    rho,
                    lambda: parse_rational(&need(lambda, "lambda")?)?,
                }),
            };
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Float => Mode::Float,
            };
            emit(&oracle_report(&m, d, mode)?, out.as_ref())?;
        }
        Command::Cumulant { alpha, prior, lambda, m, n, out } => {
            let report = cumulant_report(&parse_multigraph(&alpha)?, n, m, parse_prior(&prior)?, parse_rational(&lambda)?)?;
            emit(&report, out.as_ref())?;
        }
        Command::Classes { ell, r, out } => {
            let table = build_class_table(ell, r)?;
            write_class_table(&table, fs::File::create(out)?)?;
        }
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text)?;
            let rows = run_sweep(&cfg, &out)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            eprintln!("{} rows written to {}, {failed} failed", rows.len(), out.join(&cfg.output).display());
        }
        Command::Verify { level, inject_fault, out } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let report = verify_all(level, inject_fault);
            for c in &report.checks {
                eprintln!("{} {} ({:.2}s): {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
            }
            emit(&serde_json::to_value(&report)?, out.as_ref())?;
            return Ok(report.passed);
        }
        Command::Plotdata { input, kind, out } => {
            let kind: PlotKind = kind.parse()?;
            let rows = read_results(&input)?;
            let path = out.unwrap_or_else(|| input.with_extension("plot.csv"));
            write_plotdata(&rows, kind, &path)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
