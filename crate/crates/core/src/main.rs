use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use latmod::experiment::{
    emit, emit_tables, emit_trajectory_demo, quantize_bench, report, run_sweep, DemoConfig, ExperimentConfig,
    OutputFormat,
};
use latmod::stats::table1_report;
use latmod::{Error, LatticeKind, Result};

#[derive(Parser)]
#[command(name = "latmod", version, about = "Lattice modulo sampling experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per sweep cell (overrides the config file).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Write results into this directory instead of standard output.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// csv, json or text.
    #[arg(long, global = true, default_value = "text")]
    format: OutputFormat,
    /// Exit with status 2 if any sweep cell reports an error.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo second moments and MSE ratios against the hypercube.
    Table1 {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Recovery-rate sweep from a TOML config or a named preset.
    Sweep {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// table3, table4 or noiseless.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Square and hexagonal folding of a 2D trajectory.
    Demo2d {
        #[arg(long, default_value_t = 6.0)]
        of: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
    },
    /// Matched lattice vs scalar quantizer MSE on cell-uniform inputs.
    QuantizeBench {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
        bits: Vec<u32>,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
    },
    /// Print a preset as TOML, as a starting point for a config file.
    PrintConfig {
        #[arg(long, default_value = "table3")]
        preset: String,
    },
}

fn output(common: &Common, stem: &str, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &common.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{stem}.{}", common.format.extension()));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write(&mut f)?;
            f.flush()?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => write(&mut std::io::stdout().lock()),
    }
}

fn sweep(common: &Common, config: Option<&Path>, preset: Option<&str>) -> Result<bool> {
    let mut cfg = match (config, preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => return Err(Error::Config("give --config FILE or --preset NAME".into())),
    };
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = common.trials {
        cfg.n_trials = t;
    }
    let result = run_sweep(&cfg)?;
    for c in result.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!("cell OF={} {} {}: {}", c.of, c.architecture, c.channel, c.error.as_deref().unwrap_or(""));
    }
    let stem = if cfg.name.is_empty() { "sweep" } else { cfg.name.as_str() };
    match &common.output_dir {
        Some(dir) => {
            let path = emit_tables(&result, dir, stem, common.format)?;
            eprintln!("wrote {}", path.display());
        }
        None => emit(&report::sweep_table(&result), &result, common.format, std::io::stdout().lock())?,
    }
    Ok(result.has_errors())
}

fn run(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    match cli.command {
        Command::Table1 { samples } => {
            let rows = table1_report(samples, c.seed.unwrap_or(1))?;
            output(c, "table1", |w| emit(&report::table1_table(&rows), &rows, c.format, w))?;
            Ok(false)
        }
        Command::Sweep { config, preset } => sweep(c, config.as_deref(), preset.as_deref()),
        Command::Demo2d { of, gamma } => {
            let cfg = DemoConfig { of, gamma, seed: c.seed.unwrap_or(1), ..Default::default() };
            let dir = c.output_dir.clone().unwrap_or_else(|| PathBuf::from("demo2d"));
            let (runs, paths) = emit_trajectory_demo(&cfg, &dir)?;
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            let table = report::Table {
                header: ["lattice", "success", "max_error", "folded_power", "fold_events", "inside_cell"]
                    .map(String::from)
                    .to_vec(),
                rows: runs
                    .iter()
                    .map(|r| {
                        vec![
                            r.lattice.clone(),
                            r.success.to_string(),
                            format!("{:.3e}", r.max_error),
                            format!("{:.4}", r.folded_power),
                            r.fold_events.to_string(),
                            r.inside_cell.to_string(),
                        ]
                    })
                    .collect(),
            };
            emit(&table, &runs, c.format, std::io::stdout().lock())?;
            Ok(false)
        }
        Command::QuantizeBench { samples, bits, lambda } => {
            let lattices =
                [(LatticeKind::Zn, 8), (LatticeKind::A2, 2), (LatticeKind::Dn, 4), (LatticeKind::E8, 8)];
            let rows = quantize_bench(&lattices, &bits, lambda, samples, c.seed.unwrap_or(1))?;
            output(c, "quantize_bench", |w| emit(&report::quant_table(&rows), &rows, c.format, w))?;
            Ok(false)
        }
        Command::PrintConfig { preset } => {
            print!("{}", ExperimentConfig::preset(&preset)?.to_toml_string()?);
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.common.strict;
    match run(cli) {
        Ok(true) if strict => {
            eprintln!("error: one or more cells failed (--strict)");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
