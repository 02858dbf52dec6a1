use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use dephcap::sweep::{parse_n_list, run_sweep, Model, SweepConfig, SweepRange};
use dephcap::verify::{run_verify, Suite};
use dephcap::{Error, Result};

/// Coherent information and capacity curves for dephasing channels with memory.
#[derive(Debug, Parser)]
#[command(name = "dephcap", version)]
struct Cli {
    /// TOML sweep description; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// markov or spinboson.
    #[arg(long)]
    model: Option<Model>,

    /// Swept parameter as name:lo:hi:count, e.g. mu:0:1:101 or xi:0.05:1:20.
    #[arg(long)]
    sweep: Option<SweepRange>,

    /// Comma-separated numbers of uses; `inf` gives the capacity (markov only).
    #[arg(long)]
    n_list: Option<String>,

    /// Fixed model parameter, repeatable: p0, pz, mu, lambda, tau_c, tau_p.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,

    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Evaluate the bath integral by quadrature with this absolute tolerance.
    #[arg(long)]
    quadrature_tol: Option<f64>,

    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot_stub: bool,

    /// Run a property suite instead of a sweep: markov, spinboson, channel or all.
    #[arg(long)]
    verify: Option<Suite>,

    /// Seed for randomized property checks.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("'{s}' is not KEY=VALUE"))?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("'{value}' is not a number"))?;
    Ok((key.trim().to_string(), value))
}

fn build_config(cli: &Cli) -> Result<SweepConfig> {
    let mut cfg = match (&cli.config, cli.model) {
        (Some(path), _) => SweepConfig::load(path)?,
        (None, Some(model)) => SweepConfig::default_for(model),
        (None, None) => {
            return Err(Error::Config(
                "give --model, --config or --verify (see --help)".into(),
            ))
        }
    };
    if let Some(model) = cli.model {
        if model != cfg.model {
            let defaults = SweepConfig::default_for(model);
            cfg.model = model;
            cfg.params = defaults.params;
            cfg.sweep = defaults.sweep;
            cfg.n_list = defaults.n_list;
        }
    }
    if let Some(sweep) = &cli.sweep {
        cfg.sweep = sweep.clone();
    }
    if let Some(n_list) = &cli.n_list {
        cfg.n_list = parse_n_list(n_list)?;
    }
    for (key, value) in &cli.params {
        cfg.params.insert(key.clone(), *value);
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.quadrature_tol.is_some() {
        cfg.quadrature_tol = cli.quadrature_tol;
    }
    cfg.gnuplot_stub |= cli.gnuplot_stub;
    if cfg.gnuplot_stub && cfg.out.is_none() {
        return Err(Error::Config("--gnuplot-stub needs --out".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn io_error(e: io::Error) -> Error {
    Error::Config(format!("i/o: {e}"))
}

fn sweep(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    let table = run_sweep(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(io_error)?;
            let mut w = BufWriter::new(file);
            table.write_csv(&mut w).map_err(io_error)?;
            w.flush().map_err(io_error)?;
            if cfg.gnuplot_stub {
                let script = path.with_extension("gp");
                std::fs::write(&script, table.gnuplot_script(path)).map_err(io_error)?;
            }
        }
        None => table.write_csv(io::stdout().lock()).map_err(io_error)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::FAILURE,
            };
        }
    };

    if let Some(suite) = cli.verify {
        return match run_verify(suite, cli.seed.unwrap_or(0)) {
            Ok(report) => {
                if let Err(e) = report.write_json_lines(io::stdout().lock()) {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
                let failed: Vec<&str> = report.failures().map(|r| r.property).collect();
                if failed.is_empty() {
                    eprintln!("{} properties passed", report.results.len());
                    ExitCode::SUCCESS
                } else {
                    eprintln!("failed: {}", failed.join(", "));
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        };
    }

    match sweep(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
