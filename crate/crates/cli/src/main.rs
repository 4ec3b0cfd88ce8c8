use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use spectral_transfer::experiments::{run_table, stability_report, Experiment, ExperimentConfig, Table};
use spectral_transfer::stability::BoundReport;
use spectral_transfer::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Runs one experiment and writes its table (or bound report) to a file.
#[derive(Parser, Debug)]
#[command(name = "spectral-transfer", version)]
struct Cli {
    /// exp-scaling, exp-collapse, exp-circle, exp-molecule, exp-negative or stability-report.
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to json for a `.json` output path and csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, env = "SPECTRAL_TRANSFER_THREADS")]
    threads: Option<usize>,
}

enum Output {
    Table(Table),
    Report(BoundReport),
}

enum Failure {
    Config(String),
    Numerical(String),
    Write(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn load_config(cli: &Cli, experiment: Experiment) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::from_path(&cli.config)?;
    match config.experiment {
        Some(e) if e != experiment => {
            return Err(Failure::Config(format!(
                "{}: config is for {e}, not {experiment}",
                cli.config.display()
            )))
        }
        _ => config.experiment = Some(experiment),
    }
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    Ok(config)
}

fn run(experiment: Experiment, config: &ExperimentConfig, format: Format) -> Result<Output, Failure> {
    if experiment != Experiment::StabilityReport {
        return Ok(Output::Table(run_table(experiment, config)?));
    }
    let report = stability_report(config)?;
    if format == Format::Json {
        return Ok(Output::Report(report));
    }
    let rows = report
        .layers
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i as f64, c.b, c.l, c.r])
        .collect();
    Ok(Output::Table(Table {
        experiment: experiment.name().into(),
        schema: experiment.schema(),
        seed: report.seeds.first().copied().unwrap_or_else(|| config.seed()),
        columns: experiment.columns().iter().map(|s| s.to_string()).collect(),
        rows,
    }))
}

fn write_csv(out: &mut impl Write, table: &Table) -> std::io::Result<()> {
    writeln!(out, "# schema: {} seed={}", table.schema, table.seed)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()
}

fn write_output(path: &Path, output: &Output, format: Format) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match (output, format) {
        (Output::Table(t), Format::Csv) => write_csv(&mut out, t)?,
        (Output::Table(t), Format::Json) => serde_json::to_writer_pretty(&mut out, t)?,
        (Output::Report(r), _) => serde_json::to_writer_pretty(&mut out, r)?,
    }
    if format == Format::Json {
        writeln!(out)?;
    }
    out.flush()
}

fn main_inner(cli: Cli) -> Result<(), Failure> {
    let experiment: Experiment = cli.experiment.parse()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("SPECTRAL_TRANSFER_THREADS: {e}")))?;
    }
    let format = cli.format.unwrap_or_else(|| match cli.out.extension() {
        Some(ext) if ext == "json" => Format::Json,
        _ => Format::Csv,
    });
    let config = load_config(&cli, experiment)?;
    let output = run(experiment, &config, format)?;
    write_output(&cli.out, &output, format).map_err(|e| Failure::Write(format!("{}: {e}", cli.out.display())))
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Write(msg)) => {
            eprintln!("cannot write output: {msg}");
            ExitCode::from(1)
        }
    }
}
