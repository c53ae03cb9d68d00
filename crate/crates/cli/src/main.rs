//! `qwalk`: run disordered quantum-walk experiments from JSON configs.

mod config;
mod figures;
mod output;
mod plot;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qwalk::analysis::{fit_power_law, windowed_alpha};

use config::{Format, RunConfig};
use figures::Figure;
use output::{parse_semantics, sha256_hex, Artifacts, Cell, Manifest};
use run::{alpha_table, fit_table, Plot};

const CSV_HELP: &str = "\
CSV outputs start with `#` provenance lines (software version, command, config
SHA-256, master seed, disorder semantics, full config), then a header row, then
numeric rows:
  qfi:          t,qfi_mean,qfi_stderr
  variance:     t,variance
  distribution: t,x,probability   (x in absolute lattice coordinates)
  alpha:        t_center,alpha
  fit:          t_min,t_max,alpha,amplitude,residual

Exit codes: 0 success, 2 configuration error, 3 runtime error.";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Core(#[from] qwalk::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Core(qwalk::Error::InvalidRange { .. } | qwalk::Error::InvalidWindow { .. }) => 2,
            _ => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Disordered quantum walks: QFI, spreading and fits", after_help = CSV_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    #[command(after_help = CSV_HELP)]
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `output.format`.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Also write SVG plots.
        #[arg(long)]
        plot: bool,
    },
    /// Regenerate the data and plots behind a figure.
    #[command(after_help = CSV_HELP)]
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        /// 10^4 maps per panel instead of 10^3.
        #[arg(long)]
        paper_scale: bool,
        #[arg(long, default_value_t = figures::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Defaults to `figures/<figure>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a power law to a two-column series (first column t).
    #[command(after_help = CSV_HELP)]
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        t_min: usize,
        #[arg(long)]
        t_max: usize,
        /// Also compute the windowed exponent with this width.
        #[arg(long)]
        window: Option<usize>,
        /// Value column; defaults to the second column.
        #[arg(long)]
        column: Option<String>,
        /// Write fit.csv (and alpha.csv) here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn check_workers(workers: Option<usize>) -> Result<(), CliError> {
    if workers == Some(0) {
        return Err(CliError::Config("field `workers`: must be at least 1".to_string()));
    }
    Ok(())
}

fn simulate(
    path: &Path,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    plot: bool,
) -> Result<(), CliError> {
    check_workers(workers)?;
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(out) = out {
        config.output.path = out;
    }
    if let Some(format) = format {
        config.output.format = format;
    }
    config.output.plot |= plot;

    let outcome = run::execute(&config, workers)?;
    let manifest = Manifest::new(
        "simulate",
        &config,
        Some(config.master_seed),
        Some(config.disorder.semantics),
    );
    let mut artifacts = Artifacts::create(&config.output.path)?;
    match config.output.format {
        Format::Csv => artifacts.write_tables_csv(&outcome.tables, &manifest)?,
        Format::Json => artifacts.write_tables_json("results.json", &outcome.tables, &manifest)?,
    }
    if config.output.plot {
        for (stem, plot) in &outcome.plots {
            let svg = match plot {
                Plot::Line(p) => p.render(&manifest),
                Plot::Heat(h) => h.render(&manifest),
            };
            artifacts.write(&format!("{stem}.svg"), svg.as_bytes())?;
        }
    }
    artifacts.write_json("manifest.json", &manifest)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    report(&artifacts);
    Ok(())
}

fn report(artifacts: &Artifacts) {
    for path in artifacts.written() {
        println!("wrote {}", path.display());
    }
}

fn reproduce(
    figure: Figure,
    paper_scale: bool,
    seed: u64,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    check_workers(workers)?;
    let preset = figures::preset(figure, paper_scale, seed);
    let dir = out.unwrap_or_else(|| Path::new("figures").join(figure.name()));
    let mut artifacts = Artifacts::create(&dir)?;
    for line in figures::reproduce(&preset, workers, &mut artifacts)? {
        println!("{line}");
    }
    report(&artifacts);
    Ok(())
}

/// Series read back from a CSV: `values[t]`, with provenance from its comments.
struct InputSeries {
    values: Vec<f64>,
    column: String,
    master_seed: Option<u64>,
    semantics: Option<qwalk::disorder::Semantics>,
}

fn read_series(path: &Path, column: Option<&str>) -> Result<InputSeries, CliError> {
    let bad = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let mut master_seed = None;
    let mut semantics = None;
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let line = line.trim_start_matches('#').trim();
        if let Some(v) = line.strip_prefix("master_seed:") {
            master_seed = v.trim().parse().ok();
        } else if let Some(v) = line.strip_prefix("semantics:") {
            semantics = parse_semantics(v.trim());
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let index = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("no column `{name}`")))?,
        None if headers.len() >= 2 => 1,
        None => return Err(bad("need at least two columns".to_string())),
    };
    let mut values: Vec<f64> = Vec::new();
    let mut seen = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = row + 1;
        let t: usize = record
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(format!("row {line}: first column must be a non-negative integer step")))?;
        let v: f64 = record
            .get(index)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(format!("row {line}: column {} is not a number", &headers[index])))?;
        if t >= values.len() {
            values.resize(t + 1, 0.0);
            seen.resize(t + 1, false);
        }
        if seen[t] {
            return Err(bad(format!("row {line}: duplicate step {t}")));
        }
        seen[t] = true;
        values[t] = v;
    }
    Ok(InputSeries {
        values,
        column: headers[index].to_string(),
        master_seed,
        semantics,
    })
}

fn fit(
    input: &Path,
    t_min: usize,
    t_max: usize,
    window: Option<usize>,
    column: Option<&str>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let series = read_series(input, column)?;
    let global = fit_power_law(&series.values, t_min, t_max)?;
    let mut tables = vec![fit_table("fit", &global)];
    if let Some(w) = window {
        tables.push(alpha_table("alpha", &windowed_alpha(&series.values, w)?));
    }
    let bytes = std::fs::read(input).map_err(|e| CliError::io(input, e))?;
    let record = serde_json::json!({
        "input_sha256": sha256_hex(&bytes),
        "column": series.column,
        "t_min": t_min,
        "t_max": t_max,
        "window": window,
    });
    let manifest = Manifest::new("fit", &record, series.master_seed, series.semantics);
    match out {
        Some(dir) => {
            let mut artifacts = Artifacts::create(&dir)?;
            artifacts.write_tables_csv(&tables, &manifest)?;
            println!("alpha[{t_min}, {t_max}] = {:.6}", global.alpha);
            report(&artifacts);
        }
        None => {
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("{}", t.columns.join(","));
                for row in &t.rows {
                    println!("{}", row.iter().map(Cell::text).collect::<Vec<_>>().join(","));
                }
            }
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            workers,
            out,
            format,
            plot,
        } => simulate(&config, seed, workers, out, format, plot),
        Command::Reproduce {
            figure,
            paper_scale,
            seed,
            workers,
            out,
        } => reproduce(figure, paper_scale, seed, workers, out),
        Command::Fit {
            input,
            t_min,
            t_max,
            window,
            column,
            out,
        } => fit(&input, t_min, t_max, window, column.as_deref(), out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
