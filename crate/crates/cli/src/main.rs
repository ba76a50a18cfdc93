//! synthvec command line: run experiments from config files, replicate the
//! preset batches, and check relation strings.
//!
//! Exit codes: 0 on success, 1 for validation problems (bad config, bad
//! relation, bad flag value), 2 for runtime failures (I/O, serialization).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use synthvec::emit::{emit_report_json, emit_scatter_svg, emit_vectors_csv, ScatterOptions};
use synthvec::experiment::{
    load_config, preset_configs, run_experiment, ExperimentConfig, ExperimentReport, Preset,
};
use synthvec::Error;

#[derive(Parser)]
#[command(
    name = "synthvec",
    version,
    about = "Synthesize corpora, train skip-gram vectors, verify word relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for emitted artifacts.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Override the training seeds with this single seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Which artifact kinds to write.
    #[arg(long, global = true, value_enum, default_value_t = Format::All)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config file.
    Run { config: PathBuf },
    /// Run a preset experiment batch (fig2, fig3, fig4 or sec2b).
    Replicate { preset: String },
    /// Parse a relation string and print its canonical form.
    ParseRelation { relation: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Json,
    All,
}

impl Format {
    fn wants_csv(self) -> bool {
        matches!(self, Format::Csv | Format::All)
    }
    fn wants_svg(self) -> bool {
        matches!(self, Format::Svg | Format::All)
    }
    fn wants_json(self) -> bool {
        matches!(self, Format::Json | Format::All)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1, // bad usage is a validation error
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Run { config } => {
            let mut config = load_config(config)?;
            apply_seed_override(&mut config, cli.seed);
            let report = run_experiment(&config)?;
            emit_artifacts(&report, &cli.out_dir, cli.format)?;
            print_summary(&report);
            Ok(())
        }
        Command::Replicate { preset } => {
            let preset: Preset = preset.parse()?;
            for mut config in preset_configs(preset) {
                apply_seed_override(&mut config, cli.seed);
                let report = run_experiment(&config)?;
                emit_artifacts(&report, &cli.out_dir, cli.format)?;
                print_summary(&report);
            }
            Ok(())
        }
        Command::ParseRelation { relation } => {
            let parsed = synthvec::relation::parse_relation(relation)?;
            println!("{}", parsed.unparse());
            Ok(())
        }
    }
}

fn apply_seed_override(config: &mut ExperimentConfig, seed: Option<u64>) {
    if let Some(seed) = seed {
        config.training.seed = seed;
        config.seeds = Some(vec![seed]);
    }
}

/// Write the requested artifacts under `<out_dir>/<experiment name>/`.
/// The scatter uses the first training seed. When `--format all` is in
/// effect and the model is not 2-dimensional, the scatter is skipped with a
/// note instead of failing the run; asking for `--format svg` explicitly
/// propagates the error.
fn emit_artifacts(report: &ExperimentReport, out_dir: &Path, format: Format) -> Result<(), Error> {
    let dir = out_dir.join(&report.config.name);
    if format.wants_csv() {
        emit_vectors_csv(report, &dir.join("vectors.csv"))?;
    }
    if format.wants_svg() {
        let first_seed = report.seeds[0];
        let result = emit_scatter_svg(
            report,
            first_seed,
            &dir.join("scatter.svg"),
            &ScatterOptions::default(),
        );
        match result {
            Err(Error::ScatterDimension { dim }) if format == Format::All => {
                eprintln!(
                    "note: {}: skipping scatter.svg (model dimension is {dim}, not 2)",
                    report.config.name
                );
            }
            other => other?,
        }
    }
    if format.wants_json() {
        emit_report_json(report, &dir.join("report.json"))?;
    }
    Ok(())
}

fn print_summary(report: &ExperimentReport) {
    let name = &report.config.name;
    let ms = report.duration.as_millis();
    if report.relations.is_empty() {
        println!("{name}: {} seed(s) trained in {ms} ms", report.seeds.len());
    } else {
        let solved: Vec<String> = report
            .relations
            .iter()
            .map(|r| format!("{} solved {:.0}%", r.normalized, r.solved_fraction * 100.0))
            .collect();
        println!(
            "{name}: {} seed(s) trained in {ms} ms; {}",
            report.seeds.len(),
            solved.join("; ")
        );
    }
}
