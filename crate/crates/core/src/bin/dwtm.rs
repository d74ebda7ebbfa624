use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dwtm::pipeline::{self, ConfigLayer, PipelineConfig};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  other failure
  2  invalid arguments or configuration
  3  CSV parse error
  4  schema or data error (missing target, bad cell, too few classes)
  5  no feature carries any signal
  6  I/O error";

#[derive(Parser)]
#[command(name = "dwtm", version, about = "Encode tabular data as weighted text images", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-feature association scores and weights.
    Weights(Common),
    /// Compute the canvas layout and write <out>/layout.json.
    Layout(Common),
    /// Render every row into <out>/{train,test}/<label>/<row>.png plus manifest.json.
    Encode(Common),
}

#[derive(Args)]
struct Common {
    /// Input CSV file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Name of the class column.
    #[arg(long)]
    target: Option<String>,
    /// Canvas width in pixels.
    #[arg(long)]
    width: Option<u32>,
    /// Canvas height in pixels.
    #[arg(long)]
    height: Option<u32>,
    /// Fraction of rows in the training split, in (0, 1].
    #[arg(long)]
    split: Option<f64>,
    /// Seed for the train/test shuffle.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print machine-readable JSON.
    #[arg(long)]
    json: bool,
}

impl Common {
    fn resolve(&self) -> Result<PipelineConfig, pipeline::Error> {
        let file = match &self.config {
            Some(path) => ConfigLayer::from_json_file(path)?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            input: self.input.clone(),
            target: self.target.clone(),
            width: self.width,
            height: self.height,
            split: self.split,
            seed: self.seed,
            out: self.out.clone(),
            ..Default::default()
        };
        PipelineConfig::resolve([file, flags])
    }
}

fn run(cli: Cli) -> Result<(), pipeline::Error> {
    match cli.command {
        Command::Weights(args) => {
            let weights = pipeline::cmd_weights(&args.resolve()?)?;
            if args.json {
                println!("{}", pipeline::weight_table_json(&weights));
            } else {
                print!("{}", pipeline::weight_table_text(&weights));
            }
        }
        Command::Layout(args) => {
            let config = args.resolve()?;
            let manifest = pipeline::cmd_layout(&config)?;
            if args.json {
                println!("{}", manifest.to_json());
            } else {
                println!(
                    "{} placed, {} dropped -> {}",
                    manifest.placements.len(),
                    manifest.dropped.len(),
                    pipeline::layout_path(&config.out).display()
                );
            }
        }
        Command::Encode(args) => {
            let config = args.resolve()?;
            let manifest = pipeline::cmd_encode(&config)?;
            let files = manifest.files.as_deref().unwrap_or_default();
            if args.json {
                println!("{}", manifest.to_json());
            } else {
                println!("{} images -> {}", files.len(), config.out.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
