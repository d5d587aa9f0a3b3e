use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use asdbench::runner::{
    compare_table, emit_roc_svg, first_run_curves, inspect, kernel_table, load_config,
    run_experiment, write_outputs, ReportBundle, RunError,
};

#[derive(Parser)]
#[command(name = "asdbench", version, about = "Classifier benchmark for the ASD screening datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classifier comparison and kernel sweep described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeat: Option<usize>,
    },
    /// Plot the first-seed ROC curves of a saved report.
    Roc {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print attribute kinds and missing-value counts.
    Inspect {
        #[arg(long, num_args = 1.., required = true)]
        data: Vec<String>,
        #[arg(long)]
        class_attribute: Option<String>,
    },
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            repeat,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = repeat {
                cfg.repeat = r;
            }
            cfg.validate()?;
            let dir = out.unwrap_or_else(|| cfg.output_path());
            let bundle = run_experiment(&cfg)?;
            let d = &bundle.data;
            println!(
                "{} rows parsed, {} dropped for missing values, {} used ({} features)",
                d.rows_parsed, d.rows_dropped, d.rows_clean, d.encoded_dim
            );
            let seeds: Vec<String> = bundle.runs.iter().map(|r| r.seed.to_string()).collect();
            println!("seeds: {}\n", seeds.join(", "));
            if !bundle.summary.classifiers.is_empty() {
                println!("Classifiers (mean over seeds)\n{}", compare_table(&bundle).to_text());
            }
            if !bundle.summary.kernels.is_empty() {
                println!("SVM kernels (mean over seeds)\n{}", kernel_table(&bundle).to_text());
            }
            for p in write_outputs(&bundle, &dir)? {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Roc { report, out } => {
            let text = std::fs::read_to_string(&report).map_err(|e| {
                RunError::Report(format!("{}: {e}", report.display()))
            })?;
            let bundle = ReportBundle::from_json(&text)?;
            emit_roc_svg(&first_run_curves(&bundle), &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Inspect {
            data,
            class_attribute,
        } => {
            print!("{}", inspect(&data, class_attribute.as_deref())?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
