use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use rmcount_cli::args::Cli;
use rmcount_cli::{run, summarize, CliResult, OutputFormat, RunConfig, RunRecord};

fn emit(record: &RunRecord, config: &RunConfig) -> CliResult<()> {
    let text = match config.output_format {
        OutputFormat::Json => record.to_json()?,
        OutputFormat::Csv => record.to_csv()?,
    };
    match &config.output_path {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let config = cli.into_config();
    if config.parallelism > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = run(config.clone()).and_then(|record| {
        if !quiet {
            eprintln!("{}", summarize(&record));
        }
        emit(&record, &config)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
