use std::process::ExitCode;

use clap::Parser;
use kgreason_cli::args::Cli;
use serde_json::json;

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match kgreason_cli::run(&cli) {
        Ok(summary) => {
            println!("{}", json!({"ok": true, "summary": summary}));
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            println!("{}", json!({"ok": false, "category": e.category(), "error": e.to_string()}));
            ExitCode::from(e.exit_code())
        }
    }
}
