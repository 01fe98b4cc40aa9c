use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

fn main() -> ExitCode {
    let cli = swm_cli::Cli::parse();
    let start = Instant::now();
    let code = swm_cli::run(cli);
    // timing goes to stderr so reports stay reproducible
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
