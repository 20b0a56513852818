use std::process::ExitCode;

use clap::Parser;
use spinring::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
