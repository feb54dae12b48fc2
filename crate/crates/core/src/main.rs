use clap::Parser;

use atomcauchy::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
