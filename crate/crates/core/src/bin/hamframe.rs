use clap::Parser;
use hamframe::experiment::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
