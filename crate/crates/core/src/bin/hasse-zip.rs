use clap::Parser;
use hasse_zip::cli::{execute, RunConfig};

fn main() {
    let config = RunConfig::parse();
    std::process::exit(execute(&config));
}
