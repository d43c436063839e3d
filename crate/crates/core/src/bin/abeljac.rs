use abeljac::cli::{run, CommandConfig};
use clap::Parser;

fn main() {
    std::process::exit(run(&CommandConfig::parse()));
}
