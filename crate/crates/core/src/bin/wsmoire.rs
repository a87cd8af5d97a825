use clap::Parser;
use wsmoire::cli::{run, Args};

fn main() {
    std::process::exit(run(&Args::parse()));
}
