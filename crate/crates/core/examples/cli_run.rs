//! Drives the command layer in-process on a shipped config and lists the files written.

use wsmoire::cli::{execute, Command};
use wsmoire::config::RunConfig;

fn main() -> wsmoire::Result<()> {
    let cfg = RunConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/spectrum_j10_5.toml").as_ref())?;
    let out = std::env::temp_dir().join("wsmoire_cli_run");
    for f in execute(Command::Spectrum, &cfg, &out, 1)? {
        println!("{}", f.display());
    }
    println!("{}", std::fs::read_to_string(out.join("spectrum_report.txt"))?);
    Ok(())
}
