//! `spinmem`: encode a payload into a multi-frequency pulse, simulate the
//! spin cluster it drives, and decode the bits from the resulting spectrum.
//!
//! Exit codes: 0 on success, 1 when a decode does not match the stored
//! payload, 2 on invalid input or any other failure.

mod args;
mod bundle;
mod commands;
mod plot;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(args) => commands::cmd_gen(args),
        Command::Write(args) => commands::cmd_write(args),
        Command::Simulate(args) => commands::cmd_simulate(args),
        Command::Read(args) => commands::cmd_read(args),
        Command::Plot(args) => commands::cmd_plot(args),
        Command::Roundtrip(args) => commands::cmd_roundtrip(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
