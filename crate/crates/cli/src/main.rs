use clap::Parser;
use strictqst_cli::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("strictqst: {e}");
        std::process::exit(e.exit_code());
    }
}
