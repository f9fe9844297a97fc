use clap::Parser;

use jsrcert::cli::{run, Cli};

fn main() {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error {e}");
            1
        }
    };
    std::process::exit(code);
}
