use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::init();
    let args = gaussreg_cli::Args::parse();
    match gaussreg_cli::run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gaussreg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
