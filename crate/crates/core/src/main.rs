use std::process::ExitCode;

use clap::Parser;

use moore_nogo::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match cli::execute(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = outcome.render(args.format);
    match &args.out {
        Some(path) => {
            if let Err(e) = cli::write_atomic(path, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
        }
        None => print!("{text}"),
    }
    eprint!("{}", cli::summary(&outcome));
    ExitCode::from(outcome.exit_code())
}
