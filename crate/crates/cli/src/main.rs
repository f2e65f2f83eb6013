use std::process::ExitCode;

use clap::Parser;
use uctrl_cli::{init_threads, run, Cli, Exit};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::InputError as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    let code = match run(cli, &mut std::io::stdout().lock()) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            Exit::of_error(&e)
        }
    };
    ExitCode::from(code as u8)
}
