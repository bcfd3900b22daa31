use std::io;
use std::process::ExitCode;

use oddsquares::cli;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = cli::main_with_args(std::env::args().skip(1), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}
