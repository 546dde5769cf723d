use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = cremona::cli::run(std::env::args_os());
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(outcome.stdout.as_bytes());
    let _ = out.flush();
    ExitCode::from(outcome.code as u8)
}
