use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(spinmzi_cli::run(std::env::args_os()))
}
