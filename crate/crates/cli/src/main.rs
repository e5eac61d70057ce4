use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(bvsieve_cli::run(std::env::args_os()))
}
