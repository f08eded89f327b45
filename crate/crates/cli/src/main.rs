use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(llr_cli::run(std::env::args_os()))
}
