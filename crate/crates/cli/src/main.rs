use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(spheroreg_cli::run(std::env::args_os()))
}
