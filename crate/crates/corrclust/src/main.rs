use std::process::ExitCode;

fn main() -> ExitCode {
    corrclust::cli::run(std::env::args_os())
}
