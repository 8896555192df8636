use std::process::ExitCode;

fn main() -> ExitCode {
    ant_system::bench::cli::main_with_args(std::env::args_os())
}
