use std::process::ExitCode;

fn main() -> ExitCode {
    tsallis_ea::harness::cli::main_with_args(std::env::args_os())
}
