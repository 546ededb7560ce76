use std::process::ExitCode;

fn main() -> ExitCode {
    everettropy::cli::run()
}
