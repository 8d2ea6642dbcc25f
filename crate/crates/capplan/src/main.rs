use std::process::exit;

fn main() {
    exit(capplan::cli::run_cli(std::env::args_os()));
}
