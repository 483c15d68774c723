use std::process::exit;

fn main() {
    exit(aodkit::cli::run(std::env::args_os()));
}
