use std::process::exit;

fn main() {
    exit(psinfo::cli::run());
}
