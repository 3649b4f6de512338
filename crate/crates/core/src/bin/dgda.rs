fn main() {
    std::process::exit(dgda::harness::cli::main_with_args(std::env::args_os()));
}
