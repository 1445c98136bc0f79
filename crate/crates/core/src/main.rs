fn main() {
    std::process::exit(wandergen::cli::main_with_args(std::env::args_os()));
}
