fn main() {
    std::process::exit(triadlab::cli::main_with_args(std::env::args_os()));
}
