fn main() {
    std::process::exit(glorbit::cli::main_with_args(std::env::args_os()));
}
