fn main() {
    std::process::exit(ethspec_cli::main_with_args(std::env::args_os()));
}
