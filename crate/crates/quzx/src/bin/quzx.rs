fn main() {
    std::process::exit(quzx::cli::main_with_args(std::env::args_os()));
}
