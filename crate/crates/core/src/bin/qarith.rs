fn main() {
    std::process::exit(qarith::cli::main_with_args(std::env::args_os()));
}
