fn main() {
    std::process::exit(bft_core::cli::main_with_args(std::env::args_os()));
}
