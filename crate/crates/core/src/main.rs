fn main() {
    std::process::exit(nldiff::cli::main_with_args(std::env::args_os()));
}
