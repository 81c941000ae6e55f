fn main() {
    std::process::exit(congru::cli::main_with_args(std::env::args_os()));
}
