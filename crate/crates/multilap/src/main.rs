fn main() {
    std::process::exit(multilap::cli::main_with(std::env::args_os()));
}
