fn main() {
    std::process::exit(sievegap::cli::main_with_args(std::env::args_os()));
}
