fn main() {
    std::process::exit(illposed::cli::main_with_args(std::env::args_os()));
}
