fn main() {
    std::process::exit(prolate::cli::main_with_args(std::env::args_os()));
}
