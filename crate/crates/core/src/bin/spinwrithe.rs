fn main() {
    std::process::exit(spinwrithe::cli::main_with_args(std::env::args_os()));
}
